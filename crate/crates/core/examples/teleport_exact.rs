//! Teleportation with an ideal Bell-cat resource and ideal counters.

use std::f64::consts::FRAC_PI_3;

use catsim::detection::DetectorModel;
use catsim::states::{QubitSpec, ResourceKind};
use catsim::teleport::{self, Teleporter};

fn main() -> catsim::Result<()> {
    let alpha = 1.0;
    let input = QubitSpec::new(alpha, FRAC_PI_3, 0.4);
    let tp = Teleporter::new(alpha, ResourceKind::ExactCat, DetectorModel::ideal())?;
    let rep = tp.run(&input)?;

    println!("cutoff {}", rep.dim);
    for o in &rep.outcomes {
        if o.probability > 1e-12 {
            println!(
                "{:<12} {:<5} p = {:.6}  F = {:.9}",
                o.outcome.label(),
                format!("{:?}", o.outcome.correction()),
                o.probability,
                o.fidelity
            );
        }
    }
    println!("p_fail {:.9} (closed form {:.9})", rep.p_fail, teleport::p_fail_closed(&input));
    println!("p_succ {:.9} (closed form {:.9})", rep.p_succ, teleport::p_succ_closed(&input));

    let worst = teleport::min_p_succ(alpha, 64)?;
    println!("worst-case p_succ {:.6} at theta {:.4}, phi {:.4}", worst.value, worst.theta, worst.phi);

    let chain = teleport::concatenation_check(&input)?;
    println!("repeat-until-success: simulated {:?}", chain.simulated);
    println!("                      closed    {:?}", chain.closed);
    Ok(())
}
