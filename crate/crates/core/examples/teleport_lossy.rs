//! Teleportation with a squeezed-photon resource and lossy counters.
//!
//! The kernel is built once per circuit and then evaluated over many inputs.

use std::f64::consts::{FRAC_PI_2, PI, SQRT_2};

use catsim::detection::{DetectorModel, OutcomeClass};
use catsim::states::{QubitSpec, ResourceFamily, SqueezingPolicy};
use catsim::teleport::Teleporter;

fn main() -> catsim::Result<()> {
    let alpha = 1.0;
    let kind = ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric).kind_for(SQRT_2 * alpha);
    println!("resource {kind:?}");

    for eta in [1.0, 0.95, 0.9, 0.85, 0.8] {
        let kernel = Teleporter::new(alpha, kind, DetectorModel::new(eta)?)?.kernel()?;
        let mut worst = (f64::INFINITY, 0.0, 0.0);
        let n = 24;
        for i in 0..=n {
            for j in 0..=n {
                let (t, p) = (FRAC_PI_2 * i as f64 / n as f64, 2.0 * PI * j as f64 / n as f64);
                let rep = kernel.evaluate(&QubitSpec::new(alpha, t, p))?;
                let f = rep.get(OutcomeClass::Zero, OutcomeClass::Odd).fidelity;
                if f < worst.0 {
                    worst = (f, t, p);
                }
            }
        }
        println!("eta {eta:.2}: worst (zero, odd) fidelity {:.5} at theta {:.3}, phi {:.3}", worst.0, worst.1, worst.2);
    }
    Ok(())
}
