//! Displacement fringe: a displaced source through the rotated Hadamard and
//! the computational readout.

use catsim::detection::DetectorModel;
use catsim::hadamard::{self, FringeOptions};
use catsim::states::{ResourceFamily, SqueezingPolicy};

fn main() -> catsim::Result<()> {
    let alpha = 0.5;
    let deltas = hadamard::default_deltas(alpha, 21);
    let detectors = [DetectorModel::ideal(), DetectorModel::new(0.9)?, DetectorModel::new(0.8)?];
    let family = ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric);
    let fringes = hadamard::fringe_sweep_multi(alpha, family, &deltas, &detectors, &FringeOptions::default())?;

    println!("{:>8} {:>10} {:>10} {:>10}", "delta", "eta=1", "eta=0.9", "eta=0.8");
    for k in 0..deltas.len() {
        println!(
            "{:>8.4} {:>10.6} {:>10.6} {:>10.6}",
            deltas[k], fringes[0][k].p_plus, fringes[1][k].p_plus, fringes[2][k].p_plus
        );
    }
    for (det, f) in detectors.iter().zip(&fringes) {
        let p: Vec<f64> = f.iter().map(|x| x.p_plus).collect();
        println!("eta {:.1}: visibility {:.5}", det.efficiency, hadamard::visibility(&p)?);
    }
    Ok(())
}
