//! The rotated Hadamard gate heralded on one photon in each counter.

use catsim::detection::DetectorModel;
use catsim::hadamard::{self, HadamardConfig, HadamardGate};
use catsim::states::{self, QubitSpec, ResourceFamily, ResourceKind, SqueezingPolicy};

fn main() -> catsim::Result<()> {
    let alpha = 0.5;
    let input = QubitSpec::new(alpha, 0.7, 1.1);

    for (name, kind) in [
        ("exact cat", ResourceKind::ExactCat),
        ("squeezed photon", ResourceFamily::SqueezedPhoton(SqueezingPolicy::Numeric).kind_for(2f64.sqrt() * alpha)),
    ] {
        let gate = HadamardGate::new(alpha, kind, HadamardConfig::default(), DetectorModel::ideal())?;
        let psi = states::qubit_state(&input, gate.input_dim())?;
        let out = gate.apply(&psi)?;
        let target = hadamard::hadamard_target(&input, gate.output_dim())?;
        println!("{name}: p = {:.6}, F = {:.6}", out.probability, out.fidelity(&target)?);
    }

    println!("count  simulated  closed");
    let gate = HadamardGate::new(alpha, ResourceKind::ExactCat, HadamardConfig::default(), DetectorModel::ideal())?;
    let psi = states::qubit_state(&input, gate.input_dim())?;
    for ((n, m), p) in gate.count_distribution(&psi)? {
        if (1..=2).contains(&n) && (1..=2).contains(&m) {
            let closed = hadamard::count_prob_closed(&input, n as i64, m as i64)?;
            println!("({n},{m})  {p:.6e}  {closed:.6e}");
        }
    }
    Ok(())
}
