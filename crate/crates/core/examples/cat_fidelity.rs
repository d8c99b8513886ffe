//! Best squeezed-single-photon approximation of an odd cat.
//!
//! Prints the optimal squeezing from the closed form next to the printed
//! arccosh formula, and checks the closed form against a direct overlap.

use catsim::fock;
use catsim::states::{self, CatSpec, SqueezingPolicy};

fn main() -> catsim::Result<()> {
    println!("{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "alpha", "r_num", "F_num", "r_eq8", "F_eq8", "F_direct");
    for alpha in [0.25, 0.5, 1.0, 1.5, 2.0] {
        let best = states::optimal_r_numeric(alpha);
        let r8 = SqueezingPolicy::Eq8.r_for(alpha);
        let f8 = states::cat_fidelity_closed(alpha, r8)?;

        let dim = fock::cutoff_for_squeezing(best.r, alpha);
        let cat = states::cat_state(CatSpec::odd(alpha), dim)?;
        let photon = fock::squeezed_photon(best.r, dim)?;
        let direct = fock::fidelity(&cat, &photon)?;

        println!(
            "{alpha:>6.2} {:>10.6} {:>10.6} {r8:>10.6} {f8:>10.6} {direct:>10.6}",
            best.r, best.fidelity
        );
    }
    Ok(())
}
