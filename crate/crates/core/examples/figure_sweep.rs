//! Runs a figure sweep the way `catsim figure fig4` does and prints where the
//! files went.
//!
//! ```text
//! cargo run --release --example figure_sweep -- /tmp/catsim-out
//! ```

use std::path::PathBuf;

use catsim::sweep::{self, FigureId, RunConfig};

fn main() -> catsim::Result<()> {
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("catsim-figure-sweep"));
    let cfg = RunConfig { grid: 32, out, workers: Some(2), ..Default::default() };
    let run = sweep::run_figure(FigureId::Fig4, &cfg)?;
    for f in &run.files {
        println!("wrote {}", f.display());
    }

    let t = &run.tables[0];
    let alpha = t.values("alpha");
    let p = t.values("min_p_succ");
    for (a, v) in alpha.iter().zip(&p).step_by(10) {
        println!("alpha {a:.2}: min p_succ {v:.6}");
    }
    println!("flags: {:?}", run.manifest.discrepancy_flags);
    Ok(())
}
