//! Parameter sweeps that reproduce the figures as CSV tables, plot scripts
//! and a run manifest.

pub mod config;
pub mod figures;
pub mod output;

pub use config::{FigureId, Protocol, ResourceChoice, RunConfig};
pub use figures::{compute_custom, compute_figure, input_grid, run_custom, run_figure, Computed, RunSummary};
pub use output::{Cell, Manifest, PlotKind, SweepRecord, Table};
