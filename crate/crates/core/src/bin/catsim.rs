use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use catsim::states::SqueezingPolicy;
use catsim::sweep::{self, FigureId, Protocol, ResourceChoice, RunConfig};
use catsim::verify::{self, VerifyOptions};
use catsim::Error;

#[derive(Parser)]
#[command(name = "catsim", version, about = "Cat-state qubit gates with squeezed-photon resources")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Reproduce one figure as CSV tables, a plot script and a manifest.
    Figure {
        /// fig1, fig3, fig4, fig5, fig6, fig7, fig9, fig11 or fig12
        id: String,
        #[command(flatten)]
        flags: Flags,
    },
    /// Sweep the cross-product of the given parameters.
    Custom {
        #[command(flatten)]
        flags: Flags,
        #[arg(long, value_enum)]
        protocol: Option<ProtocolArg>,
        /// Experiment name, used for the output file names.
        #[arg(long)]
        name: Option<String>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        theta: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        phi: Option<Vec<f64>>,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        delta: Option<Vec<f64>>,
    },
    /// Run the acceptance criteria and print one line per criterion.
    Verify {
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 64)]
        grid: usize,
        /// Also write verify.json here.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Args)]
struct Flags {
    #[arg(long, value_delimiter = ',')]
    alpha: Option<Vec<f64>>,
    #[arg(long, value_delimiter = ',')]
    eta: Option<Vec<f64>>,
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long, value_enum)]
    resource: Option<ResourceArg>,
    #[arg(long = "r-policy", value_enum)]
    r_policy: Option<PolicyArg>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    workers: Option<usize>,
    /// JSON file mirroring the run configuration; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ResourceArg {
    Cat,
    Sqphoton,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Numeric,
    Eq8,
}

#[derive(Clone, Copy, ValueEnum)]
enum ProtocolArg {
    Teleport,
    Hadamard,
    Fringe,
    Cat,
}

impl Flags {
    fn into_config(self) -> catsim::Result<RunConfig> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_json_file(p)?,
            None => RunConfig::default(),
        };
        if self.alpha.is_some() {
            cfg.alpha = self.alpha;
        }
        if self.eta.is_some() {
            cfg.eta = self.eta;
        }
        if let Some(g) = self.grid {
            cfg.grid = g;
        }
        if let Some(r) = self.resource {
            cfg.resource = Some(match r {
                ResourceArg::Cat => ResourceChoice::Cat,
                ResourceArg::Sqphoton => ResourceChoice::Sqphoton,
            });
        }
        if let Some(p) = self.r_policy {
            cfg.r_policy = match p {
                PolicyArg::Numeric => SqueezingPolicy::Numeric,
                PolicyArg::Eq8 => SqueezingPolicy::Eq8,
            };
        }
        if self.dim.is_some() {
            cfg.dim = self.dim;
        }
        if let Some(o) = self.out {
            cfg.out = o;
        }
        if self.workers.is_some() {
            cfg.workers = self.workers;
        }
        Ok(cfg)
    }
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Config(_) | Error::InvalidParameter(_) | Error::Json(_) => 2,
        e if e.is_numerical() => 3,
        _ => 1,
    }
}

fn report(summary: &sweep::RunSummary) {
    for f in &summary.files {
        println!("{}", f.display());
    }
}

fn run(cli: Cli) -> catsim::Result<u8> {
    match cli.command {
        Command::Figure { id, flags } => {
            let fig = FigureId::parse(&id)?;
            report(&sweep::run_figure(fig, &flags.into_config()?)?);
            Ok(0)
        }
        Command::Custom { flags, protocol, name, theta, phi, delta } => {
            let mut cfg = flags.into_config()?;
            if let Some(p) = protocol {
                cfg.protocol = match p {
                    ProtocolArg::Teleport => Protocol::Teleport,
                    ProtocolArg::Hadamard => Protocol::Hadamard,
                    ProtocolArg::Fringe => Protocol::Fringe,
                    ProtocolArg::Cat => Protocol::Cat,
                };
            }
            if let Some(n) = name {
                cfg.experiment = n;
            }
            cfg.theta = theta.or(cfg.theta);
            cfg.phi = phi.or(cfg.phi);
            cfg.delta = delta.or(cfg.delta);
            report(&sweep::run_custom(&cfg)?);
            Ok(0)
        }
        Command::Verify { dim, grid, out } => {
            if !(2..=1024).contains(&grid) {
                return Err(Error::Config(format!("grid = {grid} must be in [2, 1024]")));
            }
            let opts = VerifyOptions { dim, grid, ..Default::default() };
            let rep = verify::verify(&opts);
            for c in &rep.criteria {
                println!("{}", c.line());
                for n in &c.notes {
                    println!("       {n}");
                }
            }
            println!("{} passed, {} failed", rep.passed, rep.failed);
            if let Some(dir) = out {
                std::fs::create_dir_all(&dir)?;
                std::fs::write(dir.join("verify.json"), serde_json::to_string_pretty(&rep)? + "\n")?;
            }
            Ok(if rep.all_passed() { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("catsim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
