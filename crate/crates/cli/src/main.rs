//! `fockspace`: Hermite analysis and synthesis, Wigner and ambiguity grids,
//! decay-envelope fits and the verification suites.
//!
//! Exit status: 0 on success, 1 when a checked bound is violated, 2 on usage
//! or data errors.

mod commands;
mod report;
mod suites;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fockspace::grid::AxisSpec;

#[derive(Debug, Parser)]
#[command(name = "fockspace", version, about = "Hermite expansions, weighted norms and phase-space checks")]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Global {
    /// Write the machine-readable report here.
    #[arg(long, global = true, value_name = "PATH", visible_alias = "report")]
    json: Option<PathBuf>,
    /// Cap on worker threads.
    #[arg(long, global = true, value_name = "N")]
    threads: Option<usize>,
    #[command(flatten)]
    tol: Tolerances,
}

#[derive(Debug, Clone, Args)]
pub struct Tolerances {
    #[arg(id = "tol_orthonormality", long = "tol-orthonormality", global = true, default_value_t = 1e-10, value_name = "TOL")]
    pub orthonormality: f64,
    #[arg(id = "tol_fourier", long = "tol-fourier", global = true, default_value_t = 1e-8, value_name = "TOL")]
    pub fourier: f64,
    #[arg(id = "tol_oracle", long = "tol-oracle", global = true, default_value_t = 1e-8, value_name = "TOL")]
    pub oracle: f64,
    #[arg(id = "tol_marginal", long = "tol-marginal", global = true, default_value_t = 1e-6, value_name = "TOL")]
    pub marginal: f64,
    #[arg(id = "tol_ambiguity", long = "tol-ambiguity", global = true, default_value_t = 1e-6, value_name = "TOL")]
    pub ambiguity: f64,
    #[arg(id = "tol_isometry", long = "tol-isometry", global = true, default_value_t = 1e-6, value_name = "TOL")]
    pub isometry: f64,
    #[arg(id = "tol_series", long = "tol-series", global = true, default_value_t = 1e-6, value_name = "TOL")]
    pub series: f64,
    #[arg(id = "tol_slope", long = "tol-slope", global = true, default_value_t = 0.05, value_name = "TOL")]
    pub slope: f64,
    #[arg(id = "tol_fit", long = "tol-fit", global = true, default_value_t = 0.05, value_name = "TOL")]
    pub fit: f64,
    #[arg(id = "tol_imag", long = "tol-imag", global = true, default_value_t = 1e-10, value_name = "TOL")]
    pub imag: f64,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConventionArg {
    Plain,
    Tilde,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Hermite,
    Laguerre,
    Wigner,
    Tame,
    Counterexample,
    Envelope,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Hermite coefficients from samples at the Gauss–Hermite nodes.
    Analyze {
        /// Sample CSV (x,re,im) at the nodes of the order-K rule.
        #[arg(long)]
        samples: PathBuf,
        #[arg(long)]
        nmax: usize,
        /// Rule order K (default nmax + 1).
        #[arg(long)]
        order: Option<usize>,
        #[arg(long)]
        output: PathBuf,
    },
    /// Samples of Σ α_n h_n (or of its Fourier transform).
    Synthesize {
        #[arg(long)]
        coefficients: PathBuf,
        /// Sample axis lo:hi:step.
        #[arg(long, conflicts_with = "nodes", required_unless_present = "nodes")]
        grid: Option<AxisSpec>,
        /// Sample at the nodes of the order-K Gauss–Hermite rule.
        #[arg(long, value_name = "K")]
        nodes: Option<usize>,
        #[arg(long)]
        fourier: bool,
        #[arg(long)]
        output: PathBuf,
    },
    /// Wigner distribution of a density matrix or a pure state on a grid.
    Wigner {
        #[arg(long, conflicts_with = "coefficients", required_unless_present = "coefficients")]
        density: Option<PathBuf>,
        #[arg(long)]
        coefficients: Option<PathBuf>,
        /// q axis (and p axis unless --p-grid is given).
        #[arg(long, default_value = "-8:8:0.03125", allow_hyphen_values = true)]
        grid: AxisSpec,
        #[arg(long, allow_hyphen_values = true)]
        p_grid: Option<AxisSpec>,
        #[arg(long, value_enum, default_value_t = ConventionArg::Plain)]
        convention: ConventionArg,
        #[arg(long)]
        output: PathBuf,
    },
    /// Ambiguity function from coefficients, or the 2-D Fourier transform of a phase-space grid.
    Ambiguity {
        #[arg(long, conflicts_with = "phase_space", required_unless_present = "phase_space")]
        coefficients: Option<PathBuf>,
        #[arg(long)]
        phase_space: Option<PathBuf>,
        /// θ axis (and ϖ axis unless --p-grid is given).
        #[arg(long, default_value = "-16:16:0.0625", allow_hyphen_values = true)]
        grid: AxisSpec,
        #[arg(long, allow_hyphen_values = true)]
        p_grid: Option<AxisSpec>,
        #[arg(long)]
        output: PathBuf,
    },
    /// q and p marginals of a phase-space grid, as CSV axis,x,value.
    Marginals {
        #[arg(long)]
        phase_space: PathBuf,
        #[arg(long)]
        output: PathBuf,
    },
    /// Fit |α_n| ≈ C e^{−λ n^{β/2}}; with --weight, check |α_n| e^{ω(√n)} ≤ bound.
    Envelope {
        #[arg(long)]
        coefficients: PathBuf,
        /// Weight as inline JSON or a JSON file path.
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
    /// Run a verification suite; exit 1 if any check fails.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        /// Truncation order (default depends on the suite).
        #[arg(long)]
        nmax: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Random sample points (laguerre) or random states (wigner).
        #[arg(long)]
        points: Option<usize>,
        /// Coefficient CSV (envelope suite).
        #[arg(long)]
        coefficients: Option<PathBuf>,
        /// Weight as inline JSON or a JSON file path (envelope and tame suites).
        #[arg(long)]
        weight: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        bound: f64,
    },
    /// Decay of the alternating-sign density against the decay of its Wigner function.
    Counterexample {
        #[arg(long, default_value_t = 400)]
        nmax: usize,
        /// Radii for the Wigner profile.
        #[arg(long, default_value = "0:6:0.05")]
        grid: AxisSpec,
    },
}

fn run(cli: Cli) -> anyhow::Result<report::Report> {
    let tol = &cli.global.tol;
    match cli.command {
        Command::Analyze { samples, nmax, order, output } => commands::analyze(&samples, nmax, order, &output),
        Command::Synthesize { coefficients, grid, nodes, fourier, output } => {
            commands::synthesize(&coefficients, grid, nodes, fourier, &output)
        }
        Command::Wigner { density, coefficients, grid, p_grid, convention, output } => commands::wigner(
            density.as_deref(),
            coefficients.as_deref(),
            &grid,
            p_grid.as_ref(),
            convention,
            &output,
            tol,
        ),
        Command::Ambiguity { coefficients, phase_space, grid, p_grid, output } => {
            commands::ambiguity(coefficients.as_deref(), phase_space.as_deref(), &grid, p_grid.as_ref(), &output)
        }
        Command::Marginals { phase_space, output } => commands::marginals(&phase_space, &output),
        Command::Envelope { coefficients, weight, bound } => {
            commands::envelope(&coefficients, weight.as_deref(), bound)
        }
        Command::Verify { suite, nmax, seed, points, coefficients, weight, bound } => {
            let opts = suites::SuiteOptions { nmax, seed, points, coefficients, weight, bound };
            suites::run(suite, &opts, tol)
        }
        Command::Counterexample { nmax, grid } => commands::counterexample(nmax, &grid, tol),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot configure {n} threads: {e}");
            return ExitCode::from(2);
        }
    }
    let json = cli.global.json.clone();
    let outcome = run(cli).and_then(|report| {
        if let Some(path) = &json {
            report.write_json(path)?;
        }
        Ok(report)
    });
    match outcome {
        Ok(report) => {
            report.print_summary();
            if report.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
