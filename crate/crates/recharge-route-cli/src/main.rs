//! Command-line front end: solve a single instance, run a benchmark
//! manifest, or render a route plot. Set `RECHARGE_ROUTE_LOG=debug` for
//! stage diagnostics.

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};

use recharge_route::bench::{self, Algorithm, Manifest};
use recharge_route::error::Error;
use recharge_route::exact::{exact_min_length, ExactLimits};
use recharge_route::heuristic::{heuristic_algorithm, Bundling, HeuristicConfig};
use recharge_route::instance::{
    build_instance, parse_tsplib, DepotSelection, Instance, SynthesisConfig, WeightMode,
};
use recharge_route::plot::render_svg;
use recharge_route::route_approx::approximation_algorithm;
use recharge_route::walk::{validate_walk, Solution, WalkDocument};

const EXIT_ERROR: u8 = 1;
const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "recharge-route", version, about = "Route planning with recharging depots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve one instance and write the walk as JSON.
    Solve(SolveArgs),
    /// Run a benchmark manifest and write a CSV report.
    Bench(BenchArgs),
    /// Render an instance (and optionally a walk) as SVG.
    Plot(PlotArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum AlgoArg {
    Approx,
    Heuristic,
    Exact,
}

impl From<AlgoArg> for Algorithm {
    fn from(a: AlgoArg) -> Algorithm {
        match a {
            AlgoArg::Approx => Algorithm::Approx,
            AlgoArg::Heuristic => Algorithm::Heuristic,
            AlgoArg::Exact => Algorithm::Exact,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum WeightsArg {
    Int,
    Real,
}

impl From<WeightsArg> for WeightMode {
    fn from(w: WeightsArg) -> WeightMode {
        match w {
            WeightsArg::Int => WeightMode::Integer,
            WeightsArg::Real => WeightMode::Real,
        }
    }
}

#[derive(Args)]
struct InstanceArgs {
    /// TSPLIB file to load.
    #[arg(long)]
    file: Option<PathBuf>,
    /// Instance-synthesis config (JSON or key=value lines) instead of flags.
    #[arg(long, conflicts_with_all = ["file", "depots"])]
    config: Option<PathBuf>,
    /// Depot selection: `first:m`, `farthest:m` or `explicit:1,5,9`.
    #[arg(long)]
    depots: Option<String>,
    /// Discharge time budget.
    #[arg(long = "D")]
    discharge: Option<f64>,
    /// Recharge time, folded into the edge weights.
    #[arg(long = "T", default_value_t = 0.0)]
    recharge: f64,
    /// Edge weight mode.
    #[arg(long, value_enum, default_value = "real")]
    weights: WeightsArg,
}

impl InstanceArgs {
    fn build(&self) -> Result<Instance, Error> {
        if let Some(config_path) = &self.config {
            let text = std::fs::read_to_string(config_path)?;
            let config = SynthesisConfig::from_str_any(&text)?;
            let raw = parse_tsplib(&std::fs::read_to_string(&config.source_file)?)?;
            return build_instance(
                &raw,
                &config.depot_selection()?,
                config.d,
                config.t,
                config.weight_mode,
            );
        }
        let file = self
            .file
            .as_ref()
            .ok_or_else(|| Error::Invalid("--file (or --config) is required".into()))?;
        let depots = self
            .depots
            .as_ref()
            .ok_or_else(|| Error::Invalid("--depots is required".into()))?;
        let d = self
            .discharge
            .ok_or_else(|| Error::Invalid("--D is required".into()))?;
        let raw = parse_tsplib(&std::fs::read_to_string(file)?)?;
        build_instance(
            &raw,
            &DepotSelection::parse(depots)?,
            d,
            self.recharge,
            self.weights.into(),
        )
    }
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    #[arg(long, value_enum, default_value = "heuristic")]
    algo: AlgoArg,
    /// Bundling width for the heuristic: `auto` or an integer.
    #[arg(long, default_value = "auto")]
    b: String,
    /// Cap on the spanning-forest sweep.
    #[arg(long)]
    kmax: Option<usize>,
    /// Solver timeout in milliseconds.
    #[arg(long)]
    timeout: Option<u64>,
    /// Write the walk JSON here.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write an SVG plot of the walk here.
    #[arg(long)]
    plot: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Benchmark manifest (JSON).
    #[arg(long)]
    manifest: PathBuf,
    /// Concurrent rows.
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the CSV report here (defaults to stdout).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PlotArgs {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Walk JSON produced by `solve` to overlay on the instance.
    #[arg(long)]
    walk: Option<PathBuf>,
    #[arg(long)]
    out: PathBuf,
}

fn parse_bundling(b: &str) -> Result<Option<usize>, Error> {
    if b == "auto" {
        return Ok(None);
    }
    b.parse::<usize>()
        .map(Some)
        .map_err(|_| Error::Invalid(format!("--b expects `auto` or an integer, got `{b}`")))
}

fn cmd_solve(args: &SolveArgs) -> Result<u8, Error> {
    let instance = args.instance.build()?;
    let timeout = args.timeout.map(Duration::from_millis);
    let deadline = timeout.map(|t| std::time::Instant::now() + t);
    let algorithm: Algorithm = args.algo.into();

    let solution: Solution = match algorithm {
        Algorithm::Approx => {
            let out = approximation_algorithm(&instance)?;
            if log::log_enabled!(log::Level::Debug) {
                log::debug!(
                    "stage diagnostics: {}",
                    serde_json::to_string(&out.diagnostics).unwrap_or_default()
                );
            }
            out.solution
        }
        Algorithm::Heuristic => {
            let config = HeuristicConfig {
                bundling: match parse_bundling(&args.b)? {
                    Some(b) => Bundling::Fixed(b),
                    None => Bundling::Auto,
                },
                k_max: args.kmax,
                deadline,
                ..Default::default()
            };
            let out = heuristic_algorithm(&instance, &config)?;
            if log::log_enabled!(log::Level::Debug) {
                log::debug!(
                    "sweep diagnostics: {}",
                    serde_json::to_string(&out.diagnostics).unwrap_or_default()
                );
            }
            out.solution
        }
        Algorithm::Exact => exact_min_length(
            &instance,
            &ExactLimits {
                deadline,
                ..Default::default()
            },
        )?,
    };

    // Independent validation pass: the CLI never reports a walk feasible
    // unless the validator agrees.
    let verdict = validate_walk(&instance, &solution.walk)?;
    let feasible = solution.report.feasible && verdict.is_feasible();

    println!(
        "{}",
        serde_json::to_string_pretty(&solution.report).expect("report serializes")
    );
    let document = WalkDocument::from_solution(&instance, &solution);
    if let Some(out) = &args.out {
        std::fs::write(out, document.to_json())?;
        log::info!("walk written to {}", out.display());
    }
    if let Some(plot_path) = &args.plot {
        let svg = render_svg(&instance, Some(&solution.walk))?;
        std::fs::write(plot_path, svg)?;
        log::info!("plot written to {}", plot_path.display());
    }
    if !feasible {
        eprintln!("walk failed validation: {verdict:?}");
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

fn cmd_bench(args: &BenchArgs) -> Result<u8, Error> {
    let text = std::fs::read_to_string(&args.manifest)?;
    let manifest = Manifest::from_json(&text)?;
    let base_dir = args
        .manifest
        .parent()
        .unwrap_or_else(|| Path::new("."))
        .to_path_buf();
    let report = bench::run_manifest(&manifest, &base_dir, args.jobs.max(1))?;
    let csv = report.to_csv();
    match &args.out {
        Some(path) => {
            std::fs::write(path, &csv)?;
            log::info!("report written to {}", path.display());
        }
        None => print!("{csv}"),
    }
    Ok(0)
}

fn cmd_plot(args: &PlotArgs) -> Result<u8, Error> {
    let instance = args.instance.build()?;
    let walk = match &args.walk {
        Some(path) => {
            let doc = WalkDocument::from_json(&std::fs::read_to_string(path)?)?;
            Some(doc.to_walk(&instance)?)
        }
        None => None,
    };
    let svg = render_svg(&instance, walk.as_ref())?;
    std::fs::write(&args.out, svg)?;
    Ok(0)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter("RECHARGE_ROUTE_LOG")).init();
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Solve(args) => cmd_solve(args),
        Command::Bench(args) => cmd_bench(args),
        Command::Plot(args) => cmd_plot(args),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            if e.is_infeasible() {
                ExitCode::from(EXIT_INFEASIBLE)
            } else {
                ExitCode::from(EXIT_ERROR)
            }
        }
    }
}
