//! Benchmark harness: a JSON manifest describes instance configurations
//! and algorithms; the runner solves every row (concurrently up to a job
//! limit), re-validates each walk, and writes a stable CSV report with a
//! gap column against the exact oracle where it ran.

use serde::Deserialize;
use std::path::Path;
use std::time::{Duration, Instant};

use crate::error::{Error, Result};
use crate::exact::{exact_min_length, ExactLimits};
use crate::heuristic::{heuristic_algorithm, Bundling, HeuristicConfig, TourMethod};
use crate::instance::{build_instance, parse_tsplib, DepotSelection, Instance, WeightMode};
use crate::route_approx::approximation_algorithm;
use crate::synth::{random_instance, SynthSpec};
use crate::walk::{validate_walk, Solution};

pub const CSV_HEADER: &str =
    "instance,n,m,D,weights,strategy,seed,algorithm,cost,recharges,runtime_ms,feasible,gap_vs_exact,note";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algorithm {
    Approx,
    Heuristic,
    Exact,
}

impl Algorithm {
    pub fn parse(s: &str) -> Result<Algorithm> {
        match s {
            "approx" => Ok(Algorithm::Approx),
            "heuristic" => Ok(Algorithm::Heuristic),
            "exact" => Ok(Algorithm::Exact),
            other => Err(Error::Invalid(format!(
                "unknown algorithm `{other}` (expected approx, heuristic or exact)"
            ))),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Algorithm::Approx => "approx",
            Algorithm::Heuristic => "heuristic",
            Algorithm::Exact => "exact",
        }
    }
}

/// Options shared by the CLI and the bench runner when dispatching a
/// solver.
#[derive(Debug, Clone)]
pub struct SolveOptions {
    /// Bundling width: `None` sweeps automatically.
    pub b: Option<usize>,
    pub k_max: Option<usize>,
    pub timeout: Option<Duration>,
    pub exact_max_vertices: usize,
    pub tour_method: TourMethod,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            b: None,
            k_max: None,
            timeout: None,
            exact_max_vertices: 10,
            tour_method: TourMethod::Christofides,
        }
    }
}

/// Run one algorithm on an instance and re-validate its walk before
/// returning. A solver claiming feasibility for a walk the validator
/// rejects is a hard error.
pub fn dispatch(instance: &Instance, algorithm: Algorithm, opts: &SolveOptions) -> Result<Solution> {
    let deadline = opts.timeout.map(|t| Instant::now() + t);
    let solution = match algorithm {
        Algorithm::Approx => approximation_algorithm(instance)?.solution,
        Algorithm::Heuristic => {
            let config = HeuristicConfig {
                bundling: match opts.b {
                    Some(b) => Bundling::Fixed(b),
                    None => Bundling::Auto,
                },
                k_max: opts.k_max,
                tour_method: opts.tour_method,
                deadline,
            };
            heuristic_algorithm(instance, &config)?.solution
        }
        Algorithm::Exact => {
            let limits = ExactLimits {
                max_vertices: opts.exact_max_vertices,
                deadline,
                dominance: true,
            };
            exact_min_length(instance, &limits)?
        }
    };
    let verdict = validate_walk(instance, &solution.walk)?;
    if solution.report.feasible && !verdict.is_feasible() {
        return Err(Error::Invalid(format!(
            "solver {} reported feasible but validation failed: {verdict:?}",
            algorithm.as_str()
        )));
    }
    Ok(solution)
}

#[derive(Debug, Clone, Deserialize, Default)]
#[serde(deny_unknown_fields)]
pub struct RowSpec {
    #[serde(default)]
    pub file: Option<String>,
    #[serde(default)]
    pub random: Option<RandomSpec>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(default)]
    pub depot_strategy: Option<String>,
    #[serde(default)]
    pub depot_list: Option<Vec<u32>>,
    #[serde(rename = "D", default)]
    pub d: Option<f64>,
    #[serde(rename = "T", default)]
    pub t: Option<f64>,
    #[serde(default)]
    pub weights: Option<WeightMode>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub algorithms: Option<Vec<String>>,
    #[serde(default)]
    pub timeout_ms: Option<u64>,
    #[serde(default)]
    pub b: Option<usize>,
    #[serde(default)]
    pub kmax: Option<usize>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomSpec {
    pub n_tasks: usize,
    pub m_depots: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub d_factor: Option<f64>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Manifest {
    #[serde(default)]
    pub defaults: RowSpec,
    pub rows: Vec<RowSpec>,
}

impl Manifest {
    pub fn from_json(text: &str) -> Result<Manifest> {
        Ok(serde_json::from_str(text)?)
    }

    fn effective_row(&self, row: &RowSpec) -> RowSpec {
        let d = &self.defaults;
        RowSpec {
            file: row.file.clone().or_else(|| d.file.clone()),
            random: row.random.clone().or_else(|| d.random.clone()),
            m: row.m.or(d.m),
            depot_strategy: row.depot_strategy.clone().or_else(|| d.depot_strategy.clone()),
            depot_list: row.depot_list.clone().or_else(|| d.depot_list.clone()),
            d: row.d.or(d.d),
            t: row.t.or(d.t),
            weights: row.weights.or(d.weights),
            seed: row.seed.or(d.seed),
            algorithms: row.algorithms.clone().or_else(|| d.algorithms.clone()),
            timeout_ms: row.timeout_ms.or(d.timeout_ms),
            b: row.b.or(d.b),
            kmax: row.kmax.or(d.kmax),
        }
    }
}

/// One CSV line of the report.
#[derive(Debug, Clone)]
pub struct BenchRow {
    pub instance: String,
    pub n: usize,
    pub m: usize,
    pub d: f64,
    pub weights: WeightMode,
    pub strategy: String,
    pub seed: u64,
    pub algorithm: String,
    pub cost: Option<f64>,
    pub recharges: Option<usize>,
    pub runtime_ms: Option<u64>,
    pub feasible: Option<bool>,
    pub gap_vs_exact: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchReport {
    pub rows: Vec<BenchRow>,
    /// Mean gap per non-exact algorithm over rows where the oracle ran.
    pub mean_gaps: Vec<(String, f64, usize)>,
}

impl BenchReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from(CSV_HEADER);
        out.push('\n');
        let fmt_f = |x: Option<f64>| x.map(|v| format!("{v:.3}")).unwrap_or_default();
        for r in &self.rows {
            let note = if r.note.contains(',') || r.note.contains('"') {
                format!("\"{}\"", r.note.replace('"', "\"\""))
            } else {
                r.note.clone()
            };
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                r.instance,
                r.n,
                r.m,
                r.d,
                match r.weights {
                    WeightMode::Integer => "int",
                    WeightMode::Real => "real",
                },
                r.strategy,
                r.seed,
                r.algorithm,
                fmt_f(r.cost),
                r.recharges.map(|v| v.to_string()).unwrap_or_default(),
                r.runtime_ms.map(|v| v.to_string()).unwrap_or_default(),
                r.feasible.map(|v| v.to_string()).unwrap_or_default(),
                r.gap_vs_exact.map(|v| format!("{v:.4}")).unwrap_or_default(),
                note,
            ));
        }
        for (algo, gap, count) in &self.mean_gaps {
            out.push_str(&format!(
                "MEAN_GAP,,,,,,,{algo},,,,,{gap:.4},mean gap vs exact over {count} rows\n"
            ));
        }
        out
    }
}

fn build_row_instance(row: &RowSpec, base_dir: &Path) -> Result<(Instance, String, u64)> {
    let seed = row.seed.unwrap_or(0);
    if let Some(random) = &row.random {
        let spec = SynthSpec {
            weight_mode: row.weights.unwrap_or(WeightMode::Real),
            d_factor: random.d_factor.unwrap_or(1.5),
            ..SynthSpec::new(random.n_tasks, random.m_depots, random.seed)
        };
        let inst = random_instance(&spec)?;
        let strategy = "first".to_string();
        return Ok((inst, strategy, seed));
    }
    let file = row
        .file
        .as_ref()
        .ok_or_else(|| Error::Invalid("row needs either `file` or `random`".into()))?;
    let path = if Path::new(file).is_absolute() {
        Path::new(file).to_path_buf()
    } else {
        base_dir.join(file)
    };
    let text = std::fs::read_to_string(&path)?;
    let raw = parse_tsplib(&text)?;
    let strategy_name = row.depot_strategy.clone().unwrap_or_else(|| "first".into());
    let selection = match strategy_name.as_str() {
        "explicit" => DepotSelection::Explicit(row.depot_list.clone().ok_or_else(|| {
            Error::Invalid("explicit strategy needs depot_list".into())
        })?),
        "first" => DepotSelection::FirstM(
            row.m
                .ok_or_else(|| Error::Invalid("first strategy needs m".into()))?,
        ),
        "farthest" => DepotSelection::FarthestPoint(
            row.m
                .ok_or_else(|| Error::Invalid("farthest strategy needs m".into()))?,
        ),
        other => return Err(Error::Invalid(format!("unknown depot strategy `{other}`"))),
    };
    let d = row
        .d
        .ok_or_else(|| Error::Invalid("row needs D".into()))?;
    let inst = build_instance(
        &raw,
        &selection,
        d,
        row.t.unwrap_or(0.0),
        row.weights.unwrap_or(WeightMode::Real),
    )?;
    Ok((inst, selection.to_string(), seed))
}

fn run_row(manifest_row: &RowSpec, base_dir: &Path) -> Vec<BenchRow> {
    let algorithms = manifest_row
        .algorithms
        .clone()
        .unwrap_or_else(|| vec!["heuristic".into()]);
    let (instance, strategy, seed) = match build_row_instance(manifest_row, base_dir) {
        Ok(x) => x,
        Err(e) => {
            return algorithms
                .iter()
                .map(|a| BenchRow {
                    instance: manifest_row
                        .file
                        .clone()
                        .unwrap_or_else(|| "random".into()),
                    n: 0,
                    m: 0,
                    d: manifest_row.d.unwrap_or(0.0),
                    weights: manifest_row.weights.unwrap_or(WeightMode::Real),
                    strategy: manifest_row.depot_strategy.clone().unwrap_or_default(),
                    seed: manifest_row.seed.unwrap_or(0),
                    algorithm: a.clone(),
                    cost: None,
                    recharges: None,
                    runtime_ms: None,
                    feasible: None,
                    gap_vs_exact: None,
                    note: format!("error: {e}"),
                })
                .collect()
        }
    };

    let opts = SolveOptions {
        b: manifest_row.b,
        k_max: manifest_row.kmax,
        timeout: manifest_row.timeout_ms.map(Duration::from_millis),
        ..Default::default()
    };

    let mut rows = Vec::new();
    let mut exact_cost: Option<f64> = None;
    let mut results: Vec<(String, Result<Solution>)> = Vec::new();
    for name in &algorithms {
        let parsed = Algorithm::parse(name);
        let outcome = match parsed {
            Ok(algo) => dispatch(&instance, algo, &opts),
            Err(e) => Err(e),
        };
        if name == "exact" {
            if let Ok(sol) = &outcome {
                if sol.report.optimal == Some(true) {
                    exact_cost = Some(sol.report.cost);
                }
            }
        }
        results.push((name.clone(), outcome));
    }
    for (name, outcome) in results {
        let mut row = BenchRow {
            instance: instance.name.clone(),
            n: instance.tasks().len(),
            m: instance.depots().len(),
            d: instance.discharge_time,
            weights: instance.weight_mode,
            strategy: strategy.clone(),
            seed,
            algorithm: name.clone(),
            cost: None,
            recharges: None,
            runtime_ms: None,
            feasible: None,
            gap_vs_exact: None,
            note: String::new(),
        };
        match outcome {
            Ok(sol) => {
                row.cost = Some(sol.report.cost);
                row.recharges = Some(sol.report.recharges);
                row.runtime_ms = Some(sol.report.runtime_ms);
                row.feasible = Some(sol.report.feasible);
                if name != "exact" {
                    if let Some(e) = exact_cost {
                        if e > 0.0 {
                            row.gap_vs_exact = Some((sol.report.cost - e) / e);
                        }
                    }
                }
                if !sol.report.notes.is_empty() {
                    row.note = sol.report.notes.join("; ");
                }
            }
            Err(e) => {
                row.feasible = e.is_infeasible().then_some(false);
                row.note = format!("error: {e}");
            }
        }
        rows.push(row);
    }
    rows
}

/// Execute a manifest with up to `jobs` rows in flight; report rows keep
/// manifest order regardless of completion order.
pub fn run_manifest(manifest: &Manifest, base_dir: &Path, jobs: usize) -> Result<BenchReport> {
    let effective: Vec<RowSpec> = manifest
        .rows
        .iter()
        .map(|r| manifest.effective_row(r))
        .collect();
    let row_results: Vec<Vec<BenchRow>> = if jobs <= 1 {
        effective.iter().map(|r| run_row(r, base_dir)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build()
            .map_err(|e| Error::Invalid(format!("thread pool: {e}")))?;
        pool.install(|| {
            use rayon::prelude::*;
            effective.par_iter().map(|r| run_row(r, base_dir)).collect()
        })
    };
    let rows: Vec<BenchRow> = row_results.into_iter().flatten().collect();

    let mut mean_gaps: Vec<(String, f64, usize)> = Vec::new();
    for algo in ["approx", "heuristic"] {
        let gaps: Vec<f64> = rows
            .iter()
            .filter(|r| r.algorithm == algo)
            .filter_map(|r| r.gap_vs_exact)
            .collect();
        if !gaps.is_empty() {
            let mean = gaps.iter().sum::<f64>() / gaps.len() as f64;
            mean_gaps.push((algo.to_string(), mean, gaps.len()));
        }
    }
    Ok(BenchReport { rows, mean_gaps })
}
