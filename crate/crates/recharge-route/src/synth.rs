//! Seeded random instance generation for benchmarks and property tests.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::instance::{build_from_points, DepotSelection, Instance, WeightMode};

#[derive(Debug, Clone)]
pub struct SynthSpec {
    pub n_tasks: usize,
    pub m_depots: usize,
    pub seed: u64,
    pub weight_mode: WeightMode,
    /// Budget as a multiple of twice the largest nearest-depot distance;
    /// values above 1 guarantee a coverable instance.
    pub d_factor: f64,
    pub area: f64,
}

impl SynthSpec {
    pub fn new(n_tasks: usize, m_depots: usize, seed: u64) -> Self {
        SynthSpec {
            n_tasks,
            m_depots,
            seed,
            weight_mode: WeightMode::Real,
            d_factor: 1.5,
            area: 100.0,
        }
    }
}

/// Uniform points in a square; the first `m_depots` points become depots
/// and the budget is derived from the generated geometry so the instance
/// is coverable by construction.
pub fn random_instance(spec: &SynthSpec) -> Result<Instance> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let total = spec.n_tasks + spec.m_depots;
    let mut points: Vec<(f64, f64)> = Vec::with_capacity(total);
    for _ in 0..total {
        let (x, y) = (
            rng.gen_range(0.0..spec.area),
            rng.gen_range(0.0..spec.area),
        );
        match spec.weight_mode {
            WeightMode::Integer => points.push((x.round(), y.round())),
            WeightMode::Real => points.push((x, y)),
        }
    }
    let selection = DepotSelection::FirstM(spec.m_depots);
    let name = format!("rand-n{}-m{}-s{}", spec.n_tasks, spec.m_depots, spec.seed);

    // Probe build to measure the farthest nearest-depot distance, then
    // rebuild with the real budget.
    let probe = build_from_points(&name, &points, &selection, 1.0, 0.0, spec.weight_mode)?;
    let mut delta = 0.0f64;
    for &v in probe.tasks() {
        let (_, d) = probe.nearest_depot(v)?;
        delta = delta.max(d);
    }
    let mut budget = (2.0 * delta * spec.d_factor).max(1.0);
    if spec.weight_mode == WeightMode::Integer {
        budget = budget.ceil();
    }
    build_from_points(&name, &points, &selection, budget, 0.0, spec.weight_mode)
}

/// A corridor layout: depots chained along a line at slightly less than
/// the budget apart, with task clusters around a few well-separated
/// depots. Produces instances whose segments group into several neighbor
/// sets that are multiple recharge hops apart.
pub fn corridor_instance(
    n_tasks: usize,
    m_depots: usize,
    seed: u64,
    weight_mode: WeightMode,
) -> Result<Instance> {
    assert!(m_depots >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9E3779B97F4A7C15));
    let budget = 20.0f64;
    let mut depots: Vec<(f64, f64)> = Vec::with_capacity(m_depots);
    let mut x = 0.0;
    for _ in 0..m_depots {
        depots.push((x, rng.gen_range(-2.0..2.0)));
        x += budget * rng.gen_range(0.75..0.95);
    }
    // Clusters around the first, last and (when long enough) middle depot.
    let mut anchors = vec![0usize, m_depots - 1];
    if m_depots >= 7 {
        anchors.push(m_depots / 2);
    }
    let mut tasks: Vec<(f64, f64)> = Vec::with_capacity(n_tasks);
    for i in 0..n_tasks {
        let (cx, cy) = depots[anchors[i % anchors.len()]];
        let r = rng.gen_range(0.0..0.4 * budget);
        let theta = rng.gen_range(0.0..std::f64::consts::TAU);
        tasks.push((cx + r * theta.cos(), cy + r * theta.sin()));
    }
    let mut points = depots;
    points.extend(tasks);
    if weight_mode == WeightMode::Integer {
        for p in &mut points {
            p.0 = p.0.round();
            p.1 = p.1.round();
        }
    }
    let name = format!("corridor-n{n_tasks}-m{m_depots}-s{seed}");
    build_from_points(
        &name,
        &points,
        &DepotSelection::FirstM(m_depots),
        budget,
        0.0,
        weight_mode,
    )
}
