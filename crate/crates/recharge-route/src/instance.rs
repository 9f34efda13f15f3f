//! TSPLIB ingestion and problem-instance construction.
//!
//! A [`RawInstance`] is the parsed file: node coordinates or an explicit
//! weight matrix, plus header metadata. [`build_instance`] turns it into an
//! [`Instance`]: depots selected, weights materialized per
//! [`WeightMode`], metric completion applied, and the recharge time folded
//! into the edge weights so that downstream code can assume instantaneous
//! recharges.

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Internal 0-based node index. External (file-facing) ids are 1-based.
pub type NodeId = usize;

/// How edge weights are materialized and how boundary arithmetic behaves.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum WeightMode {
    /// TSPLIB-style weights rounded to the nearest integer.
    #[serde(alias = "int")]
    Integer,
    /// Exact Euclidean (or as-given) real weights.
    Real,
}

impl WeightMode {
    /// Feasibility slack for accumulated-length comparisons. Integer
    /// arithmetic is exact in f64; real sums get a relative epsilon.
    pub fn tolerance(self, scale: f64) -> f64 {
        match self {
            WeightMode::Integer => 0.0,
            WeightMode::Real => 1e-9 * scale.max(1.0),
        }
    }
}

/// Weight scheme declared by (or chosen for) a raw file.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeWeightKind {
    Euc2dRounded,
    Euc2dExact,
    ExplicitMatrix,
}

/// A parsed TSPLIB file, prior to depot selection and weight
/// materialization.
#[derive(Debug, Clone, PartialEq)]
pub struct RawInstance {
    pub name: String,
    /// `(external id, x, y)` rows, normalized to ids 1..n. Empty only for
    /// explicit-matrix files without a coordinate section.
    pub node_coords: Vec<(u32, f64, f64)>,
    pub declared_dimension: usize,
    pub edge_weight_kind: EdgeWeightKind,
    /// Present iff `edge_weight_kind == ExplicitMatrix`.
    pub explicit_weights: Option<Vec<Vec<f64>>>,
}

/// Parse a TSPLIB95-style document (TSP or CVRP flavor).
///
/// Recognized keywords: NAME, TYPE, COMMENT, DIMENSION, CAPACITY,
/// EDGE_WEIGHT_TYPE (EUC_2D or EXPLICIT), EDGE_WEIGHT_FORMAT (FULL_MATRIX),
/// NODE_COORD_SECTION, EDGE_WEIGHT_SECTION, DEMAND_SECTION and
/// DEPOT_SECTION (both skipped), EOF.
pub fn parse_tsplib(text: &str) -> Result<RawInstance> {
    let mut name = String::new();
    let mut dimension: Option<usize> = None;
    let mut weight_type: Option<String> = None;
    let mut weight_format: Option<String> = None;
    let mut coords: Vec<(u32, f64, f64)> = Vec::new();
    let mut matrix_numbers: Vec<f64> = Vec::new();
    let mut saw_coord_section = false;
    let mut saw_weight_section = false;

    #[derive(PartialEq)]
    enum Section {
        Header,
        Coords,
        Weights,
        Skip,
        Done,
    }
    let mut section = Section::Header;

    for (idx, raw_line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw_line.trim();
        if line.is_empty() {
            continue;
        }
        let upper = line.to_ascii_uppercase();
        // Section keywords may appear after any section body.
        if upper == "EOF" {
            section = Section::Done;
            continue;
        }
        if upper.starts_with("NODE_COORD_SECTION") {
            section = Section::Coords;
            saw_coord_section = true;
            continue;
        }
        if upper.starts_with("EDGE_WEIGHT_SECTION") {
            section = Section::Weights;
            saw_weight_section = true;
            continue;
        }
        if upper.starts_with("DEMAND_SECTION")
            || upper.starts_with("DEPOT_SECTION")
            || upper.starts_with("DISPLAY_DATA_SECTION")
        {
            section = Section::Skip;
            continue;
        }
        match section {
            Section::Header => {
                let (key, value) = match line.split_once(':') {
                    Some((k, v)) => (k.trim().to_ascii_uppercase(), v.trim().to_string()),
                    None => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("expected `KEY : VALUE`, got `{line}`"),
                        })
                    }
                };
                match key.as_str() {
                    "NAME" => name = value,
                    "DIMENSION" => {
                        dimension = Some(value.parse().map_err(|_| Error::Parse {
                            line: lineno,
                            message: format!("DIMENSION is not a positive integer: `{value}`"),
                        })?)
                    }
                    "EDGE_WEIGHT_TYPE" => weight_type = Some(value.to_ascii_uppercase()),
                    "EDGE_WEIGHT_FORMAT" => weight_format = Some(value.to_ascii_uppercase()),
                    "TYPE" | "COMMENT" | "CAPACITY" | "BEST_KNOWN" | "DISPLAY_DATA_TYPE" => {}
                    _ => {
                        return Err(Error::Parse {
                            line: lineno,
                            message: format!("unknown header keyword `{key}`"),
                        })
                    }
                }
            }
            Section::Coords => {
                let mut parts = line.split_whitespace();
                let id: u32 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: format!("bad node id in coordinate row `{line}`"),
                    })?;
                let x: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: format!("bad x coordinate in row `{line}`"),
                    })?;
                let y: f64 = parts
                    .next()
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Parse {
                        line: lineno,
                        message: format!("bad y coordinate in row `{line}`"),
                    })?;
                coords.push((id, x, y));
            }
            Section::Weights => {
                for tok in line.split_whitespace() {
                    matrix_numbers.push(tok.parse().map_err(|_| Error::Parse {
                        line: lineno,
                        message: format!("bad weight `{tok}`"),
                    })?);
                }
            }
            Section::Skip | Section::Done => {}
        }
    }

    let dimension = dimension.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing DIMENSION header".into(),
    })?;
    if dimension == 0 {
        return Err(Error::Invalid("DIMENSION must be positive".into()));
    }
    let weight_type = weight_type.ok_or_else(|| Error::Parse {
        line: 0,
        message: "missing EDGE_WEIGHT_TYPE header".into(),
    })?;
    if !saw_coord_section && !saw_weight_section {
        return Err(Error::Parse {
            line: 0,
            message: "missing NODE_COORD_SECTION or EDGE_WEIGHT_SECTION".into(),
        });
    }

    let edge_weight_kind = match weight_type.as_str() {
        "EUC_2D" => EdgeWeightKind::Euc2dRounded,
        "EXPLICIT" => EdgeWeightKind::ExplicitMatrix,
        other => {
            return Err(Error::Invalid(format!(
                "unsupported EDGE_WEIGHT_TYPE `{other}` (supported: EUC_2D, EXPLICIT)"
            )))
        }
    };

    if edge_weight_kind == EdgeWeightKind::Euc2dRounded && !saw_coord_section {
        return Err(Error::Parse {
            line: 0,
            message: "EUC_2D requires a NODE_COORD_SECTION".into(),
        });
    }

    // Normalize node ids: unique, then renumbered 1..n in ascending order.
    if !coords.is_empty() {
        let mut seen = BTreeSet::new();
        for &(id, _, _) in &coords {
            if !seen.insert(id) {
                return Err(Error::Invalid(format!("duplicate node id {id}")));
            }
        }
        if coords.len() != dimension {
            return Err(Error::Invalid(format!(
                "DIMENSION is {dimension} but {} coordinate rows were given",
                coords.len()
            )));
        }
        coords.sort_by_key(|&(id, _, _)| id);
        for (i, row) in coords.iter_mut().enumerate() {
            row.0 = (i + 1) as u32;
        }
    }

    let explicit_weights = if edge_weight_kind == EdgeWeightKind::ExplicitMatrix {
        let format = weight_format.unwrap_or_else(|| "FULL_MATRIX".into());
        if format != "FULL_MATRIX" {
            return Err(Error::Invalid(format!(
                "unsupported EDGE_WEIGHT_FORMAT `{format}` (supported: FULL_MATRIX)"
            )));
        }
        if matrix_numbers.len() != dimension * dimension {
            return Err(Error::Invalid(format!(
                "EDGE_WEIGHT_SECTION has {} entries, expected {}",
                matrix_numbers.len(),
                dimension * dimension
            )));
        }
        let matrix: Vec<Vec<f64>> = matrix_numbers
            .chunks(dimension)
            .map(|row| row.to_vec())
            .collect();
        for i in 0..dimension {
            if matrix[i][i] != 0.0 {
                return Err(Error::Invalid(format!(
                    "explicit matrix diagonal entry ({i},{i}) is not zero"
                )));
            }
            for j in 0..dimension {
                if (matrix[i][j] - matrix[j][i]).abs() > 1e-12 {
                    return Err(Error::Invalid(format!(
                        "explicit matrix is asymmetric at ({i},{j})"
                    )));
                }
                if matrix[i][j] < 0.0 {
                    return Err(Error::Invalid(format!(
                        "negative weight at ({i},{j})"
                    )));
                }
            }
        }
        Some(matrix)
    } else {
        None
    };

    Ok(RawInstance {
        name,
        node_coords: coords,
        declared_dimension: dimension,
        edge_weight_kind,
        explicit_weights,
    })
}

/// Serialize a [`RawInstance`] back to TSPLIB text. `parse_tsplib` of the
/// output yields a value equal to the input.
pub fn serialize_tsplib(raw: &RawInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!("NAME : {}\n", raw.name));
    out.push_str("TYPE : TSP\n");
    out.push_str(&format!("DIMENSION : {}\n", raw.declared_dimension));
    match raw.edge_weight_kind {
        EdgeWeightKind::Euc2dRounded | EdgeWeightKind::Euc2dExact => {
            out.push_str("EDGE_WEIGHT_TYPE : EUC_2D\n");
        }
        EdgeWeightKind::ExplicitMatrix => {
            out.push_str("EDGE_WEIGHT_TYPE : EXPLICIT\n");
            out.push_str("EDGE_WEIGHT_FORMAT : FULL_MATRIX\n");
        }
    }
    if !raw.node_coords.is_empty() {
        out.push_str("NODE_COORD_SECTION\n");
        for &(id, x, y) in &raw.node_coords {
            out.push_str(&format!("{id} {x} {y}\n"));
        }
    }
    if let Some(matrix) = &raw.explicit_weights {
        out.push_str("EDGE_WEIGHT_SECTION\n");
        for row in matrix {
            let cells: Vec<String> = row.iter().map(|w| format!("{w}")).collect();
            out.push_str(&cells.join(" "));
            out.push('\n');
        }
    }
    out.push_str("EOF\n");
    out
}

/// Strategy for picking the depot set out of a raw instance's nodes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum DepotSelection {
    /// Explicit external (1-based) node ids.
    Explicit(Vec<u32>),
    /// The `m` lowest node ids.
    FirstM(usize),
    /// Greedy max-min spread: seed with node 1, then repeatedly add the
    /// node farthest from the chosen set.
    FarthestPoint(usize),
}

impl fmt::Display for DepotSelection {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DepotSelection::Explicit(ids) => {
                let s: Vec<String> = ids.iter().map(|i| i.to_string()).collect();
                write!(f, "explicit:{}", s.join(","))
            }
            DepotSelection::FirstM(m) => write!(f, "first:{m}"),
            DepotSelection::FarthestPoint(m) => write!(f, "farthest:{m}"),
        }
    }
}

impl DepotSelection {
    /// Parse `first:m`, `farthest:m` or `explicit:id,id,...`.
    pub fn parse(s: &str) -> Result<Self> {
        let (kind, arg) = s
            .split_once(':')
            .ok_or_else(|| Error::Invalid(format!("bad depot selection `{s}`")))?;
        match kind {
            "first" => Ok(DepotSelection::FirstM(arg.parse().map_err(|_| {
                Error::Invalid(format!("bad depot count `{arg}`"))
            })?)),
            "farthest" => Ok(DepotSelection::FarthestPoint(arg.parse().map_err(
                |_| Error::Invalid(format!("bad depot count `{arg}`")),
            )?)),
            "explicit" => {
                let ids: Result<Vec<u32>> = arg
                    .split(',')
                    .map(|t| {
                        t.trim()
                            .parse()
                            .map_err(|_| Error::Invalid(format!("bad depot id `{t}`")))
                    })
                    .collect();
                Ok(DepotSelection::Explicit(ids?))
            }
            other => Err(Error::Invalid(format!(
                "unknown depot strategy `{other}` (expected first, farthest or explicit)"
            ))),
        }
    }

    /// Resolve to a sorted set of 0-based node indices, given the
    /// (metric-completed) distance matrix.
    fn resolve(&self, n: usize, dist: &[f64]) -> Result<Vec<NodeId>> {
        let m = match self {
            DepotSelection::Explicit(ids) => ids.len(),
            DepotSelection::FirstM(m) | DepotSelection::FarthestPoint(m) => *m,
        };
        if m == 0 {
            return Err(Error::Invalid("at least one depot is required".into()));
        }
        if m > n {
            return Err(Error::Invalid(format!(
                "{m} depots requested but the instance has only {n} nodes"
            )));
        }
        match self {
            DepotSelection::Explicit(ids) => {
                let mut out = BTreeSet::new();
                for &id in ids {
                    if id == 0 || id as usize > n {
                        return Err(Error::UnknownNode(id as usize));
                    }
                    if !out.insert(id as usize - 1) {
                        return Err(Error::Invalid(format!("duplicate depot id {id}")));
                    }
                }
                Ok(out.into_iter().collect())
            }
            DepotSelection::FirstM(m) => Ok((0..*m).collect()),
            DepotSelection::FarthestPoint(m) => {
                let mut chosen = vec![0usize];
                while chosen.len() < *m {
                    let mut best = None;
                    for v in 0..n {
                        if chosen.contains(&v) {
                            continue;
                        }
                        let d = chosen
                            .iter()
                            .map(|&c| dist[v * n + c])
                            .fold(f64::INFINITY, f64::min);
                        let better = match best {
                            None => true,
                            Some((bd, bv)) => d > bd || (d == bd && v < bv),
                        };
                        if better {
                            best = Some((d, v));
                        }
                    }
                    chosen.push(best.expect("m <= n guarantees a candidate").1);
                }
                chosen.sort_unstable();
                Ok(chosen)
            }
        }
    }
}

/// A fully-built problem instance: metric-complete distances, depots
/// selected, recharge time folded into the weights.
///
/// Immutable after construction; cheap to share across threads.
#[derive(Debug, Clone)]
pub struct Instance {
    pub name: String,
    n_total: usize,
    dist: Vec<f64>,
    depots: Vec<NodeId>,
    tasks: Vec<NodeId>,
    is_depot: Vec<bool>,
    coords: Option<Vec<(f64, f64)>>,
    /// Discharge budget after the recharge-time transformation.
    pub discharge_time: f64,
    /// Always zero after construction; kept for cost replay against the
    /// untransformed accounting.
    pub recharge_time: f64,
    pub weight_mode: WeightMode,
}

impl Instance {
    pub fn n_total(&self) -> usize {
        self.n_total
    }

    /// Task vertices (0-based), ascending.
    pub fn tasks(&self) -> &[NodeId] {
        &self.tasks
    }

    /// Depot vertices (0-based), ascending.
    pub fn depots(&self) -> &[NodeId] {
        &self.depots
    }

    pub fn is_depot(&self, v: NodeId) -> bool {
        self.is_depot[v]
    }

    #[inline]
    pub fn dist(&self, a: NodeId, b: NodeId) -> f64 {
        self.dist[a * self.n_total + b]
    }

    pub fn coords(&self) -> Option<&[(f64, f64)]> {
        self.coords.as_deref()
    }

    /// External (1-based) id of a node, as used in files and JSON output.
    pub fn external_id(&self, v: NodeId) -> usize {
        v + 1
    }

    pub fn from_external_id(&self, id: usize) -> Result<NodeId> {
        if id == 0 || id > self.n_total {
            return Err(Error::UnknownNode(id));
        }
        Ok(id - 1)
    }

    /// Nearest depot to `v` over the whole depot set; ties broken by the
    /// lowest depot id.
    pub fn nearest_depot(&self, v: NodeId) -> Result<(NodeId, f64)> {
        self.nearest_depot_among(v, &self.depots)
    }

    /// Nearest depot to `v` among `depots`; ties broken by lowest id.
    pub fn nearest_depot_among(&self, v: NodeId, depots: &[NodeId]) -> Result<(NodeId, f64)> {
        if depots.is_empty() {
            return Err(Error::Invalid("empty depot set".into()));
        }
        let mut best = (depots[0], self.dist(depots[0], v));
        for &q in &depots[1..] {
            let d = self.dist(q, v);
            if d < best.1 || (d == best.1 && q < best.0) {
                best = (q, d);
            }
        }
        Ok(best)
    }

    /// Comparison slack appropriate for this instance's weight mode.
    pub fn tolerance(&self) -> f64 {
        self.weight_mode.tolerance(self.discharge_time)
    }
}

fn euclid(a: (f64, f64), b: (f64, f64)) -> f64 {
    let dx = a.0 - b.0;
    let dy = a.1 - b.1;
    (dx * dx + dy * dy).sqrt()
}

/// TSPLIB nearest-integer rounding.
fn nint(x: f64) -> f64 {
    (x + 0.5).floor()
}

fn floyd_warshall(dist: &mut [f64], n: usize) {
    for k in 0..n {
        for i in 0..n {
            let dik = dist[i * n + k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let via = dik + dist[k * n + j];
                if via < dist[i * n + j] {
                    dist[i * n + j] = via;
                }
            }
        }
    }
}

/// Build a solver-ready [`Instance`] from parsed input.
///
/// Weights are materialized per `weight_mode`, made metric by all-pairs
/// shortest paths, and every edge incident to a depot then gains `t / 2`
/// while the discharge budget becomes `d + t`, making the recharge time
/// zero in the built instance.
pub fn build_instance(
    raw: &RawInstance,
    selection: &DepotSelection,
    d: f64,
    t: f64,
    weight_mode: WeightMode,
) -> Result<Instance> {
    if !(d > 0.0) {
        return Err(Error::Invalid(format!("discharge time must be positive, got {d}")));
    }
    if t < 0.0 {
        return Err(Error::Invalid(format!("recharge time must be nonnegative, got {t}")));
    }
    if t >= d {
        return Err(Error::Invalid(format!(
            "recharge time {t} must be smaller than the discharge time {d}"
        )));
    }
    let n = raw.declared_dimension;

    let mut dist = vec![0.0f64; n * n];
    match raw.edge_weight_kind {
        EdgeWeightKind::Euc2dRounded | EdgeWeightKind::Euc2dExact => {
            if raw.node_coords.len() != n {
                return Err(Error::Invalid(
                    "euclidean instance without a full coordinate list".into(),
                ));
            }
            for i in 0..n {
                for j in (i + 1)..n {
                    let a = (raw.node_coords[i].1, raw.node_coords[i].2);
                    let b = (raw.node_coords[j].1, raw.node_coords[j].2);
                    let w = match weight_mode {
                        WeightMode::Integer => nint(euclid(a, b)),
                        WeightMode::Real => euclid(a, b),
                    };
                    dist[i * n + j] = w;
                    dist[j * n + i] = w;
                }
            }
        }
        EdgeWeightKind::ExplicitMatrix => {
            let matrix = raw
                .explicit_weights
                .as_ref()
                .ok_or_else(|| Error::Invalid("explicit instance without a matrix".into()))?;
            for i in 0..n {
                for j in 0..n {
                    let w = matrix[i][j];
                    if weight_mode == WeightMode::Integer && w.fract() != 0.0 {
                        return Err(Error::Invalid(format!(
                            "integer weight mode requested but matrix entry ({i},{j}) = {w} is fractional"
                        )));
                    }
                    dist[i * n + j] = w;
                }
            }
        }
    }

    floyd_warshall(&mut dist, n);

    let depots = selection.resolve(n, &dist)?;
    let mut is_depot = vec![false; n];
    for &q in &depots {
        is_depot[q] = true;
    }
    let tasks: Vec<NodeId> = (0..n).filter(|&v| !is_depot[v]).collect();

    // Fold the recharge time into the weights: each endpoint that is a
    // depot contributes t/2, and the budget grows by t.
    if t > 0.0 {
        for i in 0..n {
            for j in 0..n {
                if i == j {
                    continue;
                }
                let mut w = dist[i * n + j];
                if is_depot[i] {
                    w += t / 2.0;
                }
                if is_depot[j] {
                    w += t / 2.0;
                }
                dist[i * n + j] = w;
            }
        }
    }

    let coords = if raw.node_coords.len() == n {
        Some(raw.node_coords.iter().map(|&(_, x, y)| (x, y)).collect())
    } else {
        None
    };

    Ok(Instance {
        name: raw.name.clone(),
        n_total: n,
        dist,
        depots,
        tasks,
        is_depot,
        coords,
        discharge_time: d + t,
        recharge_time: 0.0,
        weight_mode,
    })
}

/// Build an instance directly from coordinates (used by the random
/// generator and tests).
pub fn build_from_points(
    name: &str,
    points: &[(f64, f64)],
    selection: &DepotSelection,
    d: f64,
    t: f64,
    weight_mode: WeightMode,
) -> Result<Instance> {
    let raw = RawInstance {
        name: name.to_string(),
        node_coords: points
            .iter()
            .enumerate()
            .map(|(i, &(x, y))| ((i + 1) as u32, x, y))
            .collect(),
        declared_dimension: points.len(),
        edge_weight_kind: match weight_mode {
            WeightMode::Integer => EdgeWeightKind::Euc2dRounded,
            WeightMode::Real => EdgeWeightKind::Euc2dExact,
        },
        explicit_weights: None,
    };
    build_instance(&raw, selection, d, t, weight_mode)
}

/// Instance-synthesis configuration, accepted as JSON or `key=value`
/// lines: `{source_file, depot_strategy, depot_list?, m?, D, T,
/// weight_mode, seed}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SynthesisConfig {
    pub source_file: String,
    #[serde(default = "default_strategy")]
    pub depot_strategy: String,
    #[serde(default)]
    pub depot_list: Option<Vec<u32>>,
    #[serde(default)]
    pub m: Option<usize>,
    #[serde(rename = "D")]
    pub d: f64,
    #[serde(rename = "T", default)]
    pub t: f64,
    #[serde(default = "default_weight_mode")]
    pub weight_mode: WeightMode,
    #[serde(default)]
    pub seed: u64,
}

fn default_strategy() -> String {
    "first".into()
}

fn default_weight_mode() -> WeightMode {
    WeightMode::Real
}

impl SynthesisConfig {
    /// Parse from JSON, falling back to `key=value` lines.
    pub fn from_str_any(text: &str) -> Result<Self> {
        if text.trim_start().starts_with('{') {
            return Ok(serde_json::from_str(text)?);
        }
        let mut source_file = None;
        let mut depot_strategy = default_strategy();
        let mut depot_list = None;
        let mut m = None;
        let mut d = None;
        let mut t = 0.0;
        let mut weight_mode = WeightMode::Real;
        let mut seed = 0u64;
        for (idx, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Parse {
                line: idx + 1,
                message: format!("expected `key=value`, got `{line}`"),
            })?;
            let (k, v) = (k.trim(), v.trim());
            let bad = |what: &str| Error::Parse {
                line: idx + 1,
                message: format!("bad {what}: `{v}`"),
            };
            match k {
                "source_file" => source_file = Some(v.to_string()),
                "depot_strategy" => depot_strategy = v.to_string(),
                "depot_list" => {
                    let ids: std::result::Result<Vec<u32>, _> =
                        v.split(',').map(|s| s.trim().parse()).collect();
                    depot_list = Some(ids.map_err(|_| bad("depot_list"))?);
                }
                "m" => m = Some(v.parse().map_err(|_| bad("m"))?),
                "D" => d = Some(v.parse().map_err(|_| bad("D"))?),
                "T" => t = v.parse().map_err(|_| bad("T"))?,
                "weight_mode" => {
                    weight_mode = match v {
                        "int" | "integer" => WeightMode::Integer,
                        "real" => WeightMode::Real,
                        _ => return Err(bad("weight_mode")),
                    }
                }
                "seed" => seed = v.parse().map_err(|_| bad("seed"))?,
                _ => {
                    return Err(Error::Parse {
                        line: idx + 1,
                        message: format!("unknown key `{k}`"),
                    })
                }
            }
        }
        Ok(SynthesisConfig {
            source_file: source_file
                .ok_or_else(|| Error::Invalid("missing source_file".into()))?,
            depot_strategy,
            depot_list,
            m,
            d: d.ok_or_else(|| Error::Invalid("missing D".into()))?,
            t,
            weight_mode,
            seed,
        })
    }

    pub fn depot_selection(&self) -> Result<DepotSelection> {
        match self.depot_strategy.as_str() {
            "explicit" => Ok(DepotSelection::Explicit(
                self.depot_list
                    .clone()
                    .ok_or_else(|| Error::Invalid("explicit strategy needs depot_list".into()))?,
            )),
            "first" => Ok(DepotSelection::FirstM(self.m.ok_or_else(|| {
                Error::Invalid("first strategy needs m".into())
            })?)),
            "farthest" => Ok(DepotSelection::FarthestPoint(self.m.ok_or_else(|| {
                Error::Invalid("farthest strategy needs m".into())
            })?)),
            other => Err(Error::Invalid(format!("unknown depot strategy `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TINY: &str = "NAME : tiny\nTYPE : TSP\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 3 0\n3 3 4\nEOF\n";

    #[test]
    fn parses_minimal_file() {
        let raw = parse_tsplib(TINY).unwrap();
        assert_eq!(raw.name, "tiny");
        assert_eq!(raw.declared_dimension, 3);
        assert_eq!(raw.node_coords.len(), 3);
        assert_eq!(raw.edge_weight_kind, EdgeWeightKind::Euc2dRounded);
    }

    #[test]
    fn parses_single_node_file() {
        let text = "NAME : one\nDIMENSION : 1\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0.0 0.0\nEOF\n";
        let raw = parse_tsplib(text).unwrap();
        assert_eq!(raw.declared_dimension, 1);
        assert_eq!(raw.node_coords, vec![(1, 0.0, 0.0)]);
    }

    #[test]
    fn dimension_mismatch_is_rejected() {
        let text = "NAME : bad\nDIMENSION : 5\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n2 1 0\n3 2 0\n4 3 0\nEOF\n";
        let err = parse_tsplib(text).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)), "got {err:?}");
    }

    #[test]
    fn duplicate_id_is_rejected() {
        let text = "NAME : dup\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\n1 1 0\nEOF\n";
        let err = parse_tsplib(text).unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
    }

    #[test]
    fn malformed_header_names_line() {
        let text = "NAME : x\nGIBBERISH LINE\nDIMENSION : 1\nEDGE_WEIGHT_TYPE : EUC_2D\nNODE_COORD_SECTION\n1 0 0\nEOF\n";
        match parse_tsplib(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("expected parse error, got {other:?}"),
        }
    }

    #[test]
    fn serialize_parse_is_fixed_point() {
        let raw = parse_tsplib(TINY).unwrap();
        let round = parse_tsplib(&serialize_tsplib(&raw)).unwrap();
        assert_eq!(raw, round);
    }

    #[test]
    fn explicit_matrix_roundtrip_and_checks() {
        let text = "NAME : ex\nDIMENSION : 3\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_FORMAT : FULL_MATRIX\nEDGE_WEIGHT_SECTION\n0 2 3\n2 0 4\n3 4 0\nEOF\n";
        let raw = parse_tsplib(text).unwrap();
        assert_eq!(raw.edge_weight_kind, EdgeWeightKind::ExplicitMatrix);
        let round = parse_tsplib(&serialize_tsplib(&raw)).unwrap();
        assert_eq!(raw, round);

        let asym = "NAME : ex\nDIMENSION : 2\nEDGE_WEIGHT_TYPE : EXPLICIT\nEDGE_WEIGHT_SECTION\n0 2\n3 0\nEOF\n";
        assert!(parse_tsplib(asym).is_err());
    }

    #[test]
    fn builds_instance_with_metric_completion() {
        // Rounded weights can violate the triangle inequality by 1; the
        // completed matrix must not.
        let raw = parse_tsplib(TINY).unwrap();
        let inst = build_instance(&raw, &DepotSelection::FirstM(1), 10.0, 0.0, WeightMode::Integer)
            .unwrap();
        let n = inst.n_total();
        for i in 0..n {
            assert_eq!(inst.dist(i, i), 0.0);
            for j in 0..n {
                for k in 0..n {
                    assert!(inst.dist(i, k) <= inst.dist(i, j) + inst.dist(j, k));
                }
            }
        }
        assert_eq!(inst.depots(), &[0]);
        assert_eq!(inst.tasks(), &[1, 2]);
    }

    #[test]
    fn zero_recharge_time_is_identity() {
        let raw = parse_tsplib(TINY).unwrap();
        let a = build_instance(&raw, &DepotSelection::FirstM(1), 10.0, 0.0, WeightMode::Real)
            .unwrap();
        assert_eq!(a.discharge_time, 10.0);
        assert_eq!(a.dist(0, 1), 3.0);
    }

    #[test]
    fn recharge_time_shifts_depot_edges_and_budget() {
        // Three collinear nodes at x = 0, 1, 2 with the depot at x = 1:
        // both unit edges touch the depot and gain t/2 = 2.
        let pts = [(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)];
        let inst = build_from_points(
            "line",
            &pts,
            &DepotSelection::Explicit(vec![2]),
            10.0,
            4.0,
            WeightMode::Real,
        )
        .unwrap();
        assert_eq!(inst.discharge_time, 14.0);
        assert_eq!(inst.recharge_time, 0.0);
        assert_eq!(inst.dist(0, 1), 3.0);
        assert_eq!(inst.dist(1, 2), 3.0);
        assert_eq!(inst.dist(0, 2), 2.0);
    }

    #[test]
    fn depot_selection_first_and_explicit() {
        let pts: Vec<(f64, f64)> = (0..5).map(|i| (i as f64, 0.0)).collect();
        let inst =
            build_from_points("s", &pts, &DepotSelection::FirstM(2), 10.0, 0.0, WeightMode::Real)
                .unwrap();
        assert_eq!(inst.depots(), &[0, 1]);

        let pts: Vec<(f64, f64)> = (0..10).map(|i| (i as f64, 0.0)).collect();
        let inst = build_from_points(
            "s",
            &pts,
            &DepotSelection::Explicit(vec![3, 7]),
            10.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        assert_eq!(inst.depots(), &[2, 6]);
    }

    #[test]
    fn farthest_point_matches_bruteforce_maxmin_pair() {
        // Independent check: enumerate all candidate pairs and keep the one
        // with the largest pairwise distance.
        let pts = [(0.0, 0.0), (10.0, 0.0), (5.0, 1.0)];
        let mut best = (0, 1, 0.0f64);
        for i in 0..pts.len() {
            for j in (i + 1)..pts.len() {
                let d = euclid(pts[i], pts[j]);
                if d > best.2 {
                    best = (i, j, d);
                }
            }
        }
        assert_eq!((best.0, best.1), (0, 1));

        let inst = build_from_points(
            "fp",
            &pts,
            &DepotSelection::FarthestPoint(2),
            30.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        assert_eq!(inst.depots(), &[0, 1]);
    }

    #[test]
    fn selection_errors() {
        let pts = [(0.0, 0.0), (1.0, 0.0)];
        let err = build_from_points("e", &pts, &DepotSelection::FirstM(3), 5.0, 0.0, WeightMode::Real)
            .unwrap_err();
        assert!(matches!(err, Error::Invalid(_)));
        let err = build_from_points(
            "e",
            &pts,
            &DepotSelection::Explicit(vec![9]),
            5.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap_err();
        assert!(matches!(err, Error::UnknownNode(9)));
    }

    #[test]
    fn nearest_depot_prefers_closer_then_lower_id() {
        // v at (5,0) with depots at (0,0) and (8,0): the right depot wins
        // at distance 3 (checked by hand against both candidates).
        let pts = [(0.0, 0.0), (8.0, 0.0), (5.0, 0.0)];
        let inst = build_from_points(
            "nd",
            &pts,
            &DepotSelection::Explicit(vec![1, 2]),
            20.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        let (q, d) = inst.nearest_depot(2).unwrap();
        assert_eq!(q, 1);
        assert_eq!(d, 3.0);

        // Coincident vertex: distance zero.
        let pts = [(0.0, 0.0), (8.0, 0.0), (0.0, 0.0)];
        let inst = build_from_points(
            "nd0",
            &pts,
            &DepotSelection::Explicit(vec![1, 2]),
            20.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        let (q, d) = inst.nearest_depot(2).unwrap();
        assert_eq!((q, d), (0, 0.0));
    }

    #[test]
    fn synthesis_config_json_and_kv() {
        let json = r#"{"source_file":"a.vrp","depot_strategy":"first","m":5,"D":200.0,"T":0.0,"weight_mode":"real","seed":3}"#;
        let c = SynthesisConfig::from_str_any(json).unwrap();
        assert_eq!(c.m, Some(5));
        assert_eq!(c.d, 200.0);
        assert!(matches!(c.depot_selection().unwrap(), DepotSelection::FirstM(5)));

        let kv = "source_file=a.vrp\ndepot_strategy=explicit\ndepot_list=3,7\nD=50\nweight_mode=int\n";
        let c = SynthesisConfig::from_str_any(kv).unwrap();
        assert_eq!(c.weight_mode, WeightMode::Integer);
        assert!(matches!(
            c.depot_selection().unwrap(),
            DepotSelection::Explicit(ref v) if v == &vec![3, 7]
        ));
    }
}
