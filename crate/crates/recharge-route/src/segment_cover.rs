//! Segment covers: partition the task vertices by nearest-depot distance,
//! cover each class with length-bounded paths, and anchor path endpoints
//! to their nearest depots. Every resulting segment is a depot-anchored
//! path or cycle no longer than the discharge budget, and their union
//! covers the whole task set.

use serde::Serialize;
use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::graph::{kruskal, Edge};
use crate::instance::{Instance, NodeId, WeightMode};

/// Geometric partition of the task vertices of one depot component by
/// nearest-depot distance.
#[derive(Debug, Clone)]
pub struct PartitionScheme {
    /// Largest nearest-depot distance over the partitioned vertices.
    pub max_depot_distance: f64,
    /// Slack driving the geometric class widths.
    pub slack: f64,
    /// Highest class index; classes are `0..=levels`.
    pub levels: usize,
    /// Class vertex sets, ascending node ids within each class.
    pub classes: Vec<Vec<NodeId>>,
    /// Real-weight vertices lying exactly at half the budget; they are
    /// covered by dedicated out-and-back segments instead of classes.
    pub boundary: Vec<NodeId>,
}

impl PartitionScheme {
    /// Path-length bound used when covering class `j`.
    pub fn class_bound(&self, j: usize, instance: &Instance) -> f64 {
        let base = 2f64.powi(j as i32) * self.slack;
        let raw = match instance.weight_mode {
            WeightMode::Integer => base - 1.0,
            WeightMode::Real => base,
        };
        if j == 0 {
            // Anchoring adds up to twice the farthest-vertex distance; cap
            // the path budget so the total can never exceed the discharge
            // budget even when the slack was clamped.
            let cap = (instance.discharge_time - 2.0 * self.max_depot_distance).max(0.0);
            raw.min(cap).max(0.0)
        } else {
            raw.max(0.0)
        }
    }
}

/// Class index for a nearest-depot distance `d`. Class 0 spans
/// `(d_half - slack, max_depot_distance]`; class `j >= 1` spans
/// `(d_half - 2^j slack, d_half - 2^(j-1) slack]`. The last class absorbs
/// everything below its upper bound so that the classes always tile the
/// whole distance range.
pub fn classify_distance(
    d: f64,
    d_half: f64,
    max_depot_distance: f64,
    slack: f64,
    levels: usize,
) -> usize {
    for j in 0..levels {
        let (lower, upper) = if j == 0 {
            (d_half - slack, max_depot_distance)
        } else {
            (
                d_half - 2f64.powi(j as i32) * slack,
                d_half - 2f64.powi(j as i32 - 1) * slack,
            )
        };
        if lower < d && d <= upper {
            return j;
        }
    }
    levels
}

/// Partition the task vertices of one component. Fails when some vertex
/// is farther than half the budget from every depot of the component.
pub fn compute_partition(instance: &Instance, component: &[NodeId]) -> Result<PartitionScheme> {
    let d_half = instance.discharge_time / 2.0;
    let tol = instance.tolerance();

    let mut boundary = Vec::new();
    let mut partitioned: Vec<(NodeId, f64)> = Vec::new();
    for &v in instance.tasks() {
        let (_, d) = instance.nearest_depot_among(v, component)?;
        if d > d_half + tol {
            return Err(Error::Infeasible {
                vertex: Some(v),
                detail: format!(
                    "vertex at distance {d} from the component's depots exceeds half the budget {d_half}"
                ),
            });
        }
        if instance.weight_mode == WeightMode::Real && d == d_half {
            boundary.push(v);
        } else {
            partitioned.push((v, d));
        }
    }

    let max_depot_distance = partitioned.iter().map(|&(_, d)| d).fold(0.0, f64::max);
    let slack = match instance.weight_mode {
        WeightMode::Integer => d_half - max_depot_distance + 1.0,
        WeightMode::Real => {
            let raw = d_half - max_depot_distance;
            let floor = 1e-6 * instance.discharge_time;
            raw.max(floor)
        }
    };
    let ratio = instance.discharge_time / (2.0 * slack);
    let levels = if ratio > 1.0 {
        (ratio.log2().ceil() as i64).clamp(0, 64) as usize
    } else {
        0
    };

    let mut classes = vec![Vec::new(); levels + 1];
    for &(v, d) in &partitioned {
        classes[classify_distance(d, d_half, max_depot_distance, slack, levels)].push(v);
    }

    Ok(PartitionScheme {
        max_depot_distance,
        slack,
        levels,
        classes,
        boundary,
    })
}

/// Cover `vertices` with paths of length at most `bound` using the
/// tree-splitting scheme: build a minimum spanning forest over the edges
/// not exceeding the bound, walk each tree depth-first from its smallest
/// vertex, and greedily chop the visiting sequence into maximal prefixes
/// within the bound. Isolated vertices become singleton paths.
pub fn unrooted_path_cover(
    instance: &Instance,
    vertices: &[NodeId],
    bound: f64,
) -> Vec<Vec<NodeId>> {
    let n = vertices.len();
    if n == 0 {
        return Vec::new();
    }
    let tol = instance.tolerance();
    let limit = bound + tol;
    let forest: Vec<Edge> = kruskal(
        n,
        |a, b| instance.dist(vertices[a], vertices[b]),
        |w| w <= limit,
    );

    let mut adj = vec![Vec::new(); n];
    for e in &forest {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    let mut visited = vec![false; n];
    let mut paths = Vec::new();
    for start in 0..n {
        if visited[start] {
            continue;
        }
        // Iterative DFS preorder; children pushed in reverse so that the
        // smallest index is expanded first.
        let mut order = Vec::new();
        let mut stack = vec![start];
        visited[start] = true;
        while let Some(u) = stack.pop() {
            order.push(u);
            for &v in adj[u].iter().rev() {
                if !visited[v] {
                    visited[v] = true;
                    stack.push(v);
                }
            }
        }
        // Greedy left-to-right chop of the visiting sequence.
        let mut current = vec![vertices[order[0]]];
        let mut len = 0.0f64;
        for window in order.windows(2) {
            let leg = instance.dist(vertices[window[0]], vertices[window[1]]);
            if len + leg <= limit {
                len += leg;
                current.push(vertices[window[1]]);
            } else {
                paths.push(std::mem::take(&mut current));
                current.push(vertices[window[1]]);
                len = 0.0;
            }
        }
        paths.push(current);
    }
    paths
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SegmentKind {
    Path,
    Cycle,
}

/// A depot-anchored path or cycle of length within the discharge budget.
///
/// For a path, `nodes` runs anchor-to-anchor (both endpoints depots). For
/// a cycle, `nodes[0]` is the depot and the closing leg back to it is
/// implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct Segment {
    pub kind: SegmentKind,
    pub nodes: Vec<NodeId>,
    pub length: f64,
    /// Partition class the segment was generated from, when applicable.
    pub class_index: Option<usize>,
}

impl Segment {
    pub fn path(instance: &Instance, nodes: Vec<NodeId>, class_index: Option<usize>) -> Segment {
        debug_assert!(nodes.len() >= 2);
        let length = nodes.windows(2).map(|w| instance.dist(w[0], w[1])).sum();
        Segment {
            kind: SegmentKind::Path,
            nodes,
            length,
            class_index,
        }
    }

    pub fn cycle(instance: &Instance, nodes: Vec<NodeId>, class_index: Option<usize>) -> Segment {
        debug_assert!(!nodes.is_empty());
        let mut length: f64 = nodes.windows(2).map(|w| instance.dist(w[0], w[1])).sum();
        if nodes.len() > 1 {
            length += instance.dist(nodes[nodes.len() - 1], nodes[0]);
        }
        Segment {
            kind: SegmentKind::Cycle,
            nodes,
            length,
            class_index,
        }
    }

    /// Anchor depots: a path's two endpoints, or a cycle's depot twice.
    pub fn anchors(&self) -> (NodeId, NodeId) {
        match self.kind {
            SegmentKind::Path => (self.nodes[0], self.nodes[self.nodes.len() - 1]),
            SegmentKind::Cycle => (self.nodes[0], self.nodes[0]),
        }
    }

    pub fn anchor_list(&self) -> Vec<NodeId> {
        let (a, b) = self.anchors();
        if a == b {
            vec![a]
        } else {
            vec![a, b]
        }
    }

    /// Node sequence of a full traversal, starting and ending at anchors.
    pub fn traversal(&self) -> Vec<NodeId> {
        match self.kind {
            SegmentKind::Path => self.nodes.clone(),
            SegmentKind::Cycle => {
                let mut t = self.nodes.clone();
                if self.nodes.len() > 1 {
                    t.push(self.nodes[0]);
                }
                t
            }
        }
    }

    /// Check the three feasibility conditions: length within the budget,
    /// cycles contain a depot, paths end at depots. Also recomputes the
    /// stored length.
    pub fn check_feasible(&self, instance: &Instance) -> std::result::Result<(), String> {
        let recomputed = match self.kind {
            SegmentKind::Path => Segment::path(instance, self.nodes.clone(), None).length,
            SegmentKind::Cycle => Segment::cycle(instance, self.nodes.clone(), None).length,
        };
        if (recomputed - self.length).abs() > 1e-9 * self.length.abs().max(1.0) {
            return Err(format!(
                "stored length {} disagrees with recomputed {}",
                self.length, recomputed
            ));
        }
        if self.length > instance.discharge_time + instance.tolerance() {
            return Err(format!(
                "segment length {} exceeds the budget {}",
                self.length, instance.discharge_time
            ));
        }
        match self.kind {
            SegmentKind::Cycle => {
                if !self.nodes.iter().any(|&v| instance.is_depot(v)) {
                    return Err("cycle contains no depot".into());
                }
            }
            SegmentKind::Path => {
                if self.nodes.len() < 2 {
                    return Err("path has fewer than two nodes".into());
                }
                let (a, b) = self.anchors();
                if !instance.is_depot(a) || !instance.is_depot(b) {
                    return Err("path endpoint is not a depot".into());
                }
            }
        }
        Ok(())
    }
}

/// A set of feasible segments; complete when the union of its segments'
/// task vertices covers the whole task set.
#[derive(Debug, Clone, Default)]
pub struct SegmentSet {
    pub segments: Vec<Segment>,
}

impl SegmentSet {
    pub fn covered_tasks(&self, instance: &Instance) -> BTreeSet<NodeId> {
        self.segments
            .iter()
            .flat_map(|s| s.nodes.iter().copied())
            .filter(|&v| !instance.is_depot(v))
            .collect()
    }

    pub fn covers_all_tasks(&self, instance: &Instance) -> bool {
        let covered = self.covered_tasks(instance);
        instance.tasks().iter().all(|v| covered.contains(v))
    }

    pub fn to_document(&self, instance: &Instance) -> SegmentSetDocument {
        SegmentSetDocument {
            segments: self
                .segments
                .iter()
                .map(|s| SegmentDocument {
                    kind: s.kind,
                    nodes: s.nodes.iter().map(|&v| instance.external_id(v)).collect(),
                    anchors: s
                        .anchor_list()
                        .iter()
                        .map(|&v| instance.external_id(v))
                        .collect(),
                    length: s.length,
                })
                .collect(),
        }
    }
}

/// Serialized form of a segment set.
#[derive(Debug, Clone, Serialize)]
pub struct SegmentSetDocument {
    pub segments: Vec<SegmentDocument>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SegmentDocument {
    pub kind: SegmentKind,
    pub nodes: Vec<usize>,
    pub anchors: Vec<usize>,
    pub length: f64,
}

/// Cover all task vertices with feasible segments anchored at depots of
/// `component`: per-class path covers whose endpoints are connected to
/// their nearest depots, plus dedicated out-and-backs for boundary
/// vertices.
pub fn min_segment_cover(instance: &Instance, component: &[NodeId]) -> Result<SegmentSet> {
    let partition = compute_partition(instance, component)?;
    let mut segments = Vec::new();

    for &v in &partition.boundary {
        let (q, _) = instance.nearest_depot_among(v, component)?;
        segments.push(Segment::cycle(instance, vec![q, v], None));
    }

    for (j, class) in partition.classes.iter().enumerate() {
        if class.is_empty() {
            continue;
        }
        let bound = partition.class_bound(j, instance);
        for path in unrooted_path_cover(instance, class, bound) {
            let (first, last) = (path[0], path[path.len() - 1]);
            let (qa, _) = instance.nearest_depot_among(first, component)?;
            let (qb, _) = instance.nearest_depot_among(last, component)?;
            let segment = if qa == qb {
                let mut nodes = vec![qa];
                nodes.extend(path);
                Segment::cycle(instance, nodes, Some(j))
            } else {
                let mut nodes = vec![qa];
                nodes.extend(path);
                nodes.push(qb);
                Segment::path(instance, nodes, Some(j))
            };
            segments.push(segment);
        }
    }

    Ok(SegmentSet { segments })
}
