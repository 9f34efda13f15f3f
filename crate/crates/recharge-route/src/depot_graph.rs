//! The graph over recharging depots: two depots are adjacent when their
//! distance is within the discharge budget. Its connected components and
//! hop metric drive both solvers — a feasible route can never mix depots
//! from different components.


use crate::instance::{Instance, NodeId};

const UNREACHABLE: u32 = u32::MAX;

#[derive(Debug, Clone)]
pub struct DepotGraph {
    depots: Vec<NodeId>,
    /// Adjacency by depot index, each list ascending.
    adj: Vec<Vec<usize>>,
    component_of: Vec<usize>,
    /// Depot indices per component, ascending; components ordered by their
    /// smallest member.
    components: Vec<Vec<usize>>,
    /// Row-major hop counts; `u32::MAX` across components.
    hop: Vec<u32>,
}

impl DepotGraph {
    pub fn build(instance: &Instance) -> DepotGraph {
        let depots = instance.depots().to_vec();
        let m = depots.len();
        let budget = instance.discharge_time + instance.tolerance();
        let mut adj = vec![Vec::new(); m];
        for i in 0..m {
            for j in (i + 1)..m {
                if instance.dist(depots[i], depots[j]) <= budget {
                    adj[i].push(j);
                    adj[j].push(i);
                }
            }
        }

        // Components by BFS in index order keeps the numbering stable.
        let mut component_of = vec![usize::MAX; m];
        let mut components = Vec::new();
        for start in 0..m {
            if component_of[start] != usize::MAX {
                continue;
            }
            let c = components.len();
            let mut queue = std::collections::VecDeque::from([start]);
            component_of[start] = c;
            let mut members = vec![start];
            while let Some(u) = queue.pop_front() {
                for &v in &adj[u] {
                    if component_of[v] == usize::MAX {
                        component_of[v] = c;
                        members.push(v);
                        queue.push_back(v);
                    }
                }
            }
            members.sort_unstable();
            components.push(members);
        }

        // Hop distances by BFS from every depot.
        let mut hop = vec![UNREACHABLE; m * m];
        for s in 0..m {
            hop[s * m + s] = 0;
            let mut queue = std::collections::VecDeque::from([s]);
            while let Some(u) = queue.pop_front() {
                let du = hop[s * m + u];
                for &v in &adj[u] {
                    if hop[s * m + v] == UNREACHABLE {
                        hop[s * m + v] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
        }

        DepotGraph {
            depots,
            adj,
            component_of,
            components,
            hop,
        }
    }

    pub fn depots(&self) -> &[NodeId] {
        &self.depots
    }

    pub fn len(&self) -> usize {
        self.depots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.depots.is_empty()
    }

    /// Depot-graph index of a depot node id.
    pub fn index_of(&self, q: NodeId) -> Option<usize> {
        self.depots.binary_search(&q).ok()
    }

    pub fn node_of(&self, idx: usize) -> NodeId {
        self.depots[idx]
    }

    /// Minimum number of depot-graph edges between two depot indices;
    /// `None` across components.
    pub fn hop_dist(&self, i: usize, j: usize) -> Option<u32> {
        let h = self.hop[i * self.depots.len() + j];
        (h != UNREACHABLE).then_some(h)
    }

    pub fn component_of(&self, idx: usize) -> usize {
        self.component_of[idx]
    }

    /// Depot indices per component.
    pub fn components(&self) -> &[Vec<usize>] {
        &self.components
    }

    /// Node ids of one component, ascending.
    pub fn component_nodes(&self, c: usize) -> Vec<NodeId> {
        self.components[c].iter().map(|&i| self.depots[i]).collect()
    }

    /// A shortest hop path between two depot indices (inclusive of both
    /// endpoints). BFS expands neighbors in ascending index order, so the
    /// returned path is deterministic. `None` across components.
    pub fn hop_path(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        if from == to {
            return Some(vec![from]);
        }
        let m = self.depots.len();
        let mut parent = vec![usize::MAX; m];
        let mut seen = vec![false; m];
        seen[from] = true;
        let mut queue = std::collections::VecDeque::from([from]);
        while let Some(u) = queue.pop_front() {
            for &v in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    parent[v] = u;
                    if v == to {
                        let mut path = vec![to];
                        let mut cur = to;
                        while parent[cur] != usize::MAX {
                            cur = parent[cur];
                            path.push(cur);
                        }
                        path.reverse();
                        return Some(path);
                    }
                    queue.push_back(v);
                }
            }
        }
        None
    }
}

/// Per-component coverage report: a component can serve the whole task set
/// iff every task vertex lies within half the budget of one of its depots.
#[derive(Debug, Clone)]
pub struct ComponentReport {
    pub index: usize,
    /// Depot node ids, ascending.
    pub depots: Vec<NodeId>,
    pub coverable: bool,
    /// Largest nearest-depot distance over all task vertices, measured
    /// against this component's depots only.
    pub delta: f64,
    /// A witness task vertex at distance `delta`.
    pub farthest_vertex: Option<NodeId>,
}

/// Evaluate every depot component. The instance is feasible iff some
/// component is coverable: such a component can reach each vertex by an
/// out-and-back and is internally connected by hops within the budget.
/// Infeasibility is an outcome here, not an error.
pub fn component_feasibility(instance: &Instance, graph: &DepotGraph) -> Vec<ComponentReport> {
    let half = instance.discharge_time / 2.0 + instance.tolerance();
    graph
        .components()
        .iter()
        .enumerate()
        .map(|(index, members)| {
            let depots: Vec<NodeId> = members.iter().map(|&i| graph.node_of(i)).collect();
            let mut delta = 0.0f64;
            let mut farthest = None;
            for &v in instance.tasks() {
                let (_, d) = instance
                    .nearest_depot_among(v, &depots)
                    .expect("component is non-empty");
                if d > delta || farthest.is_none() {
                    delta = d;
                    farthest = Some(v);
                }
            }
            ComponentReport {
                index,
                depots,
                coverable: delta <= half,
                delta,
                farthest_vertex: farthest,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_from_points, DepotSelection, WeightMode};

    fn line(depots: Vec<u32>, xs: &[f64], d: f64) -> Instance {
        let pts: Vec<(f64, f64)> = xs.iter().map(|&x| (x, 0.0)).collect();
        build_from_points("t", &pts, &DepotSelection::Explicit(depots), d, 0.0, WeightMode::Real)
            .unwrap()
    }

    #[test]
    fn adjacency_boundary_at_budget() {
        // Exactly D apart: one edge, one component.
        let inst = line(vec![1, 2], &[0.0, 10.0], 10.0);
        let g = DepotGraph::build(&inst);
        assert_eq!(g.components().len(), 1);
        assert_eq!(g.hop_dist(0, 1), Some(1));
    }

    #[test]
    fn adjacency_splits_past_budget() {
        let inst = line(vec![1, 2], &[0.0, 10.5], 10.0);
        let g = DepotGraph::build(&inst);
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.hop_dist(0, 1), None);
    }

    #[test]
    fn components_and_hops_on_a_chain() {
        // Depots at 0, D, 2D and 3.5D: first three chain together, the
        // last is isolated; two hops from one chain end to the other.
        let d = 10.0;
        let inst = line(vec![1, 2, 3, 4], &[0.0, d, 2.0 * d, 3.5 * d], d);
        let g = DepotGraph::build(&inst);
        assert_eq!(g.components().len(), 2);
        assert_eq!(g.components()[0], vec![0, 1, 2]);
        assert_eq!(g.components()[1], vec![3]);
        assert_eq!(g.hop_dist(0, 2), Some(2));
        assert_eq!(g.hop_dist(0, 3), None);
        assert_eq!(g.hop_path(0, 2), Some(vec![0, 1, 2]));
    }

    #[test]
    fn hop_metric_matches_exhaustive_paths() {
        // Cross-check BFS hops against brute-force path enumeration on a
        // small random-ish depot layout.
        let pts = [
            (0.0, 0.0),
            (4.0, 0.0),
            (8.0, 1.0),
            (3.0, 4.0),
            (9.0, 5.0),
        ];
        let inst = build_from_points(
            "h",
            &pts,
            &DepotSelection::Explicit(vec![1, 2, 3, 4, 5]),
            5.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        let g = DepotGraph::build(&inst);
        let m = g.len();
        // Exhaustive: shortest edge-count path via repeated relaxation.
        let adj: Vec<Vec<bool>> = (0..m)
            .map(|i| {
                (0..m)
                    .map(|j| {
                        i != j && inst.dist(g.node_of(i), g.node_of(j)) <= inst.discharge_time
                    })
                    .collect()
            })
            .collect();
        let mut best = vec![vec![u32::MAX; m]; m];
        for i in 0..m {
            best[i][i] = 0;
        }
        for _round in 0..m {
            for i in 0..m {
                for j in 0..m {
                    if adj[i][j] {
                        for s in 0..m {
                            if best[s][i] != u32::MAX && best[s][i] + 1 < best[s][j] {
                                best[s][j] = best[s][i] + 1;
                            }
                        }
                    }
                }
            }
        }
        for i in 0..m {
            for j in 0..m {
                let expect = (best[i][j] != u32::MAX).then_some(best[i][j]);
                assert_eq!(g.hop_dist(i, j), expect, "hop mismatch at ({i},{j})");
            }
        }
    }

    #[test]
    fn coverable_single_depot() {
        let inst = line(vec![1], &[0.0, 3.0, 4.0], 10.0);
        let g = DepotGraph::build(&inst);
        let reports = component_feasibility(&inst, &g);
        assert_eq!(reports.len(), 1);
        assert!(reports[0].coverable);
        assert_eq!(reports[0].delta, 4.0);
    }

    #[test]
    fn vertex_beyond_half_budget_is_uncoverable() {
        let inst = line(vec![1], &[0.0, 5.2], 10.0);
        let g = DepotGraph::build(&inst);
        let reports = component_feasibility(&inst, &g);
        assert!(!reports[0].coverable);
        assert_eq!(reports[0].farthest_vertex, Some(1));
    }

    #[test]
    fn near_some_depot_is_not_enough() {
        // Two far-apart depots, one task vertex next to each: every vertex
        // is close to a depot, yet no single component covers both, so the
        // instance is infeasible.
        let pts = [(0.0, 0.0), (100.0, 0.0), (5.0, 0.0), (95.0, 0.0)];
        let inst = build_from_points(
            "split",
            &pts,
            &DepotSelection::Explicit(vec![1, 2]),
            30.0,
            0.0,
            WeightMode::Real,
        )
        .unwrap();
        let g = DepotGraph::build(&inst);
        let reports = component_feasibility(&inst, &g);
        assert_eq!(reports.len(), 2);
        assert!(reports.iter().all(|r| !r.coverable));
        // Sanity: each vertex individually is within D/2 of *some* depot.
        for &v in inst.tasks() {
            let (_, d) = inst.nearest_depot(v).unwrap();
            assert!(d <= inst.discharge_time / 2.0);
        }
    }
}
