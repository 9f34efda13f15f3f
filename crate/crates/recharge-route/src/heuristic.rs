//! The refined solver: bundle adjacent partition classes, sweep every
//! spanning-forest component count, tour each forest component, repair the
//! tours by inserting recharging depots, keep the fewest-recharge variant
//! per bundle, and stitch the kept segments with a tour over their
//! endpoint depots.

use serde::Serialize;
use std::time::Instant;

use crate::depot_graph::{component_feasibility, DepotGraph};
use crate::error::{Error, Result};
use crate::graph::kruskal;
use crate::instance::{Instance, NodeId};
use crate::segment_cover::{compute_partition, PartitionScheme, Segment};
use crate::tsp::{christofides, nearest_neighbor_two_opt};
use crate::walk::{Solution, Walk};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TourMethod {
    Christofides,
    NearestNeighbor2Opt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bundling {
    /// Sweep every width and keep the best walk.
    Auto,
    /// Fixed bundling width (clamped to the valid range per component).
    Fixed(usize),
}

#[derive(Debug, Clone)]
pub struct HeuristicConfig {
    pub bundling: Bundling,
    /// Cap on the spanning-forest sweep; the sweep is the dominant cost at
    /// scale.
    pub k_max: Option<usize>,
    pub tour_method: TourMethod,
    pub deadline: Option<Instant>,
}

impl Default for HeuristicConfig {
    fn default() -> Self {
        HeuristicConfig {
            bundling: Bundling::Auto,
            k_max: None,
            tour_method: TourMethod::Christofides,
            deadline: None,
        }
    }
}

/// Union the partition classes in stride-`b` windows: classes
/// `j..j+b` for `j = 0, b, 2b, ...`. Empty bundles are dropped.
pub fn bundle_partitions(partition: &PartitionScheme, b: usize) -> Vec<Vec<NodeId>> {
    assert!(b >= 1, "bundle width must be at least 1");
    let mut bundles = Vec::new();
    let mut j = 0;
    while j < partition.classes.len() {
        let mut bundle: Vec<NodeId> = Vec::new();
        for class in partition.classes.iter().skip(j).take(b) {
            bundle.extend(class.iter().copied());
        }
        bundle.sort_unstable();
        if !bundle.is_empty() {
            bundles.push(bundle);
        }
        j += b;
    }
    bundles
}

/// Spanning forest with exactly `k` components: the spanning tree minus
/// its `k - 1` heaviest edges (ties broken lexicographically). Returns the
/// vertex sets of the components, ordered by smallest member.
pub fn spanning_forest(
    instance: &Instance,
    vertices: &[NodeId],
    k: usize,
) -> Result<Vec<Vec<NodeId>>> {
    let n = vertices.len();
    if k < 1 || k > n {
        return Err(Error::Invalid(format!(
            "forest component count {k} out of range 1..={n}"
        )));
    }
    let mst = kruskal(n, |a, b| instance.dist(vertices[a], vertices[b]), |_| true);
    // Kruskal returns edges sorted ascending; dropping from the tail
    // removes the k-1 heaviest.
    let kept = &mst[..mst.len() - (k - 1)];
    let mut uf = crate::graph::UnionFind::new(n);
    for e in kept {
        uf.union(e.a, e.b);
    }
    let mut groups: std::collections::BTreeMap<usize, Vec<NodeId>> = std::collections::BTreeMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(vertices[i]);
    }
    let mut components: Vec<Vec<NodeId>> = groups.into_values().collect();
    components.sort_by_key(|c| c[0]);
    Ok(components)
}

/// Closed tour over a forest component's vertices.
pub fn component_tour(
    instance: &Instance,
    vertices: &[NodeId],
    method: TourMethod,
) -> Result<Vec<NodeId>> {
    match vertices.len() {
        0 => return Ok(Vec::new()),
        1 => return Ok(vec![vertices[0]]),
        2 => return Ok(vertices.to_vec()),
        _ => {}
    }
    let w: Vec<Vec<f64>> = vertices
        .iter()
        .map(|&a| vertices.iter().map(|&b| instance.dist(a, b)).collect())
        .collect();
    let order = match method {
        TourMethod::Christofides => christofides(&w)?.0,
        TourMethod::NearestNeighbor2Opt => nearest_neighbor_two_opt(&w),
    };
    Ok(order.into_iter().map(|i| vertices[i]).collect())
}

/// Walk a closed tour, inserting recharging depots so that every emitted
/// segment is depot-anchored and within the budget.
///
/// The walk starts at the tour vertex closest to a depot, anchored there.
/// Before each hop the remaining budget must cover the hop plus an escape
/// to the next vertex's nearest depot; otherwise a single detour through
/// the best reachable depot is tried, and only when no such depot exists
/// is the tour split into disconnected chains.
pub fn insert_depots(
    instance: &Instance,
    component: &[NodeId],
    tour: &[NodeId],
) -> Result<Vec<Segment>> {
    if tour.is_empty() {
        return Ok(Vec::new());
    }
    let tol = instance.tolerance();
    let budget = instance.discharge_time;
    let half = budget / 2.0 + tol;
    let near = |v: NodeId| -> Result<(NodeId, f64)> { instance.nearest_depot_among(v, component) };
    for &v in tour {
        let (_, d) = near(v)?;
        if d > half {
            return Err(Error::Infeasible {
                vertex: Some(v),
                detail: format!("tour vertex at {d} from the nearest depot exceeds half the budget"),
            });
        }
    }

    // Rotate the tour to start at the vertex closest to a depot.
    let start_pos = (0..tour.len())
        .min_by(|&a, &b| {
            let da = near(tour[a]).unwrap().1;
            let db = near(tour[b]).unwrap().1;
            da.partial_cmp(&db).unwrap().then(tour[a].cmp(&tour[b]))
        })
        .unwrap();
    let ordered: Vec<NodeId> = tour[start_pos..]
        .iter()
        .chain(tour[..start_pos].iter())
        .copied()
        .collect();

    let mut segments = Vec::new();
    let close = |nodes: Vec<NodeId>, instance: &Instance| -> Segment {
        if nodes[0] == nodes[nodes.len() - 1] && nodes.len() > 2 {
            Segment::cycle(instance, nodes[..nodes.len() - 1].to_vec(), None)
        } else {
            Segment::path(instance, nodes, None)
        }
    };

    let (q0, d0) = near(ordered[0])?;
    let mut current: Vec<NodeId> = vec![q0, ordered[0]];
    let mut remaining = budget - d0;

    for &v in &ordered[1..] {
        let u = *current.last().unwrap();
        let hop = instance.dist(u, v);
        let (_, escape) = near(v)?;
        if hop + escape <= remaining + tol {
            current.push(v);
            remaining -= hop;
            continue;
        }
        // Detour through a depot reachable from u that leaves v serviceable.
        let mut detour: Option<(f64, NodeId)> = None;
        for &q in component {
            let to_q = instance.dist(u, q);
            let q_to_v = instance.dist(q, v);
            if to_q <= remaining + tol && q_to_v + escape <= budget + tol {
                let cand = (to_q + q_to_v, q);
                if detour.map_or(true, |cur| cand < cur) {
                    detour = Some(cand);
                }
            }
        }
        if let Some((_, q)) = detour {
            current.push(q);
            segments.push(close(std::mem::take(&mut current), instance));
            current = vec![q, v];
            remaining = budget - instance.dist(q, v);
        } else {
            // Split: end this chain at u's nearest depot, restart at v's.
            let (qu, _) = near(u)?;
            current.push(qu);
            segments.push(close(std::mem::take(&mut current), instance));
            let (qv, dv) = near(v)?;
            current = vec![qv, v];
            remaining = budget - dv;
        }
    }
    let u = *current.last().unwrap();
    let (qu, _) = near(u)?;
    current.push(qu);
    segments.push(close(current, instance));
    Ok(segments)
}

/// Score a candidate segment list the way the final walk will pay for it:
/// walk the segments in order, merging shared consecutive anchors, and
/// count depot visits minus one; cost is the summed segment length.
fn candidate_score(instance: &Instance, segments: &[Segment]) -> (usize, f64) {
    let mut nodes: Vec<NodeId> = Vec::new();
    for seg in segments {
        let tr = seg.traversal();
        if nodes.last() == tr.first() {
            nodes.extend(tr.iter().skip(1));
        } else {
            nodes.extend(tr.iter());
        }
    }
    let mut visits = 0usize;
    let mut prev: Option<NodeId> = None;
    for &n in &nodes {
        if instance.is_depot(n) && prev != Some(n) {
            visits += 1;
        }
        prev = Some(n);
    }
    let cost: f64 = segments.iter().map(|s| s.length).sum();
    (visits.saturating_sub(1), cost)
}

/// One candidate record of the (b, bundle, k) sweep.
#[derive(Debug, Clone, Serialize)]
pub struct SweepEntry {
    pub b: usize,
    pub bundle_index: usize,
    pub k: usize,
    pub recharges: usize,
    pub cost: f64,
    pub chosen: bool,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct HeuristicDiagnostics {
    pub sweep: Vec<SweepEntry>,
}

#[derive(Debug)]
pub struct HeuristicOutput {
    pub solution: Solution,
    pub diagnostics: HeuristicDiagnostics,
}

/// Stitch segments into one walk: order them by a tour over their
/// endpoint depots under the hop metric, then connect consecutive
/// segments by shortest depot-hop paths, orienting each path segment to
/// enter at the anchor closest to the current position.
fn stitch_segments(
    graph: &DepotGraph,
    component: &[NodeId],
    segments: &[Segment],
) -> Result<Vec<NodeId>> {
    if segments.is_empty() {
        return Ok(vec![component[0]]);
    }
    let n = segments.len();
    let order: Vec<usize> = if n == 1 {
        vec![0]
    } else {
        let mut w = vec![vec![0.0f64; n]; n];
        for i in 0..n {
            for j in (i + 1)..n {
                let mut best = u32::MAX;
                for &a in &segments[i].anchor_list() {
                    for &b in &segments[j].anchor_list() {
                        let (ia, ib) = (
                            graph.index_of(a).expect("anchor is a depot"),
                            graph.index_of(b).expect("anchor is a depot"),
                        );
                        if let Some(h) = graph.hop_dist(ia, ib) {
                            best = best.min(h);
                        }
                    }
                }
                if best == u32::MAX {
                    return Err(Error::Invalid(
                        "segments anchored in different depot components".into(),
                    ));
                }
                w[i][j] = best as f64;
                w[j][i] = best as f64;
            }
        }
        // Close under the triangle inequality before the tour; riding
        // through a third segment's depots is always allowed.
        for m in 0..n {
            for i in 0..n {
                for j in 0..n {
                    let via = w[i][m] + w[m][j];
                    if via < w[i][j] {
                        w[i][j] = via;
                    }
                }
            }
        }
        christofides(&w)?.0
    };

    let mut nodes: Vec<NodeId> = Vec::new();
    let mut position: Option<usize> = None; // depot-graph index
    for &si in &order {
        let seg = &segments[si];
        let (a, b) = seg.anchors();
        let (ia, ib) = (
            graph.index_of(a).expect("anchor is a depot"),
            graph.index_of(b).expect("anchor is a depot"),
        );
        let entry = match position {
            None => ia.min(ib),
            Some(from) => {
                let ha = graph.hop_dist(from, ia).unwrap_or(u32::MAX);
                let hb = graph.hop_dist(from, ib).unwrap_or(u32::MAX);
                if (ha, ia) <= (hb, ib) {
                    ia
                } else {
                    ib
                }
            }
        };
        if let Some(from) = position {
            let path = graph
                .hop_path(from, entry)
                .ok_or_else(|| Error::Invalid("stitch path missing".into()))?;
            for &idx in path.iter().skip(1) {
                nodes.push(graph.node_of(idx));
            }
        } else {
            nodes.push(graph.node_of(entry));
        }
        let tr = seg.traversal();
        if tr[0] == graph.node_of(entry) {
            nodes.extend(tr.iter().skip(1));
        } else {
            nodes.extend(tr.iter().rev().skip(1));
        }
        position = Some(if entry == ia { ib } else { ia });
    }
    Ok(nodes)
}

/// End-to-end heuristic. Solved per coverable depot component; the best
/// walk by (recharges, cost) wins, with the bundling sweep applying the
/// same criterion.
pub fn heuristic_algorithm(
    instance: &Instance,
    config: &HeuristicConfig,
) -> Result<HeuristicOutput> {
    let start_time = Instant::now();
    let graph = DepotGraph::build(instance);
    if graph.is_empty() {
        return Err(Error::Invalid("instance has no depots".into()));
    }
    if instance.tasks().is_empty() {
        let walk = Walk::from_nodes(instance, vec![instance.depots()[0]]);
        let mut sol = Solution::assemble(instance, "heuristic", walk)?;
        sol.report.runtime_ms = start_time.elapsed().as_millis() as u64;
        return Ok(HeuristicOutput {
            solution: sol,
            diagnostics: HeuristicDiagnostics::default(),
        });
    }

    let reports = component_feasibility(instance, &graph);
    let coverable: Vec<_> = reports.iter().filter(|r| r.coverable).collect();
    if coverable.is_empty() {
        let best = reports
            .iter()
            .min_by(|a, b| a.delta.partial_cmp(&b.delta).unwrap())
            .expect("at least one component");
        return Err(Error::Infeasible {
            vertex: best.farthest_vertex,
            detail: format!(
                "no depot component covers every vertex within half the budget (best component {} reaches {:.3})",
                best.index, best.delta
            ),
        });
    }

    let mut best: Option<Solution> = None;
    let mut diagnostics = HeuristicDiagnostics::default();
    let mut deadline_hit = false;
    for report in coverable {
        let partition = compute_partition(instance, &report.depots)?;
        let width_cap = partition.levels.max(1);
        let widths: Vec<usize> = match config.bundling {
            Bundling::Fixed(b) => vec![b.clamp(1, width_cap)],
            Bundling::Auto => (1..=width_cap).collect(),
        };
        for &b in &widths {
            let (solution, mut sweep, hit) =
                solve_with_width(instance, &graph, &report.depots, &partition, b, config)?;
            deadline_hit |= hit;
            diagnostics.sweep.append(&mut sweep);
            let better = match &best {
                None => true,
                Some(cur) => {
                    (solution.report.recharges, solution.report.cost)
                        < (cur.report.recharges, cur.report.cost)
                }
            };
            if better {
                best = Some(solution);
            }
            if hit {
                break;
            }
        }
    }
    let mut solution = best.expect("a coverable component was solved");
    if deadline_hit {
        solution
            .report
            .notes
            .push("deadline reached: sweep truncated".into());
    }
    solution.report.runtime_ms = start_time.elapsed().as_millis() as u64;
    Ok(HeuristicOutput {
        solution,
        diagnostics,
    })
}

fn solve_with_width(
    instance: &Instance,
    graph: &DepotGraph,
    component: &[NodeId],
    partition: &PartitionScheme,
    b: usize,
    config: &HeuristicConfig,
) -> Result<(Solution, Vec<SweepEntry>, bool)> {
    let mut segments: Vec<Segment> = Vec::new();
    for &v in &partition.boundary {
        let (q, _) = instance.nearest_depot_among(v, component)?;
        segments.push(Segment::cycle(instance, vec![q, v], None));
    }

    let mut sweep = Vec::new();
    let mut deadline_hit = false;
    let bundles = bundle_partitions(partition, b);
    for (bundle_index, bundle) in bundles.iter().enumerate() {
        let k_cap = config.k_max.unwrap_or(usize::MAX).min(bundle.len()).max(1);
        let mut kept: Option<(usize, f64, usize, Vec<Segment>)> = None;
        let mut entries = Vec::new();
        for k in 1..=k_cap {
            let mut candidate: Vec<Segment> = Vec::new();
            for comp in spanning_forest(instance, bundle, k)? {
                let tour = component_tour(instance, &comp, config.tour_method)?;
                candidate.extend(insert_depots(instance, component, &tour)?);
            }
            let (recharges, cost) = candidate_score(instance, &candidate);
            entries.push(SweepEntry {
                b,
                bundle_index,
                k,
                recharges,
                cost,
                chosen: false,
            });
            let better = match &kept {
                None => true,
                Some((br, bc, bk, _)) => {
                    (recharges, cost, k) < (*br, *bc, *bk)
                }
            };
            if better {
                kept = Some((recharges, cost, k, candidate));
            }
            if let Some(deadline) = config.deadline {
                if Instant::now() >= deadline {
                    deadline_hit = true;
                    break;
                }
            }
        }
        let (_, _, chosen_k, chosen_segments) = kept.expect("at least k=1 ran");
        for e in &mut entries {
            if e.k == chosen_k {
                e.chosen = true;
            }
        }
        sweep.extend(entries);
        segments.extend(chosen_segments);
    }

    let nodes = stitch_segments(graph, component, &segments)?;
    let solution = Solution::assemble(instance, "heuristic", Walk::from_nodes(instance, nodes))?;
    Ok((solution, sweep, deadline_hit))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_from_points, DepotSelection, WeightMode};
    use crate::walk::validate_walk;

    fn inst(pts: &[(f64, f64)], depots: Vec<u32>, d: f64) -> Instance {
        build_from_points("t", pts, &DepotSelection::Explicit(depots), d, 0.0, WeightMode::Real)
            .unwrap()
    }

    fn partition_of(instance: &Instance) -> PartitionScheme {
        compute_partition(instance, instance.depots()).unwrap()
    }

    #[test]
    fn bundling_all_classes_is_one_bundle() {
        let i = inst(&[(0.0, 0.0), (4.0, 0.0), (1.0, 0.0)], vec![1], 10.0);
        let p = partition_of(&i);
        let bundles = bundle_partitions(&p, p.levels + 1);
        assert_eq!(bundles.len(), 1);
        assert_eq!(bundles[0].len(), i.tasks().len());
    }

    #[test]
    fn bundling_width_one_is_the_classes() {
        let i = inst(&[(0.0, 0.0), (4.0, 0.0), (1.0, 0.0)], vec![1], 10.0);
        let p = partition_of(&i);
        let bundles = bundle_partitions(&p, 1);
        let nonempty: Vec<&Vec<NodeId>> = p.classes.iter().filter(|c| !c.is_empty()).collect();
        assert_eq!(bundles.len(), nonempty.len());
    }

    #[test]
    fn bundling_stride_two() {
        // Four classes bundled two at a time: {V0 u V1, V2 u V3}.
        let p = PartitionScheme {
            max_depot_distance: 4.0,
            slack: 1.0,
            levels: 3,
            classes: vec![vec![10], vec![11], vec![12], vec![13]],
            boundary: vec![],
        };
        let bundles = bundle_partitions(&p, 2);
        assert_eq!(bundles, vec![vec![10, 11], vec![12, 13]]);
    }

    #[test]
    fn forest_extremes() {
        let i = inst(
            &[(100.0, 100.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (7.0, 0.0)],
            vec![1],
            500.0,
        );
        let verts = vec![1, 2, 3, 4];
        let all = spanning_forest(&i, &verts, 4).unwrap();
        assert_eq!(all.len(), 4);
        let one = spanning_forest(&i, &verts, 1).unwrap();
        assert_eq!(one.len(), 1);
        assert!(spanning_forest(&i, &verts, 0).is_err());
        assert!(spanning_forest(&i, &verts, 5).is_err());
    }

    #[test]
    fn forest_removes_heaviest_edge() {
        // Gaps 1, 1, 5: splitting into two components removes the 5.
        let i = inst(
            &[(100.0, 100.0), (0.0, 0.0), (1.0, 0.0), (2.0, 0.0), (7.0, 0.0)],
            vec![1],
            500.0,
        );
        let comps = spanning_forest(&i, &[1, 2, 3, 4], 2).unwrap();
        assert_eq!(comps, vec![vec![1, 2, 3], vec![4]]);
    }

    #[test]
    fn tour_of_unit_square() {
        let i = inst(
            &[
                (50.0, 50.0),
                (0.0, 0.0),
                (1.0, 0.0),
                (1.0, 1.0),
                (0.0, 1.0),
            ],
            vec![1],
            500.0,
        );
        for method in [TourMethod::Christofides, TourMethod::NearestNeighbor2Opt] {
            let tour = component_tour(&i, &[1, 2, 3, 4], method).unwrap();
            let mut cost = 0.0;
            for idx in 0..tour.len() {
                cost += i.dist(tour[idx], tour[(idx + 1) % tour.len()]);
            }
            assert!((cost - 4.0).abs() < 1e-9, "{method:?} cost {cost}");
        }
    }

    #[test]
    fn insert_depots_single_span() {
        // Whole tour fits one battery span: a single segment.
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], vec![1], 10.0);
        let segs = insert_depots(&i, i.depots(), &[1, 2]).unwrap();
        assert_eq!(segs.len(), 1);
        segs[0].check_feasible(&i).unwrap();
        let covered: Vec<NodeId> = segs[0]
            .nodes
            .iter()
            .copied()
            .filter(|&v| !i.is_depot(v))
            .collect();
        assert_eq!(covered, vec![1, 2]);
    }

    #[test]
    fn insert_depots_detour_keeps_chain_connected() {
        // Two vertices near different depots one hop apart; the direct
        // vertex-to-vertex transit is unsafe but one detour through the
        // second depot repairs it without splitting.
        let i = inst(
            &[(0.0, 0.0), (10.0, 0.0), (4.0, 0.0), (14.0, 0.0)],
            vec![1, 2],
            12.0,
        );
        let segs = insert_depots(&i, i.depots(), &[2, 3]).unwrap();
        assert_eq!(segs.len(), 2);
        for s in &segs {
            s.check_feasible(&i).unwrap();
        }
        // The chain stays connected through the detour depot.
        let (a1, b1) = segs[0].anchors();
        let (a2, _) = segs[1].anchors();
        assert_eq!(b1, a2, "segments {:?} and {:?} must share a depot", (a1, b1), a2);
        assert_eq!(a2, 1); // the depot at (10, 0)
    }

    #[test]
    fn insert_depots_splits_across_far_depots() {
        // Vertices near depots three hops apart: no single detour can
        // bridge them, so the chain splits.
        let i = inst(
            &[
                (0.0, 0.0),
                (10.0, 0.0),
                (20.0, 0.0),
                (30.0, 0.0),
                (0.0, 4.0),
                (30.0, 4.0),
            ],
            vec![1, 2, 3, 4],
            10.0,
        );
        let segs = insert_depots(&i, i.depots(), &[4, 5]).unwrap();
        assert_eq!(segs.len(), 2);
        for s in &segs {
            s.check_feasible(&i).unwrap();
        }
        // The two segments share no anchor depot.
        let a: Vec<NodeId> = segs[0].anchor_list();
        let b: Vec<NodeId> = segs[1].anchor_list();
        assert!(a.iter().all(|q| !b.contains(q)), "{a:?} vs {b:?}");
    }

    #[test]
    fn insert_depots_rejects_unreachable_vertex() {
        let i = inst(&[(0.0, 0.0), (6.0, 0.0)], vec![1], 10.0);
        let err = insert_depots(&i, i.depots(), &[1]).unwrap_err();
        assert!(err.is_infeasible());
    }

    #[test]
    fn insert_depots_segments_are_always_feasible() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(17);
        for _ in 0..40 {
            let m = rng.gen_range(1..=4);
            let n = rng.gen_range(1..=9);
            let mut pts = Vec::new();
            for _ in 0..(m + n) {
                pts.push((rng.gen_range(0.0..40.0), rng.gen_range(0.0..40.0)));
            }
            let built = build_from_points(
                "r",
                &pts,
                &DepotSelection::FirstM(m),
                55.0,
                0.0,
                WeightMode::Real,
            )
            .unwrap();
            // Random tour order over all tasks.
            let mut tour = built.tasks().to_vec();
            for idx in (1..tour.len()).rev() {
                let j = rng.gen_range(0..=idx);
                tour.swap(idx, j);
            }
            match insert_depots(&built, built.depots(), &tour) {
                Ok(segs) => {
                    for s in &segs {
                        s.check_feasible(&built).unwrap();
                    }
                    let covered: std::collections::BTreeSet<NodeId> = segs
                        .iter()
                        .flat_map(|s| s.nodes.iter().copied())
                        .filter(|&v| !built.is_depot(v))
                        .collect();
                    assert_eq!(covered.len(), built.tasks().len());
                }
                Err(e) => assert!(e.is_infeasible()),
            }
        }
    }

    #[test]
    fn heuristic_single_segment_instance() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0), (2.0, 0.0)], vec![1], 10.0);
        for b in [Bundling::Auto, Bundling::Fixed(1), Bundling::Fixed(3)] {
            let out = heuristic_algorithm(
                &i,
                &HeuristicConfig {
                    bundling: b,
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(out.solution.report.feasible);
            assert_eq!(out.solution.report.recharges, 1);
        }
    }

    #[test]
    fn auto_is_no_worse_than_any_fixed_width() {
        let pts = [
            (0.0, 0.0),
            (30.0, 0.0),
            (2.0, 1.0),
            (13.0, 2.0),
            (7.0, 5.0),
            (28.0, 2.0),
            (20.0, 8.0),
            (11.0, 11.0),
        ];
        let i = inst(&pts, vec![1, 2], 34.0);
        let auto = heuristic_algorithm(&i, &HeuristicConfig::default()).unwrap();
        for b in 1..=4 {
            let fixed = heuristic_algorithm(
                &i,
                &HeuristicConfig {
                    bundling: Bundling::Fixed(b),
                    ..Default::default()
                },
            )
            .unwrap();
            assert!(
                (auto.solution.report.recharges, auto.solution.report.cost)
                    <= (fixed.solution.report.recharges, fixed.solution.report.cost),
                "auto {:?} worse than b={b} {:?}",
                (auto.solution.report.recharges, auto.solution.report.cost),
                (fixed.solution.report.recharges, fixed.solution.report.cost)
            );
        }
    }

    #[test]
    fn chosen_sweep_entry_has_fewest_recharges() {
        let pts = [
            (0.0, 0.0),
            (18.0, 0.0),
            (1.0, 2.0),
            (4.0, 1.0),
            (8.0, 3.0),
            (17.0, 2.0),
            (12.0, 4.0),
        ];
        let i = inst(&pts, vec![1, 2], 20.0);
        let out = heuristic_algorithm(&i, &HeuristicConfig::default()).unwrap();
        use std::collections::BTreeMap;
        let mut groups: BTreeMap<(usize, usize), Vec<&SweepEntry>> = BTreeMap::new();
        for e in &out.diagnostics.sweep {
            groups.entry((e.b, e.bundle_index)).or_default().push(e);
        }
        for ((b, bi), entries) in groups {
            let min = entries.iter().map(|e| e.recharges).min().unwrap();
            let chosen: Vec<_> = entries.iter().filter(|e| e.chosen).collect();
            assert_eq!(chosen.len(), 1, "bundle ({b},{bi})");
            assert_eq!(chosen[0].recharges, min, "bundle ({b},{bi})");
        }
    }

    #[test]
    fn two_depot_staged_example() {
        // Two depots with a near ring and a far ring of vertices: the
        // partition has at least two classes, and with width 1 each class
        // is toured and repaired separately, ending in a feasible walk.
        let pts = [
            (0.0, 0.0),   // depot
            (40.0, 0.0),  // depot
            (4.0, 0.0),
            (0.0, 4.0),
            (36.0, 0.0),
            (40.0, 4.0),
            (14.0, 0.0),
            (0.0, 14.0),
            (26.0, 0.0),
            (40.0, 14.0),
        ];
        let i = inst(&pts, vec![1, 2], 40.0);
        let p = partition_of(&i);
        let nonempty = p.classes.iter().filter(|c| !c.is_empty()).count();
        assert!(nonempty >= 2, "expected a layered partition, got {p:?}");
        let out = heuristic_algorithm(
            &i,
            &HeuristicConfig {
                bundling: Bundling::Fixed(1),
                ..Default::default()
            },
        )
        .unwrap();
        assert!(out.solution.report.feasible);
        assert!(validate_walk(&i, &out.solution.walk).unwrap().is_feasible());
        // The sweep recorded per-class candidates for multiple k values.
        assert!(out.diagnostics.sweep.len() >= 2);
    }

    #[test]
    fn infeasible_instance_is_reported() {
        let i = inst(&[(0.0, 0.0), (50.0, 0.0)], vec![1], 10.0);
        assert!(heuristic_algorithm(&i, &HeuristicConfig::default())
            .unwrap_err()
            .is_infeasible());
    }
}
