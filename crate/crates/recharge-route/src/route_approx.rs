//! The segment-cover routing pipeline: group segments into maximal
//! neighbor sets, order the sets by a tour on the recharge-hop graph, and
//! traverse each set along a spanning structure of its depots so that no
//! leg between depot visits ever exceeds the discharge budget.

use serde::Serialize;
use std::collections::{BTreeMap, BTreeSet};
use std::time::Instant;

use crate::depot_graph::{component_feasibility, DepotGraph};
use crate::error::{Error, Result};
use crate::graph::UnionFind;
use crate::instance::{Instance, NodeId};
use crate::segment_cover::{min_segment_cover, Segment, SegmentKind, SegmentSet, SegmentSetDocument};
use crate::tsp::{christofides, MatchingMode};
use crate::walk::{Solution, Walk};

/// A maximal set of segments that are pairwise connected through the
/// neighbor relation: sharing a depot, having anchor depots within one
/// hop, or within two hops (one intermediate recharge).
#[derive(Debug, Clone)]
pub struct NeighborSet {
    /// Indices into the segment cover, ascending.
    pub segment_indices: Vec<usize>,
    /// Depot-graph indices of all anchor depots, ascending.
    pub depot_indices: Vec<usize>,
    pub representative: usize,
}

/// Whether two segments are neighbors: some anchor pair within two hops.
fn are_neighbors(a: &Segment, b: &Segment, graph: &DepotGraph) -> bool {
    for &qa in &a.anchor_list() {
        for &qb in &b.anchor_list() {
            let (ia, ib) = match (graph.index_of(qa), graph.index_of(qb)) {
                (Some(x), Some(y)) => (x, y),
                _ => continue,
            };
            if let Some(h) = graph.hop_dist(ia, ib) {
                if h <= 2 {
                    return true;
                }
            }
        }
    }
    false
}

/// Partition a segment cover into maximal neighbor sets (connected
/// components of the neighbor relation).
pub fn group_neighbor_sets(cover: &SegmentSet, graph: &DepotGraph) -> Vec<NeighborSet> {
    let n = cover.segments.len();
    let mut uf = UnionFind::new(n);
    for i in 0..n {
        for j in (i + 1)..n {
            if are_neighbors(&cover.segments[i], &cover.segments[j], graph) {
                uf.union(i, j);
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..n {
        groups.entry(uf.find(i)).or_default().push(i);
    }
    let mut sets: Vec<NeighborSet> = groups
        .into_values()
        .map(|segment_indices| {
            let mut depot_indices = BTreeSet::new();
            for &si in &segment_indices {
                for q in cover.segments[si].anchor_list() {
                    depot_indices.insert(graph.index_of(q).expect("anchor is a depot"));
                }
            }
            NeighborSet {
                representative: segment_indices[0],
                segment_indices,
                depot_indices: depot_indices.into_iter().collect(),
            }
        })
        .collect();
    sets.sort_by_key(|s| s.representative);
    sets
}

/// Complete graph over neighbor sets; weights are the minimum number of
/// recharge hops between any depot pair of the two sets, closed under the
/// triangle inequality (travelling through a third set's depots is always
/// allowed).
#[derive(Debug, Clone)]
pub struct SegmentGraph {
    pub weights: Vec<Vec<f64>>,
}

pub fn build_segment_graph(sets: &[NeighborSet], graph: &DepotGraph) -> Result<SegmentGraph> {
    let k = sets.len();
    let mut weights = vec![vec![0.0f64; k]; k];
    for i in 0..k {
        for j in (i + 1)..k {
            let mut best: Option<u32> = None;
            for &a in &sets[i].depot_indices {
                for &b in &sets[j].depot_indices {
                    if let Some(h) = graph.hop_dist(a, b) {
                        best = Some(best.map_or(h, |cur| cur.min(h)));
                    }
                }
            }
            let h = best.ok_or_else(|| {
                Error::Invalid("neighbor sets span different depot components".into())
            })?;
            weights[i][j] = h as f64;
            weights[j][i] = h as f64;
        }
    }
    // Metric closure: the raw set-to-set minima need not satisfy the
    // triangle inequality because a set's own depots may be several hops
    // apart internally.
    for m in 0..k {
        for i in 0..k {
            for j in 0..k {
                let via = weights[i][m] + weights[m][j];
                if via < weights[i][j] {
                    weights[i][j] = via;
                }
            }
        }
    }
    Ok(SegmentGraph { weights })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum TreeEdgeKind {
    /// Realized by traversing the segment interior on first use.
    Segment(usize),
    /// Direct depot-to-depot leg (one hop).
    Hop,
}

/// Traverse one neighbor set starting and ending at `entry` (a depot node
/// id anchored in the set): build a connecting structure over the set's
/// depots, make it Eulerian, and splice every segment in at its anchors.
/// Every leg between depot visits stays within the budget; the number of
/// recharges is bounded by six per segment.
pub fn traverse_neighbor_set(
    instance: &Instance,
    graph: &DepotGraph,
    cover: &SegmentSet,
    set: &NeighborSet,
    entry: NodeId,
) -> Result<Vec<NodeId>> {
    let entry_idx = graph
        .index_of(entry)
        .ok_or_else(|| Error::Invalid(format!("entry {entry} is not a depot")))?;
    if !set.depot_indices.contains(&entry_idx) {
        return Err(Error::Invalid(format!(
            "entry depot {entry} is not anchored in the neighbor set"
        )));
    }

    // Multigraph nodes: depot-graph indices. Start from the anchors.
    let mut nodes: BTreeSet<usize> = set.depot_indices.iter().copied().collect();
    let mut edges: Vec<(usize, usize, TreeEdgeKind)> = Vec::new();
    let mut cycles_at: BTreeMap<usize, Vec<usize>> = BTreeMap::new();

    for &si in &set.segment_indices {
        let seg = &cover.segments[si];
        let (a, b) = seg.anchors();
        let (ia, ib) = (
            graph.index_of(a).expect("anchor is a depot"),
            graph.index_of(b).expect("anchor is a depot"),
        );
        match seg.kind {
            SegmentKind::Cycle => cycles_at.entry(ia).or_default().push(si),
            SegmentKind::Path => edges.push((ia, ib, TreeEdgeKind::Segment(si))),
        }
    }

    // Connect the segment components with minimum-hop links.
    let node_list: Vec<usize> = nodes.iter().copied().collect();
    let pos: BTreeMap<usize, usize> = node_list.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut uf = UnionFind::new(node_list.len());
    for &(a, b, _) in &edges {
        uf.union(pos[&a], pos[&b]);
    }
    let mut roots: Vec<usize> = (0..node_list.len()).map(|i| uf.find(i)).collect();
    let mut comp_ids: Vec<usize> = roots.clone();
    comp_ids.sort_unstable();
    comp_ids.dedup();
    if comp_ids.len() > 1 {
        // Cheapest hop link between every component pair, then a spanning
        // set of links chosen greedily.
        let cn = comp_ids.len();
        let comp_of: BTreeMap<usize, usize> = comp_ids
            .iter()
            .enumerate()
            .map(|(i, &r)| (r, i))
            .collect();
        let mut best_pair: BTreeMap<(usize, usize), (u32, usize, usize)> = BTreeMap::new();
        for (li, &a) in node_list.iter().enumerate() {
            for (lj, &b) in node_list.iter().enumerate().skip(li + 1) {
                let (ca, cb) = (comp_of[&roots[li]], comp_of[&roots[lj]]);
                if ca == cb {
                    continue;
                }
                let key = (ca.min(cb), ca.max(cb));
                if let Some(h) = graph.hop_dist(a, b) {
                    let cand = (h, a.min(b), a.max(b));
                    let slot = best_pair.entry(key).or_insert(cand);
                    if cand < *slot {
                        *slot = cand;
                    }
                }
            }
        }
        let mut link_edges: Vec<(u32, usize, usize, usize, usize)> = best_pair
            .iter()
            .map(|(&(ca, cb), &(h, a, b))| (h, a, b, ca, cb))
            .collect();
        link_edges.sort_unstable();
        let mut cuf = UnionFind::new(cn);
        let mut chosen = Vec::new();
        for (h, a, b, ca, cb) in link_edges {
            if cuf.union(ca, cb) {
                chosen.push((h, a, b));
            }
        }
        if chosen.len() + 1 != cn {
            return Err(Error::Invalid(
                "neighbor set depots are not hop-connected".into(),
            ));
        }
        for (_, a, b) in chosen {
            let path = graph
                .hop_path(a, b)
                .ok_or_else(|| Error::Invalid("link endpoints are not hop-connected".into()))?;
            for w in path.windows(2) {
                nodes.insert(w[0]);
                nodes.insert(w[1]);
                edges.push((w[0], w[1], TreeEdgeKind::Hop));
            }
        }
    }
    let _ = &mut roots;

    // Make all degrees even. Either pair up the odd depots along hop
    // paths, or duplicate every edge; take whichever adds fewer edges.
    let degree_of = |edges: &[(usize, usize, TreeEdgeKind)]| -> BTreeMap<usize, usize> {
        let mut d: BTreeMap<usize, usize> = BTreeMap::new();
        for &n in nodes.iter() {
            d.insert(n, 0);
        }
        for &(a, b, _) in edges {
            *d.entry(a).or_default() += 1;
            *d.entry(b).or_default() += 1;
        }
        d
    };
    let odd: Vec<usize> = degree_of(&edges)
        .into_iter()
        .filter(|&(_, d)| d % 2 == 1)
        .map(|(n, _)| n)
        .collect();

    let mut pairing_edges: Vec<(usize, usize)> = Vec::new();
    if !odd.is_empty() {
        let mut remaining: Vec<usize> = odd.clone();
        while !remaining.is_empty() {
            let mut best: Option<(u32, usize, usize)> = None;
            for (i, &a) in remaining.iter().enumerate() {
                for &b in remaining.iter().skip(i + 1) {
                    if let Some(h) = graph.hop_dist(a, b) {
                        let cand = (h, a, b);
                        if best.map_or(true, |cur| cand < cur) {
                            best = Some(cand);
                        }
                    }
                }
            }
            let (_, a, b) = best.expect("odd depots share the component");
            let path = graph.hop_path(a, b).expect("hop path exists");
            for w in path.windows(2) {
                pairing_edges.push((w[0], w[1]));
            }
            remaining.retain(|&x| x != a && x != b);
        }
    }
    let final_edges: Vec<(usize, usize, TreeEdgeKind)> = if pairing_edges.len() <= edges.len() {
        let mut all = edges.clone();
        for (a, b) in pairing_edges {
            nodes.insert(a);
            nodes.insert(b);
            all.push((a, b, TreeEdgeKind::Hop));
        }
        all
    } else {
        // Doubling every edge: duplicated segment edges become direct legs
        // between their anchors, which are within the budget because the
        // segment itself is.
        let mut all = edges.clone();
        for &(a, b, _) in &edges {
            all.push((a, b, TreeEdgeKind::Hop));
        }
        all
    };

    // Euler circuit from the entry depot (all degrees are even now).
    let node_list: Vec<usize> = nodes.iter().copied().collect();
    let pos: BTreeMap<usize, usize> = node_list.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); node_list.len()];
    for (id, &(a, b, _)) in final_edges.iter().enumerate() {
        adj[pos[&a]].push((pos[&b], id));
        adj[pos[&b]].push((pos[&a], id));
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let start = pos[&entry_idx];
    let mut used = vec![false; final_edges.len()];
    let mut ptr = vec![0usize; node_list.len()];
    let mut stack = vec![start];
    let mut circuit: Vec<usize> = Vec::new();
    while let Some(&v) = stack.last() {
        let mut advanced = false;
        while ptr[v] < adj[v].len() {
            let (to, id) = adj[v][ptr[v]];
            ptr[v] += 1;
            if !used[id] {
                used[id] = true;
                stack.push(to);
                advanced = true;
                break;
            }
        }
        if !advanced {
            circuit.push(v);
            stack.pop();
        }
    }
    circuit.reverse();
    if circuit.iter().filter(|_| true).count() < final_edges.len() + 1 {
        return Err(Error::Invalid("euler circuit failed to cover all edges".into()));
    }

    // Realize the circuit: segment edges are walked through their interior
    // on first use, everything else is a direct depot-to-depot leg; cycle
    // segments are spliced at the first visit of their anchor.
    let mut walk: Vec<NodeId> = Vec::new();
    let mut traversed = vec![false; cover.segments.len()];
    let mut visited_nodes: BTreeSet<usize> = BTreeSet::new();
    let splice_cycles = |local: usize, walk: &mut Vec<NodeId>,
                             visited: &mut BTreeSet<usize>,
                             traversed: &mut Vec<bool>| {
        let dg_idx = node_list[local];
        if !visited.insert(dg_idx) {
            return;
        }
        if let Some(cycle_list) = cycles_at.get(&dg_idx) {
            for &si in cycle_list {
                if traversed[si] {
                    continue;
                }
                traversed[si] = true;
                let tr = cover.segments[si].traversal();
                walk.extend(tr.iter().skip(1));
            }
        }
    };

    walk.push(graph.node_of(node_list[start]));
    splice_cycles(start, &mut walk, &mut visited_nodes, &mut traversed);

    // Re-walk the circuit edge by edge (Hierholzer already fixed the edge
    // order; recover it from consecutive circuit nodes).
    let mut used2 = vec![false; final_edges.len()];
    for w in circuit.windows(2) {
        let (u, v) = (w[0], w[1]);
        // Find the edge consumed between u and v, preferring untraversed
        // segment edges so interiors are spliced as early as possible.
        let mut edge_id: Option<usize> = None;
        for &(to, id) in &adj[u] {
            if to == v && !used2[id] {
                let better = match edge_id {
                    None => true,
                    Some(prev) => {
                        let prev_is_seg = matches!(final_edges[prev].2, TreeEdgeKind::Segment(s) if !traversed[s]);
                        let this_is_seg = matches!(final_edges[id].2, TreeEdgeKind::Segment(s) if !traversed[s]);
                        this_is_seg && !prev_is_seg
                    }
                };
                if better {
                    edge_id = Some(id);
                }
            }
        }
        let id = edge_id.expect("circuit edge exists");
        used2[id] = true;
        match final_edges[id].2 {
            TreeEdgeKind::Segment(si) if !traversed[si] => {
                traversed[si] = true;
                let seg = &cover.segments[si];
                let tr = seg.traversal();
                let from_node = graph.node_of(node_list[u]);
                if tr[0] == from_node {
                    walk.extend(tr.iter().skip(1));
                } else {
                    walk.extend(tr.iter().rev().skip(1));
                }
            }
            _ => {
                walk.push(graph.node_of(node_list[v]));
            }
        }
        splice_cycles(v, &mut walk, &mut visited_nodes, &mut traversed);
    }

    debug_assert!(
        set.segment_indices.iter().all(|&si| traversed[si]),
        "a segment was left untraversed"
    );
    // Post-condition: no stretch between depot visits exceeds the budget.
    if cfg!(debug_assertions) {
        let budget = instance.discharge_time + instance.tolerance();
        let mut since = 0.0;
        for w in walk.windows(2) {
            since += instance.dist(w[0], w[1]);
            if instance.is_depot(w[1]) {
                debug_assert!(since <= budget, "leg of {since} exceeds budget {budget}");
                since = 0.0;
            }
        }
    }
    Ok(walk)
}

#[derive(Debug, Clone, Serialize)]
pub struct GsEdge {
    pub from: usize,
    pub to: usize,
    pub weight: f64,
}

/// Per-component pipeline trace, serializable for debugging and plots.
#[derive(Debug, Clone, Serialize)]
pub struct ComponentDiagnostics {
    /// External ids of the component's depots.
    pub depots: Vec<usize>,
    pub segments: SegmentSetDocument,
    /// Segment indices per neighbor set.
    pub neighbor_sets: Vec<Vec<usize>>,
    pub gs_edges: Vec<GsEdge>,
    pub tsp_order: Vec<usize>,
    /// Depot visits minus one per traversed neighbor set, aligned with
    /// `neighbor_sets`.
    pub set_recharges: Vec<usize>,
    pub set_sizes: Vec<usize>,
}

#[derive(Debug, Clone, Serialize, Default)]
pub struct ApproxDiagnostics {
    pub components: Vec<ComponentDiagnostics>,
}

#[derive(Debug)]
pub struct ApproxOutput {
    pub solution: Solution,
    pub diagnostics: ApproxDiagnostics,
}

/// End-to-end approximation: cover, group, order, traverse; solved per
/// coverable depot component, returning the best component's walk.
pub fn approximation_algorithm(instance: &Instance) -> Result<ApproxOutput> {
    let start_time = Instant::now();
    let graph = DepotGraph::build(instance);
    if graph.is_empty() {
        return Err(Error::Invalid("instance has no depots".into()));
    }

    if instance.tasks().is_empty() {
        let walk = Walk::from_nodes(instance, vec![instance.depots()[0]]);
        let mut sol = Solution::assemble(instance, "approx", walk)?;
        sol.report.runtime_ms = start_time.elapsed().as_millis() as u64;
        return Ok(ApproxOutput {
            solution: sol,
            diagnostics: ApproxDiagnostics::default(),
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
                "no depot component covers every vertex within half the budget (best component {} reaches {:.3}, budget half is {:.3})",
                best.index,
                best.delta,
                instance.discharge_time / 2.0
            ),
        });
    }

    let mut best: Option<(Solution, ComponentDiagnostics)> = None;
    let mut greedy_matching_used = false;
    for report in coverable {
        let (solution, diag, greedy) = solve_component(instance, &graph, &report.depots)?;
        greedy_matching_used |= greedy;
        let better = match &best {
            None => true,
            Some((cur, _)) => {
                (solution.report.cost, solution.report.recharges)
                    < (cur.report.cost, cur.report.recharges)
            }
        };
        if better {
            best = Some((solution, diag));
        }
    }
    let (mut solution, diag) = best.expect("a coverable component was solved");
    solution.report.runtime_ms = start_time.elapsed().as_millis() as u64;
    solution
        .report
        .notes
        .push(format!("matching={}", if greedy_matching_used { "greedy" } else { "exact" }));
    Ok(ApproxOutput {
        solution,
        diagnostics: ApproxDiagnostics {
            components: vec![diag],
        },
    })
}

fn solve_component(
    instance: &Instance,
    graph: &DepotGraph,
    component: &[NodeId],
) -> Result<(Solution, ComponentDiagnostics, bool)> {
    let cover = min_segment_cover(instance, component)?;
    let sets = group_neighbor_sets(&cover, graph);
    let gs = build_segment_graph(&sets, graph)?;
    let (order, matching) = if sets.len() <= 1 {
        (vec![0usize; sets.len().min(1)], MatchingMode::Exact)
    } else {
        christofides(&gs.weights)?
    };

    let mut walk_nodes: Vec<NodeId> = Vec::new();
    let mut set_recharges = vec![0usize; sets.len()];
    let mut prev_entry: Option<usize> = None;
    for &set_pos in &order {
        let set = &sets[set_pos];
        let entry_idx = match prev_entry {
            None => set.depot_indices[0],
            Some(from) => set
                .depot_indices
                .iter()
                .copied()
                .min_by_key(|&d| (graph.hop_dist(from, d).unwrap_or(u32::MAX), d))
                .expect("neighbor set has anchors"),
        };
        if let Some(from) = prev_entry {
            let path = graph
                .hop_path(from, entry_idx)
                .ok_or_else(|| Error::Invalid("sets are not hop-connected".into()))?;
            for &idx in path.iter().skip(1) {
                walk_nodes.push(graph.node_of(idx));
            }
        }
        let sub = traverse_neighbor_set(instance, graph, &cover, set, graph.node_of(entry_idx))?;
        let depot_visits = sub.iter().filter(|&&v| instance.is_depot(v)).count();
        set_recharges[set_pos] = depot_visits.saturating_sub(1);
        if prev_entry.is_some() {
            walk_nodes.extend(sub.iter().skip(1));
        } else {
            walk_nodes.extend(sub.iter());
        }
        prev_entry = Some(entry_idx);
    }

    let solution = Solution::assemble(instance, "approx", Walk::from_nodes(instance, walk_nodes))?;
    let mut gs_edges = Vec::new();
    for i in 0..sets.len() {
        for j in (i + 1)..sets.len() {
            gs_edges.push(GsEdge {
                from: i,
                to: j,
                weight: gs.weights[i][j],
            });
        }
    }
    let diag = ComponentDiagnostics {
        depots: component.iter().map(|&q| instance.external_id(q)).collect(),
        segments: cover.to_document(instance),
        neighbor_sets: sets.iter().map(|s| s.segment_indices.clone()).collect(),
        gs_edges,
        tsp_order: order,
        set_recharges,
        set_sizes: sets.iter().map(|s| s.segment_indices.len()).collect(),
    };
    Ok((solution, diag, matching == MatchingMode::Greedy))
}
