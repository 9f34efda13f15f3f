//! Desk-scale exact solvers used as oracles: optimal walk length, optimal
//! recharge count, optimal tours and minimum segment-cover size. All of
//! them are exponential-time searches with hard size limits; they exist to
//! validate the polynomial solvers, not to scale.

use std::collections::{BinaryHeap, HashMap};
use std::time::Instant;

use crate::error::{Error, Result};
use crate::instance::{Instance, NodeId};
use crate::walk::{Solution, Walk};

/// Limits for the state-space searches.
#[derive(Debug, Clone)]
pub struct ExactLimits {
    pub max_vertices: usize,
    pub deadline: Option<Instant>,
    /// Disable only to cross-check that pruning never changes the result.
    pub dominance: bool,
}

impl Default for ExactLimits {
    fn default() -> Self {
        ExactLimits {
            max_vertices: 10,
            deadline: None,
            dominance: true,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Objective {
    Length,
    Recharges,
}

#[derive(Debug, Clone, Copy)]
struct StateRec {
    mask: u32,
    node: NodeId,
    charge: f64,
    cost: f64,
    recharges: usize,
    parent: usize,
}

/// Heap entry ordered by (primary, secondary, insertion id) ascending.
struct HeapEntry {
    primary: f64,
    secondary: f64,
    id: usize,
    state: usize,
}

impl PartialEq for HeapEntry {
    fn eq(&self, other: &Self) -> bool {
        self.primary == other.primary && self.secondary == other.secondary && self.id == other.id
    }
}
impl Eq for HeapEntry {}
impl PartialOrd for HeapEntry {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for HeapEntry {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        // Reversed so the BinaryHeap pops the smallest first.
        other
            .primary
            .partial_cmp(&self.primary)
            .unwrap()
            .then(other.secondary.partial_cmp(&self.secondary).unwrap())
            .then(other.id.cmp(&self.id))
    }
}

fn dominated(a: &[f64; 3], b: &[f64; 3]) -> bool {
    a[0] <= b[0] && a[1] <= b[1] && a[2] <= b[2]
}

/// Best-first search over (visited set, current node, charge used).
fn search(instance: &Instance, limits: &ExactLimits, objective: Objective) -> Result<Solution> {
    let tag = match objective {
        Objective::Length => "exact",
        Objective::Recharges => "exact-recharges",
    };
    let start_time = Instant::now();
    let tasks = instance.tasks();
    let n_tasks = tasks.len();
    if n_tasks > limits.max_vertices {
        return Err(Error::SizeExceeded {
            what: "exact search",
            limit: limits.max_vertices,
            actual: n_tasks,
        });
    }
    if n_tasks > 25 {
        return Err(Error::SizeExceeded {
            what: "exact search bitmask",
            limit: 25,
            actual: n_tasks,
        });
    }
    if instance.depots().is_empty() {
        return Err(Error::Invalid("instance has no depots".into()));
    }
    let tol = instance.tolerance();
    let budget = instance.discharge_time + tol;

    if n_tasks == 0 {
        let walk = Walk::from_nodes(instance, vec![instance.depots()[0]]);
        let mut sol = Solution::assemble(instance, tag, walk)?;
        sol.report.optimal = Some(true);
        sol.report.runtime_ms = start_time.elapsed().as_millis() as u64;
        return Ok(sol);
    }

    // Necessary reachability: every task must allow an out-and-back from
    // its nearest depot.
    for &v in tasks {
        let (_, d) = instance.nearest_depot(v)?;
        if 2.0 * d > budget {
            return Err(Error::Infeasible {
                vertex: Some(v),
                detail: format!(
                    "vertex needs {} to reach and leave its nearest depot, budget is {}",
                    2.0 * d,
                    instance.discharge_time
                ),
            });
        }
    }

    let nearest: HashMap<NodeId, f64> = tasks
        .iter()
        .map(|&v| (v, instance.nearest_depot(v).expect("non-empty depots").1))
        .collect();
    let full: u32 = (1u32 << n_tasks) - 1;

    let key_of = |s: &StateRec| -> [f64; 3] {
        match objective {
            Objective::Length => [s.cost, s.charge, 0.0],
            Objective::Recharges => [s.recharges as f64, s.cost, s.charge],
        }
    };
    let priority_of = |s: &StateRec| -> (f64, f64) {
        match objective {
            Objective::Length => (s.cost, 0.0),
            Objective::Recharges => (s.recharges as f64, s.cost),
        }
    };

    let mut arena: Vec<StateRec> = Vec::new();
    let mut heap: BinaryHeap<HeapEntry> = BinaryHeap::new();
    let mut frontier: HashMap<(u32, NodeId), Vec<[f64; 3]>> = HashMap::new();
    let mut counter = 0usize;
    let mut incumbent: Option<usize> = None;

    let push = |arena: &mut Vec<StateRec>,
                    heap: &mut BinaryHeap<HeapEntry>,
                    frontier: &mut HashMap<(u32, NodeId), Vec<[f64; 3]>>,
                    counter: &mut usize,
                    state: StateRec|
     -> Option<usize> {
        let key = key_of(&state);
        if limits.dominance {
            let entry = frontier.entry((state.mask, state.node)).or_default();
            if entry.iter().any(|e| dominated(e, &key)) {
                return None;
            }
            entry.retain(|e| !dominated(&key, e));
            entry.push(key);
        }
        let (primary, secondary) = priority_of(&state);
        arena.push(state);
        heap.push(HeapEntry {
            primary,
            secondary,
            id: *counter,
            state: arena.len() - 1,
        });
        *counter += 1;
        Some(arena.len() - 1)
    };

    for &q in instance.depots() {
        push(
            &mut arena,
            &mut heap,
            &mut frontier,
            &mut counter,
            StateRec {
                mask: 0,
                node: q,
                charge: 0.0,
                cost: 0.0,
                recharges: 0,
                parent: usize::MAX,
            },
        );
    }

    let mut pops = 0usize;
    let mut timed_out = false;
    let goal: Option<usize> = loop {
        let Some(entry) = heap.pop() else {
            break None;
        };
        pops += 1;
        if pops % 512 == 0 {
            if let Some(deadline) = limits.deadline {
                if Instant::now() >= deadline {
                    timed_out = true;
                    break incumbent;
                }
            }
        }
        let idx = entry.state;
        let state = arena[idx];
        if limits.dominance {
            // Skip entries strictly dominated since they were pushed.
            let key = key_of(&state);
            if let Some(list) = frontier.get(&(state.mask, state.node)) {
                if list
                    .iter()
                    .any(|e| dominated(e, &key) && e != &key)
                {
                    continue;
                }
            }
        }
        if state.mask == full && instance.is_depot(state.node) {
            break Some(idx);
        }

        // Move to an unvisited task, keeping an escape to a depot possible.
        for (i, &v) in tasks.iter().enumerate() {
            let bit = 1u32 << i;
            if state.mask & bit != 0 {
                continue;
            }
            let leg = instance.dist(state.node, v);
            if state.charge + leg + nearest[&v] <= budget {
                push(
                    &mut arena,
                    &mut heap,
                    &mut frontier,
                    &mut counter,
                    StateRec {
                        mask: state.mask | bit,
                        node: v,
                        charge: state.charge + leg,
                        cost: state.cost + leg,
                        recharges: state.recharges,
                        parent: idx,
                    },
                );
            }
        }
        // Move to any depot, resetting the charge.
        for &q in instance.depots() {
            if q == state.node {
                continue;
            }
            let leg = instance.dist(state.node, q);
            if state.charge + leg <= budget {
                let pushed = push(
                    &mut arena,
                    &mut heap,
                    &mut frontier,
                    &mut counter,
                    StateRec {
                        mask: state.mask,
                        node: q,
                        charge: 0.0,
                        cost: state.cost + leg,
                        recharges: state.recharges + 1,
                        parent: idx,
                    },
                );
                // Goals can only be created here; remember the best one so
                // a timeout still yields a bound.
                if state.mask == full {
                    if let Some(new_idx) = pushed {
                        let better = match incumbent {
                            None => true,
                            Some(cur) => {
                                priority_of(&arena[new_idx]) < priority_of(&arena[cur])
                            }
                        };
                        if better {
                            incumbent = Some(new_idx);
                        }
                    }
                }
            }
        }
    };

    let Some(goal_idx) = goal else {
        if timed_out {
            return Err(Error::Invalid(
                "exact search hit its deadline before finding any feasible walk".into(),
            ));
        }
        return Err(Error::Infeasible {
            vertex: None,
            detail: "state space exhausted without covering all vertices".into(),
        });
    };

    let mut nodes = Vec::new();
    let mut cur = goal_idx;
    loop {
        nodes.push(arena[cur].node);
        if arena[cur].parent == usize::MAX {
            break;
        }
        cur = arena[cur].parent;
    }
    nodes.reverse();
    let walk = Walk::from_nodes(instance, nodes);
    let mut sol = Solution::assemble(instance, tag, walk)?;
    sol.report.optimal = Some(!timed_out);
    if timed_out {
        sol.report.notes.push("deadline reached: best-known walk, not proven optimal".into());
    }
    sol.report.runtime_ms = start_time.elapsed().as_millis() as u64;
    Ok(sol)
}

/// Optimal-length feasible walk visiting all task vertices.
pub fn exact_min_length(instance: &Instance, limits: &ExactLimits) -> Result<Solution> {
    search(instance, limits, Objective::Length)
}

/// Feasible walk with the fewest recharges, ties broken by length.
pub fn exact_min_recharges(instance: &Instance, limits: &ExactLimits) -> Result<Solution> {
    search(instance, limits, Objective::Recharges)
}

/// Optimal closed tour on a complete weight matrix with at most 9 nodes,
/// by Held-Karp subset DP. Returns the visiting order and its cyclic cost.
pub fn exact_tsp(w: &[Vec<f64>]) -> Result<(Vec<usize>, f64)> {
    let n = w.len();
    if n == 0 {
        return Err(Error::Invalid("empty graph".into()));
    }
    if n > 9 {
        return Err(Error::SizeExceeded {
            what: "exact tour",
            limit: 9,
            actual: n,
        });
    }
    if n == 1 {
        return Ok((vec![0], 0.0));
    }
    if n == 2 {
        return Ok((vec![0, 1], 2.0 * w[0][1]));
    }
    let full = (1usize << n) - 1;
    // dp[mask][last]: shortest path from node 0 over mask ending at last.
    let mut dp = vec![vec![f64::INFINITY; n]; full + 1];
    let mut parent = vec![vec![usize::MAX; n]; full + 1];
    dp[1][0] = 0.0;
    for mask in 1..=full {
        if mask & 1 == 0 {
            continue;
        }
        for last in 0..n {
            if mask & (1 << last) == 0 || !dp[mask][last].is_finite() {
                continue;
            }
            for next in 1..n {
                if mask & (1 << next) != 0 {
                    continue;
                }
                let cand = dp[mask][last] + w[last][next];
                let slot = &mut dp[mask | (1 << next)][next];
                if cand < *slot {
                    *slot = cand;
                    parent[mask | (1 << next)][next] = last;
                }
            }
        }
    }
    let mut best = (f64::INFINITY, usize::MAX);
    for last in 1..n {
        let total = dp[full][last] + w[last][0];
        if total < best.0 {
            best = (total, last);
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = full;
    let mut cur = best.1;
    while cur != usize::MAX {
        order.push(cur);
        let p = parent[mask][cur];
        mask &= !(1 << cur);
        cur = p;
    }
    order.reverse();
    debug_assert_eq!(order[0], 0);
    Ok((order, best.0))
}

/// Minimum number of feasible segments covering all task vertices, via
/// subset DP: a block is feasible when some depot-anchored ordering of it
/// fits the budget, and the cover is assembled from feasible blocks.
pub fn exact_segment_cover(instance: &Instance, max_vertices: usize) -> Result<usize> {
    let tasks = instance.tasks();
    let n = tasks.len();
    if n > max_vertices || n > 12 {
        return Err(Error::SizeExceeded {
            what: "exact segment cover",
            limit: max_vertices.min(12),
            actual: n,
        });
    }
    if n == 0 {
        return Ok(0);
    }
    if instance.depots().is_empty() {
        return Err(Error::Invalid("instance has no depots".into()));
    }
    let tol = instance.tolerance();
    let budget = instance.discharge_time + tol;
    let near: Vec<f64> = tasks
        .iter()
        .map(|&v| instance.nearest_depot(v).expect("depots non-empty").1)
        .collect();

    let full = (1usize << n) - 1;
    // Cheapest anchored traversal of each subset: shortest Hamiltonian
    // path over the subset plus nearest-depot legs at both ends.
    let mut anchored = vec![f64::INFINITY; full + 1];
    for s in 0..n {
        let mut dp = vec![vec![f64::INFINITY; n]; full + 1];
        dp[1 << s][s] = 0.0;
        for mask in 1..=full {
            if mask & (1 << s) == 0 {
                continue;
            }
            for last in 0..n {
                if mask & (1 << last) == 0 || !dp[mask][last].is_finite() {
                    continue;
                }
                let total = near[s] + dp[mask][last] + near[last];
                if total < anchored[mask] {
                    anchored[mask] = total;
                }
                for next in 0..n {
                    if mask & (1 << next) != 0 {
                        continue;
                    }
                    let cand = dp[mask][last] + instance.dist(tasks[last], tasks[next]);
                    let slot = &mut dp[mask | (1 << next)][next];
                    if cand < *slot {
                        *slot = cand;
                    }
                }
            }
        }
    }

    let mut cover = vec![usize::MAX; full + 1];
    cover[0] = 0;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut sub = mask;
        while sub != 0 {
            if sub & low != 0 && anchored[sub] <= budget && cover[mask & !sub] != usize::MAX {
                cover[mask] = cover[mask].min(1 + cover[mask & !sub]);
            }
            sub = (sub - 1) & mask;
        }
        if mask == full && cover[mask] == usize::MAX {
            return Err(Error::Infeasible {
                vertex: None,
                detail: "no feasible segment partition exists".into(),
            });
        }
    }
    Ok(cover[full])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{build_from_points, DepotSelection, WeightMode};
    use crate::walk::{validate_walk, walk_cost};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn inst(pts: &[(f64, f64)], depots: Vec<u32>, d: f64) -> Instance {
        build_from_points("x", pts, &DepotSelection::Explicit(depots), d, 0.0, WeightMode::Real)
            .unwrap()
    }

    #[test]
    fn single_vertex_out_and_back() {
        let i = inst(&[(0.0, 0.0), (3.0, 0.0)], vec![1], 10.0);
        let sol = exact_min_length(&i, &ExactLimits::default()).unwrap();
        assert_eq!(sol.report.cost, 6.0);
        assert_eq!(sol.report.recharges, 1);
        assert_eq!(sol.report.optimal, Some(true));
    }

    #[test]
    fn empty_task_set_is_trivial() {
        let i = inst(&[(0.0, 0.0), (1.0, 0.0)], vec![1, 2], 10.0);
        let sol = exact_min_length(&i, &ExactLimits::default()).unwrap();
        assert_eq!(sol.report.cost, 0.0);
        assert_eq!(sol.report.recharges, 0);
    }

    #[test]
    fn symmetric_pair_matches_enumeration() {
        // Two vertices symmetric about one depot, both fitting one span.
        let i = inst(&[(0.0, 0.0), (-2.0, 0.0), (2.0, 0.0)], vec![1], 10.0);
        let sol = exact_min_length(&i, &ExactLimits::default()).unwrap();
        let brute = brute_force_best(&i, Objective::Length).unwrap();
        assert!((sol.report.cost - brute.0).abs() < 1e-9);
        assert_eq!(sol.report.cost, 8.0); // down-and-back via the depot
    }

    #[test]
    fn unreachable_vertex_reports_certificate() {
        let i = inst(&[(0.0, 0.0), (6.0, 0.0)], vec![1], 10.0);
        match exact_min_length(&i, &ExactLimits::default()) {
            Err(Error::Infeasible { vertex, .. }) => assert_eq!(vertex, Some(1)),
            other => panic!("expected infeasibility, got {other:?}"),
        }
    }

    #[test]
    fn two_far_clusters_need_two_recharges() {
        // Tasks at (-2,0) and (6,0) with depots at 0 and 10: no single
        // battery span strings both tasks together (every depot-to-depot
        // ordering through both exceeds 10), but two spans joined at one
        // depot do, e.g. q2 -> t2 -> q1 -> t1 -> q1.
        let i = inst(
            &[(0.0, 0.0), (10.0, 0.0), (-2.0, 0.0), (6.0, 0.0)],
            vec![1, 2],
            10.0,
        );
        let sol = exact_min_recharges(&i, &ExactLimits::default()).unwrap();
        assert_eq!(sol.report.recharges, 2);
        let brute = brute_force_best(&i, Objective::Recharges).unwrap();
        assert_eq!(sol.report.recharges, brute.1);
    }

    #[test]
    fn size_limit_is_enforced() {
        let pts: Vec<(f64, f64)> = (0..13).map(|k| (k as f64, 0.0)).collect();
        let i = inst(&pts, vec![1], 100.0);
        let err = exact_min_length(
            &i,
            &ExactLimits {
                max_vertices: 10,
                ..Default::default()
            },
        )
        .unwrap_err();
        assert!(matches!(err, Error::SizeExceeded { .. }));
    }

    #[test]
    fn exact_tsp_small_cases() {
        let w = vec![vec![0.0, 4.0], vec![4.0, 0.0]];
        assert_eq!(exact_tsp(&w).unwrap().1, 8.0);

        // Unit square: optimal cyclic cost 4 (verified by enumerating the
        // three distinct tours).
        let pts = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)];
        let w: Vec<Vec<f64>> = (0..4)
            .map(|i| {
                (0..4)
                    .map(|j| {
                        let dx: f64 = pts[i].0 - pts[j].0;
                        let dy: f64 = pts[i].1 - pts[j].1;
                        (dx * dx + dy * dy).sqrt()
                    })
                    .collect()
            })
            .collect();
        let (_, cost) = exact_tsp(&w).unwrap();
        assert!((cost - 4.0).abs() < 1e-9);

        // Triangle: the unique tour.
        let w = vec![
            vec![0.0, 1.0, 2.0],
            vec![1.0, 0.0, 2.5],
            vec![2.0, 2.5, 0.0],
        ];
        let (order, cost) = exact_tsp(&w).unwrap();
        assert_eq!(order.len(), 3);
        assert!((cost - 5.5).abs() < 1e-9);
    }

    #[test]
    fn segment_cover_examples() {
        // One coverable vertex: one segment.
        let i = inst(&[(0.0, 0.0), (3.0, 0.0)], vec![1], 10.0);
        assert_eq!(exact_segment_cover(&i, 8).unwrap(), 1);

        // Two vertices jointly coverable by one depot-to-depot path.
        let i = inst(
            &[(0.0, 0.0), (9.0, 0.0), (3.0, 0.0), (6.0, 0.0)],
            vec![1, 2],
            10.0,
        );
        assert_eq!(exact_segment_cover(&i, 8).unwrap(), 1);

        // Two clusters far apart: two segments.
        let i = inst(
            &[(0.0, 0.0), (50.0, 0.0), (2.0, 0.0), (48.0, 0.0)],
            vec![1, 2],
            10.0,
        );
        assert_eq!(exact_segment_cover(&i, 8).unwrap(), 2);
    }

    // ------------------------------------------------------------------
    // Brute-force oracle: enumerate task visit orders and depot insertion
    // patterns, evaluate each candidate walk with the shared validator.
    // Limited to |V| <= 5 and |Q| <= 2.
    // ------------------------------------------------------------------

    fn permutations(items: &[NodeId]) -> Vec<Vec<NodeId>> {
        if items.is_empty() {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for (i, &x) in items.iter().enumerate() {
            let mut rest = items.to_vec();
            rest.remove(i);
            for mut p in permutations(&rest) {
                p.insert(0, x);
                out.push(p);
            }
        }
        out
    }

    /// Depot chains of length 0..=len without repetition.
    fn depot_chains(depots: &[NodeId], allow_empty: bool) -> Vec<Vec<NodeId>> {
        let mut out = Vec::new();
        if allow_empty {
            out.push(vec![]);
        }
        for &q in depots {
            out.push(vec![q]);
        }
        if depots.len() >= 2 {
            for &a in depots {
                for &b in depots {
                    if a != b {
                        out.push(vec![a, b]);
                    }
                }
            }
        }
        out
    }

    fn brute_force_best(instance: &Instance, objective: Objective) -> Option<(f64, usize)> {
        let tasks = instance.tasks();
        let depots = instance.depots();
        assert!(tasks.len() <= 5 && depots.len() <= 2);
        let mut best: Option<(f64, usize)> = None;
        let boundary = depot_chains(depots, false);
        let interior = depot_chains(depots, true);

        for perm in permutations(tasks) {
            let gaps = perm.len() + 1;
            let mut choice = vec![0usize; gaps];
            loop {
                let mut nodes: Vec<NodeId> = Vec::new();
                for (g, &c) in choice.iter().enumerate() {
                    let chain = if g == 0 || g == gaps - 1 {
                        &boundary[c % boundary.len()]
                    } else {
                        &interior[c % interior.len()]
                    };
                    nodes.extend(chain.iter().copied());
                    if g < perm.len() {
                        nodes.push(perm[g]);
                    }
                }
                let walk = Walk::from_nodes(instance, nodes);
                if validate_walk(instance, &walk).unwrap().is_feasible() {
                    let (cost, recharges) = walk_cost(instance, &walk);
                    let better = match (objective, best) {
                        (_, None) => true,
                        (Objective::Length, Some((bc, _))) => cost < bc - 1e-12,
                        (Objective::Recharges, Some((bc, br))) => {
                            recharges < br || (recharges == br && cost < bc - 1e-12)
                        }
                    };
                    if better {
                        best = Some((cost, recharges));
                    }
                }
                // Advance the mixed-radix counter over gap choices.
                let mut g = 0;
                loop {
                    if g == gaps {
                        break;
                    }
                    let base = if g == 0 || g == gaps - 1 {
                        boundary.len()
                    } else {
                        interior.len()
                    };
                    choice[g] += 1;
                    if choice[g] < base {
                        break;
                    }
                    choice[g] = 0;
                    g += 1;
                }
                if g == gaps {
                    break;
                }
            }
        }
        best
    }

    #[test]
    fn search_matches_bruteforce_on_random_small_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for trial in 0..20 {
            let n_tasks = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=2);
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for _ in 0..(n_tasks + m) {
                pts.push((rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)));
            }
            let depot_ids: Vec<u32> = (1..=m as u32).collect();
            let built = build_from_points(
                "r",
                &pts,
                &DepotSelection::Explicit(depot_ids),
                14.0,
                0.0,
                WeightMode::Real,
            )
            .unwrap();
            let brute_len = brute_force_best(&built, Objective::Length);
            let exact_len = exact_min_length(&built, &ExactLimits::default());
            match (brute_len, exact_len) {
                (Some((bc, _)), Ok(sol)) => {
                    assert!(
                        (sol.report.cost - bc).abs() < 1e-9,
                        "trial {trial}: search {} vs brute {bc}",
                        sol.report.cost
                    );
                }
                (None, Err(e)) => assert!(e.is_infeasible(), "trial {trial}: {e}"),
                (b, e) => panic!("trial {trial}: disagreement brute={b:?} search={e:?}"),
            }

            let brute_r = brute_force_best(&built, Objective::Recharges);
            let exact_r = exact_min_recharges(&built, &ExactLimits::default());
            match (brute_r, exact_r) {
                (Some((bc, br)), Ok(sol)) => {
                    assert_eq!(sol.report.recharges, br, "trial {trial}");
                    assert!((sol.report.cost - bc).abs() < 1e-9, "trial {trial}");
                }
                (None, Err(e)) => assert!(e.is_infeasible()),
                (b, e) => panic!("trial {trial}: disagreement brute={b:?} search={e:?}"),
            }
        }
    }

    #[test]
    fn dominance_pruning_preserves_the_optimum() {
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..12 {
            let n_tasks = rng.gen_range(1..=4);
            let m = rng.gen_range(1..=2);
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for _ in 0..(n_tasks + m) {
                pts.push((rng.gen_range(0.0..8.0), rng.gen_range(0.0..8.0)));
            }
            let depot_ids: Vec<u32> = (1..=m as u32).collect();
            let built = build_from_points(
                "r",
                &pts,
                &DepotSelection::Explicit(depot_ids),
                12.0,
                0.0,
                WeightMode::Real,
            )
            .unwrap();
            let pruned = exact_min_length(&built, &ExactLimits::default());
            let unpruned = exact_min_length(
                &built,
                &ExactLimits {
                    dominance: false,
                    ..Default::default()
                },
            );
            match (pruned, unpruned) {
                (Ok(a), Ok(b)) => assert!((a.report.cost - b.report.cost).abs() < 1e-9),
                (Err(a), Err(b)) => assert_eq!(a.is_infeasible(), b.is_infeasible()),
                other => panic!("pruning changed the outcome: {other:?}"),
            }
        }
    }

    #[test]
    fn recharge_objective_never_uses_more_recharges_than_length_objective() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..15 {
            let n_tasks = rng.gen_range(1..=5);
            let m = rng.gen_range(1..=2);
            let mut pts: Vec<(f64, f64)> = Vec::new();
            for _ in 0..(n_tasks + m) {
                pts.push((rng.gen_range(0.0..10.0), rng.gen_range(0.0..10.0)));
            }
            let depot_ids: Vec<u32> = (1..=m as u32).collect();
            let built = build_from_points(
                "r",
                &pts,
                &DepotSelection::Explicit(depot_ids),
                15.0,
                0.0,
                WeightMode::Real,
            )
            .unwrap();
            if let (Ok(by_len), Ok(by_rec)) = (
                exact_min_length(&built, &ExactLimits::default()),
                exact_min_recharges(&built, &ExactLimits::default()),
            ) {
                assert!(by_rec.report.recharges <= by_len.report.recharges);
                assert!(by_len.report.cost <= by_rec.report.cost + 1e-9);
            }
        }
    }
}
