//! Tour construction on small complete metric graphs: Christofides
//! (spanning tree + minimum-weight perfect matching on the odd-degree
//! vertices + Eulerian shortcut) and a nearest-neighbor/2-opt fallback.

use crate::error::{Error, Result};
use crate::graph::{kruskal, sort_edges, Edge};

/// Odd-vertex count up to which the matching is solved exactly by subset
/// DP; beyond it a deterministic greedy matching is used instead.
pub const EXACT_MATCHING_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatchingMode {
    Exact,
    Greedy,
}

impl MatchingMode {
    pub fn as_str(self) -> &'static str {
        match self {
            MatchingMode::Exact => "exact",
            MatchingMode::Greedy => "greedy",
        }
    }
}

/// Verify symmetry, zero diagonal, nonnegativity and the triangle
/// inequality (with a small relative slack).
pub fn check_metric(w: &[Vec<f64>]) -> Result<()> {
    let n = w.len();
    let mut scale = 1.0f64;
    for row in w {
        if row.len() != n {
            return Err(Error::Invalid("weight matrix is not square".into()));
        }
        for &x in row {
            if !x.is_finite() || x < 0.0 {
                return Err(Error::Invalid(format!("bad weight {x}")));
            }
            scale = scale.max(x);
        }
    }
    let tol = 1e-9 * scale;
    for i in 0..n {
        if w[i][i] != 0.0 {
            return Err(Error::Invalid(format!("nonzero diagonal at {i}")));
        }
        for j in 0..n {
            if (w[i][j] - w[j][i]).abs() > tol {
                return Err(Error::Invalid(format!("asymmetric weights at ({i},{j})")));
            }
            for k in 0..n {
                if w[i][k] > w[i][j] + w[j][k] + tol {
                    return Err(Error::Invalid(format!(
                        "triangle inequality violated at ({i},{j},{k})"
                    )));
                }
            }
        }
    }
    Ok(())
}

/// Cyclic cost of a tour given as a permutation of node indices.
pub fn tour_cost(w: &[Vec<f64>], order: &[usize]) -> f64 {
    if order.len() < 2 {
        return 0.0;
    }
    let mut cost = 0.0;
    for i in 0..order.len() {
        cost += w[order[i]][order[(i + 1) % order.len()]];
    }
    cost
}

/// Minimum-weight perfect matching by subset DP; `nodes.len()` must be
/// even and at most [`EXACT_MATCHING_LIMIT`].
fn exact_matching(w: &[Vec<f64>], nodes: &[usize]) -> Vec<(usize, usize)> {
    let k = nodes.len();
    debug_assert!(k % 2 == 0 && k <= EXACT_MATCHING_LIMIT);
    if k == 0 {
        return Vec::new();
    }
    let full = (1usize << k) - 1;
    let mut dp = vec![f64::INFINITY; full + 1];
    dp[0] = 0.0;
    for mask in 1..=full {
        if (mask as u32).count_ones() % 2 != 0 {
            continue;
        }
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut sub = rest;
        while sub != 0 {
            let j = sub.trailing_zeros() as usize;
            let prev = mask & !(1 << i) & !(1 << j);
            let cand = dp[prev] + w[nodes[i]][nodes[j]];
            if cand < dp[mask] {
                dp[mask] = cand;
            }
            sub &= sub - 1;
        }
    }
    // Reconstruct deterministically: at each step pair the lowest set bit
    // with the smallest partner achieving the optimum.
    let mut pairs = Vec::with_capacity(k / 2);
    let mut mask = full;
    while mask != 0 {
        let i = mask.trailing_zeros() as usize;
        let rest = mask & !(1 << i);
        let mut chosen = None;
        let mut sub = rest;
        while sub != 0 {
            let j = sub.trailing_zeros() as usize;
            let prev = mask & !(1 << i) & !(1 << j);
            if dp[prev] + w[nodes[i]][nodes[j]] <= dp[mask] + 1e-12 {
                chosen = Some(j);
                break;
            }
            sub &= sub - 1;
        }
        let j = chosen.expect("dp is consistent");
        pairs.push((nodes[i], nodes[j]));
        mask &= !(1 << i);
        mask &= !(1 << j);
    }
    pairs
}

/// Deterministic greedy matching: repeatedly take the cheapest remaining
/// pair, breaking ties by the lower index pair.
fn greedy_matching(w: &[Vec<f64>], nodes: &[usize]) -> Vec<(usize, usize)> {
    let mut candidates: Vec<Edge> = Vec::new();
    for (ai, &a) in nodes.iter().enumerate() {
        for &b in nodes.iter().skip(ai + 1) {
            candidates.push(Edge { w: w[a][b], a, b });
        }
    }
    sort_edges(&mut candidates);
    let mut matched = std::collections::BTreeSet::new();
    let mut pairs = Vec::with_capacity(nodes.len() / 2);
    for e in candidates {
        if !matched.contains(&e.a) && !matched.contains(&e.b) {
            matched.insert(e.a);
            matched.insert(e.b);
            pairs.push((e.a, e.b));
        }
    }
    pairs
}

/// Christofides' tour on a complete metric graph. Returns the visiting
/// order and which matching implementation was used. With the exact
/// matching the tour cost is within 1.5x of the optimum.
pub fn christofides(w: &[Vec<f64>]) -> Result<(Vec<usize>, MatchingMode)> {
    let n = w.len();
    if n == 0 {
        return Err(Error::Invalid("empty graph".into()));
    }
    check_metric(w)?;
    if n == 1 {
        return Ok((vec![0], MatchingMode::Exact));
    }
    if n == 2 {
        return Ok((vec![0, 1], MatchingMode::Exact));
    }

    let mst = kruskal(n, |a, b| w[a][b], |_| true);
    let mut degree = vec![0usize; n];
    for e in &mst {
        degree[e.a] += 1;
        degree[e.b] += 1;
    }
    let odd: Vec<usize> = (0..n).filter(|&v| degree[v] % 2 == 1).collect();
    let (pairs, mode) = if odd.len() <= EXACT_MATCHING_LIMIT {
        (exact_matching(w, &odd), MatchingMode::Exact)
    } else {
        (greedy_matching(w, &odd), MatchingMode::Greedy)
    };

    // Eulerian multigraph: MST edges plus matching edges.
    let mut edges: Vec<(usize, usize)> = mst.iter().map(|e| (e.a, e.b)).collect();
    edges.extend(pairs);
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (id, &(a, b)) in edges.iter().enumerate() {
        adj[a].push((b, id));
        adj[b].push((a, id));
    }
    for list in &mut adj {
        list.sort_unstable();
    }

    // Hierholzer circuit from node 0.
    let mut used = vec![false; edges.len()];
    let mut ptr = vec![0usize; n];
    let mut stack = vec![0usize];
    let mut circuit = Vec::with_capacity(edges.len() + 1);
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

    // Shortcut repeated vertices, keeping first occurrences.
    let mut seen = vec![false; n];
    let mut tour = Vec::with_capacity(n);
    for &v in &circuit {
        if !seen[v] {
            seen[v] = true;
            tour.push(v);
        }
    }
    debug_assert_eq!(tour.len(), n);
    Ok((tour, mode))
}

/// Nearest-neighbor construction from node 0 followed by deterministic
/// best-improvement 2-opt.
pub fn nearest_neighbor_two_opt(w: &[Vec<f64>]) -> Vec<usize> {
    let n = w.len();
    if n == 0 {
        return Vec::new();
    }
    let mut tour = Vec::with_capacity(n);
    let mut used = vec![false; n];
    let mut cur = 0usize;
    used[0] = true;
    tour.push(0);
    for _ in 1..n {
        let mut best: Option<(f64, usize)> = None;
        for v in 0..n {
            if used[v] {
                continue;
            }
            let d = w[cur][v];
            let better = match best {
                None => true,
                Some((bd, bv)) => d < bd || (d == bd && v < bv),
            };
            if better {
                best = Some((d, v));
            }
        }
        let (_, v) = best.unwrap();
        used[v] = true;
        tour.push(v);
        cur = v;
    }

    // 2-opt until no strictly improving move remains.
    let mut improved = true;
    while improved {
        improved = false;
        let mut best: Option<(f64, usize, usize)> = None;
        for i in 0..n.saturating_sub(1) {
            for j in (i + 2)..n {
                if i == 0 && j == n - 1 {
                    continue;
                }
                let (a, b) = (tour[i], tour[i + 1]);
                let (c, d) = (tour[j], tour[(j + 1) % n]);
                let delta = w[a][c] + w[b][d] - w[a][b] - w[c][d];
                if delta < -1e-12 {
                    let better = match best {
                        None => true,
                        Some((bd, _, _)) => delta < bd,
                    };
                    if better {
                        best = Some((delta, i, j));
                    }
                }
            }
        }
        if let Some((_, i, j)) = best {
            tour[i + 1..=j].reverse();
            improved = true;
        }
    }
    tour
}
