//! Small shared graph helpers: union-find and deterministic Kruskal.

pub(crate) struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub fn find(&mut self, x: usize) -> usize {
        let mut root = x;
        while self.parent[root] != root {
            root = self.parent[root];
        }
        let mut cur = x;
        while self.parent[cur] != root {
            let next = self.parent[cur];
            self.parent[cur] = root;
            cur = next;
        }
        root
    }

    /// Returns true if the two elements were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        true
    }

}

/// Weighted edge between local indices, ordered by (weight, a, b) so that
/// ties resolve deterministically.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Edge {
    pub w: f64,
    pub a: usize,
    pub b: usize,
}

pub(crate) fn sort_edges(edges: &mut [Edge]) {
    edges.sort_by(|x, y| {
        x.w.partial_cmp(&y.w)
            .unwrap()
            .then(x.a.cmp(&y.a))
            .then(x.b.cmp(&y.b))
    });
}

/// Minimum spanning forest over `n` local nodes with weights from `w`,
/// restricted to edges accepted by `allow`. Returns the chosen edges in
/// the order Kruskal accepted them.
pub(crate) fn kruskal<W, A>(n: usize, w: W, allow: A) -> Vec<Edge>
where
    W: Fn(usize, usize) -> f64,
    A: Fn(f64) -> bool,
{
    let mut edges = Vec::with_capacity(n * (n.saturating_sub(1)) / 2);
    for a in 0..n {
        for b in (a + 1)..n {
            let weight = w(a, b);
            if allow(weight) {
                edges.push(Edge { w: weight, a, b });
            }
        }
    }
    sort_edges(&mut edges);
    let mut uf = UnionFind::new(n);
    let mut out = Vec::with_capacity(n.saturating_sub(1));
    for e in edges {
        if uf.union(e.a, e.b) {
            out.push(e);
            if out.len() + 1 == n {
                break;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn union_find_components() {
        let mut uf = UnionFind::new(5);
        assert!(uf.union(0, 1));
        assert!(uf.union(3, 4));
        assert!(!uf.union(1, 0));
        assert_eq!(uf.find(0), uf.find(1));
        assert_ne!(uf.find(0), uf.find(3));
    }

    #[test]
    fn kruskal_line_graph() {
        // 4 points on a line spaced 1, 1, 5: MST keeps all three gaps.
        let xs: [f64; 4] = [0.0, 1.0, 2.0, 7.0];
        let edges = kruskal(4, |a, b| (xs[a] - xs[b]).abs(), |_| true);
        assert_eq!(edges.len(), 3);
        let total: f64 = edges.iter().map(|e| e.w).sum();
        assert_eq!(total, 7.0);
    }

    #[test]
    fn kruskal_respects_allow_filter() {
        let xs: [f64; 4] = [0.0, 1.0, 2.0, 7.0];
        let edges = kruskal(4, |a, b| (xs[a] - xs[b]).abs(), |w| w <= 2.0);
        // The length-5 gap is excluded, leaving a 3+1 forest.
        assert_eq!(edges.len(), 2);
    }
}
