//! Small simple graphs (at most 64 vertices) stored as adjacency bitmasks,
//! with connected components and backtracking isomorphism search.

use std::collections::BTreeSet;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimpleGraph {
    adj: Vec<u64>,
}

impl SimpleGraph {
    pub fn new(n: usize) -> Self {
        assert!(n <= 64, "SimpleGraph supports at most 64 vertices");
        SimpleGraph { adj: vec![0; n] }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = SimpleGraph::new(n);
        for (a, b) in edges {
            g.add_edge(a, b);
        }
        g
    }

    pub fn len(&self) -> usize {
        self.adj.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adj.is_empty()
    }

    pub fn add_edge(&mut self, a: usize, b: usize) {
        assert_ne!(a, b, "no loops");
        self.adj[a] |= 1 << b;
        self.adj[b] |= 1 << a;
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a] >> b & 1 == 1
    }

    pub fn degree(&self, v: usize) -> u32 {
        self.adj[v].count_ones()
    }

    pub fn neighbours(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        let mask = self.adj[v];
        (0..self.adj.len()).filter(move |&u| mask >> u & 1 == 1)
    }

    pub fn edges(&self) -> BTreeSet<(usize, usize)> {
        (0..self.len())
            .flat_map(|a| self.neighbours(a).filter(move |&b| a < b).map(move |b| (a, b)))
            .collect()
    }

    /// Induced subgraph on `vertices`, relabelled `0..vertices.len()` in the given order.
    pub fn induced(&self, vertices: &[usize]) -> SimpleGraph {
        let mut g = SimpleGraph::new(vertices.len());
        for (i, &a) in vertices.iter().enumerate() {
            for (j, &b) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(a, b) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }

    /// Disjoint union; `other`'s vertices are shifted by `self.len()`.
    pub fn disjoint_union(&self, other: &SimpleGraph) -> SimpleGraph {
        let shift = self.len();
        let mut g = SimpleGraph::new(shift + other.len());
        for (a, b) in self.edges() {
            g.add_edge(a, b);
        }
        for (a, b) in other.edges() {
            g.add_edge(a + shift, b + shift);
        }
        g
    }

    /// Connected components, each sorted, ordered by smallest vertex.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut out = Vec::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            let mut comp = vec![start];
            seen[start] = true;
            let mut k = 0;
            while k < comp.len() {
                let v = comp[k];
                for u in self.neighbours(v) {
                    if !seen[u] {
                        seen[u] = true;
                        comp.push(u);
                    }
                }
                k += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    fn degree_sequence(&self) -> Vec<u32> {
        let mut d: Vec<u32> = (0..self.len()).map(|v| self.degree(v)).collect();
        d.sort_unstable();
        d
    }

    /// Finds `φ` with `self.has_edge(a, b) ⟺ other.has_edge(φ[a], φ[b])`.
    pub fn isomorphism_to(&self, other: &SimpleGraph) -> Option<Vec<usize>> {
        if self.len() != other.len() || self.degree_sequence() != other.degree_sequence() {
            return None;
        }
        let n = self.len();
        // most constrained vertices first
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by_key(|&v| std::cmp::Reverse(self.degree(v)));
        let mut map = vec![usize::MAX; n];
        let mut used = 0u64;
        if self.extend(other, &order, 0, &mut map, &mut used) {
            Some(map)
        } else {
            None
        }
    }

    fn extend(
        &self,
        other: &SimpleGraph,
        order: &[usize],
        depth: usize,
        map: &mut [usize],
        used: &mut u64,
    ) -> bool {
        if depth == order.len() {
            return true;
        }
        let v = order[depth];
        for cand in 0..other.len() {
            if *used >> cand & 1 == 1 || other.degree(cand) != self.degree(v) {
                continue;
            }
            let consistent = order[..depth]
                .iter()
                .all(|&u| self.has_edge(u, v) == other.has_edge(map[u], cand));
            if !consistent {
                continue;
            }
            map[v] = cand;
            *used |= 1 << cand;
            if self.extend(other, order, depth + 1, map, used) {
                return true;
            }
            *used &= !(1 << cand);
            map[v] = usize::MAX;
        }
        false
    }

    pub fn is_isomorphic(&self, other: &SimpleGraph) -> bool {
        self.isomorphism_to(other).is_some()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: usize) -> SimpleGraph {
        SimpleGraph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn cycles_relabelled_are_isomorphic() {
        let c5 = cycle(5);
        let shuffled = SimpleGraph::from_edges(5, [(0, 2), (2, 4), (4, 1), (1, 3), (3, 0)]);
        let phi = c5.isomorphism_to(&shuffled).unwrap();
        for (a, b) in c5.edges() {
            assert!(shuffled.has_edge(phi[a], phi[b]));
        }
    }

    #[test]
    fn same_degrees_different_graphs() {
        // C6 vs two triangles: both 2-regular on 6 vertices
        let c6 = cycle(6);
        let triangles = cycle(3).disjoint_union(&cycle(3));
        assert!(!c6.is_isomorphic(&triangles));
        assert_eq!(triangles.components(), vec![vec![0, 1, 2], vec![3, 4, 5]]);
    }

    #[test]
    fn induced_subgraph() {
        let g = cycle(5).induced(&[0, 1, 2]);
        assert_eq!(g.edges(), [(0, 1), (1, 2)].into_iter().collect());
    }
}
