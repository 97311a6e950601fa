use std::collections::BTreeSet;

use crate::graph::SimpleGraph;

/// A flag complex on `0..n`, stored by its incompatible pairs. Faces are the
/// cliques of the compatibility graph.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FlagComplex {
    n: usize,
    non_edges: BTreeSet<(usize, usize)>,
}

impl FlagComplex {
    /// Pairs are normalised to `(min, max)`.
    pub fn new(n: usize, non_edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let non_edges = non_edges
            .into_iter()
            .map(|(a, b)| (a.min(b), a.max(b)))
            .collect();
        FlagComplex { n, non_edges }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn non_edges(&self) -> &BTreeSet<(usize, usize)> {
        &self.non_edges
    }

    pub fn compatible(&self, i: usize, j: usize) -> bool {
        i != j && !self.non_edges.contains(&(i.min(j), i.max(j)))
    }

    /// First incompatible pair in `set` (lexicographically), if any.
    pub fn incompatible_pair(&self, set: &[usize]) -> Option<(usize, usize)> {
        let mut sorted = set.to_vec();
        sorted.sort_unstable();
        for (k, &a) in sorted.iter().enumerate() {
            for &b in &sorted[k + 1..] {
                if self.non_edges.contains(&(a, b)) {
                    return Some((a, b));
                }
            }
        }
        None
    }

    pub fn is_face(&self, set: &[usize]) -> bool {
        self.incompatible_pair(set).is_none()
    }

    /// `W_S`: vertices outside `S` compatible with every element of `S`.
    pub fn link_vertices(&self, set: &[usize]) -> Vec<usize> {
        (0..self.n)
            .filter(|v| !set.contains(v))
            .filter(|&v| set.iter().all(|&s| self.compatible(s, v)))
            .collect()
    }

    pub fn incompatibility_graph(&self) -> SimpleGraph {
        SimpleGraph::from_edges(self.n, self.non_edges.iter().copied())
    }

    pub fn compatibility_graph(&self) -> SimpleGraph {
        let mut g = SimpleGraph::new(self.n);
        for a in 0..self.n {
            for b in (a + 1)..self.n {
                if self.compatible(a, b) {
                    g.add_edge(a, b);
                }
            }
        }
        g
    }

    /// Maximal cliques of the compatibility graph (Bron–Kerbosch with pivoting).
    pub fn maximal_faces(&self) -> Vec<Vec<usize>> {
        let g = self.compatibility_graph();
        let adj: Vec<u64> = (0..self.n)
            .map(|v| g.neighbours(v).fold(0u64, |m, u| m | 1 << u))
            .collect();
        let mut out = Vec::new();
        let all = if self.n == 64 { u64::MAX } else { (1u64 << self.n) - 1 };
        bron_kerbosch(&adj, 0, all, 0, &mut out);
        let mut faces: Vec<Vec<usize>> = out
            .into_iter()
            .map(|m| (0..self.n).filter(|&v| m >> v & 1 == 1).collect())
            .collect();
        faces.sort();
        faces
    }

    /// Every face, including the empty one, in lexicographic order.
    pub fn faces(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new()];
        let mut stack: Vec<Vec<usize>> = vec![Vec::new()];
        while let Some(face) = stack.pop() {
            let start = face.last().map_or(0, |&l| l + 1);
            for v in start..self.n {
                if face.iter().all(|&f| self.compatible(f, v)) {
                    let mut next = face.clone();
                    next.push(v);
                    out.push(next.clone());
                    stack.push(next);
                }
            }
        }
        out.sort();
        out
    }

    pub fn dimension(&self) -> usize {
        self.maximal_faces().iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn is_pure(&self) -> bool {
        let faces = self.maximal_faces();
        faces.windows(2).all(|w| w[0].len() == w[1].len())
    }
}

fn bron_kerbosch(adj: &[u64], r: u64, mut p: u64, mut x: u64, out: &mut Vec<u64>) {
    if p == 0 {
        if x == 0 {
            out.push(r);
        }
        return;
    }
    let pivot = (p | x).trailing_zeros() as usize;
    let mut candidates = p & !adj[pivot];
    while candidates != 0 {
        let v = candidates.trailing_zeros() as usize;
        candidates &= candidates - 1;
        bron_kerbosch(adj, r | 1 << v, p & adj[v], x & adj[v], out);
        p &= !(1 << v);
        x |= 1 << v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square() -> FlagComplex {
        // vertices 1..4 of the square's normal fan, 0-based
        FlagComplex::new(4, [(0, 1), (2, 3)])
    }

    #[test]
    fn faces_of_square() {
        let sq = square();
        assert_eq!(
            sq.maximal_faces(),
            vec![vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3]]
        );
        assert_eq!(sq.faces().len(), 1 + 4 + 4);
        assert!(sq.is_pure());
        assert_eq!(sq.dimension(), 2);
    }

    #[test]
    fn link_of_vertex() {
        // the link of {3} (1-based) is {{1},{2}}
        assert_eq!(square().link_vertices(&[2]), vec![0, 1]);
    }

    #[test]
    fn certificate_is_first_pair() {
        assert_eq!(square().incompatible_pair(&[3, 2, 0]), Some((2, 3)));
        assert_eq!(square().incompatible_pair(&[0, 3]), None);
    }
}
