//! Processor coupling graphs and hop-distance matrices.

use std::collections::VecDeque;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TopologyKind {
    Linear,
    Ring,
    Grid,
    Star,
}

impl TopologyKind {
    pub const ALL: [TopologyKind; 4] = [
        TopologyKind::Linear,
        TopologyKind::Ring,
        TopologyKind::Grid,
        TopologyKind::Star,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TopologyKind::Linear => "linear",
            TopologyKind::Ring => "ring",
            TopologyKind::Grid => "grid",
            TopologyKind::Star => "star",
        }
    }
}

impl fmt::Display for TopologyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for TopologyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown topology `{s}`")))
    }
}

/// Undirected coupling map. Edges are stored as `(min, max)` pairs, sorted.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CouplingGraph {
    n: usize,
    edges: Vec<(usize, usize)>,
    neighbors: Vec<Vec<usize>>,
}

impl CouplingGraph {
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut list = Vec::new();
        for (a, b) in edges {
            if a == b || a >= n || b >= n {
                return Err(Error::InvalidParameter(format!(
                    "bad coupling edge ({a}, {b}) for {n} qubits"
                )));
            }
            list.push((a.min(b), a.max(b)));
        }
        list.sort_unstable();
        list.dedup();
        let mut neighbors = vec![Vec::new(); n];
        for &(a, b) in &list {
            neighbors[a].push(b);
            neighbors[b].push(a);
        }
        for nb in neighbors.iter_mut() {
            nb.sort_unstable();
        }
        Ok(Self {
            n,
            edges: list,
            neighbors,
        })
    }

    pub fn build(kind: TopologyKind, n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter(format!(
                "topology needs at least 2 qubits, got {n}"
            )));
        }
        let path = (0..n - 1).map(|i| (i, i + 1));
        match kind {
            TopologyKind::Linear => Self::from_edges(n, path),
            TopologyKind::Ring => Self::from_edges(n, path.chain(std::iter::once((n - 1, 0)))),
            TopologyKind::Star => Self::from_edges(n, (1..n).map(|i| (0, i))),
            TopologyKind::Grid => {
                let (_, cols) = grid_shape(n);
                let mut edges = Vec::new();
                for q in 0..n {
                    if (q + 1) % cols != 0 && q + 1 < n {
                        edges.push((q, q + 1));
                    }
                    if q + cols < n {
                        edges.push((q, q + cols));
                    }
                }
                Self::from_edges(n, edges)
            }
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, q: usize) -> &[usize] {
        &self.neighbors[q]
    }

    pub fn contains_edge(&self, a: usize, b: usize) -> bool {
        self.neighbors[a].binary_search(&b).is_ok()
    }

    pub fn degree(&self, q: usize) -> usize {
        self.neighbors[q].len()
    }

    /// All-pairs hop distances by one breadth-first search per source.
    pub fn distance_matrix(&self) -> Result<DistanceMatrix> {
        let n = self.n;
        let mut dist = vec![u32::MAX; n * n];
        let mut queue = VecDeque::with_capacity(n);
        for src in 0..n {
            let row = &mut dist[src * n..(src + 1) * n];
            row[src] = 0;
            queue.clear();
            queue.push_back(src);
            while let Some(u) = queue.pop_front() {
                let du = row[u];
                for &v in &self.neighbors[u] {
                    if row[v] == u32::MAX {
                        row[v] = du + 1;
                        queue.push_back(v);
                    }
                }
            }
            if row.contains(&u32::MAX) {
                return Err(Error::Disconnected);
            }
        }
        Ok(DistanceMatrix { n, dist })
    }

    /// Vertices of one shortest path from `a` to `b`, both ends included.
    pub fn shortest_path(&self, dist: &DistanceMatrix, a: usize, b: usize) -> Vec<usize> {
        let mut path = vec![a];
        let mut cur = a;
        while cur != b {
            let d = dist.get(cur, b);
            cur = *self.neighbors[cur]
                .iter()
                .find(|&&v| dist.get(v, b) + 1 == d)
                .expect("connected graph has a descending neighbor");
            path.push(cur);
        }
        path
    }
}

/// `(rows, cols)` with `rows = floor(sqrt(n))`, `cols = ceil(n / rows)`.
pub fn grid_shape(n: usize) -> (usize, usize) {
    let mut rows = (n as f64).sqrt() as usize;
    while rows * rows > n {
        rows -= 1;
    }
    while (rows + 1) * (rows + 1) <= n {
        rows += 1;
    }
    let rows = rows.max(1);
    (rows, n.div_ceil(rows))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistanceMatrix {
    n: usize,
    dist: Vec<u32>,
}

impl DistanceMatrix {
    #[inline]
    pub fn get(&self, a: usize, b: usize) -> u32 {
        self.dist[a * self.n + b]
    }

    pub fn size(&self) -> usize {
        self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ring_and_star_edges() {
        let g = CouplingGraph::build(TopologyKind::Ring, 5).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
        let g = CouplingGraph::build(TopologyKind::Star, 4).unwrap();
        assert_eq!(g.edges(), &[(0, 1), (0, 2), (0, 3)]);
    }

    #[test]
    fn grid_shapes() {
        let g = CouplingGraph::build(TopologyKind::Grid, 100).unwrap();
        assert_eq!(grid_shape(100), (10, 10));
        assert_eq!(g.edges().len(), 180);
        assert_eq!(grid_shape(200), (14, 15));
        // 13 full rows of 15 and a partial row of 5
        let g = CouplingGraph::build(TopologyKind::Grid, 200).unwrap();
        assert_eq!(g.edges().len(), 13 * 14 + 4 + 12 * 15 + 5);
        assert!(g.distance_matrix().is_ok());
        for q in 0..100 {
            let (r, c) = (q / 10, q % 10);
            if (1..9).contains(&r) && (1..9).contains(&c) {
                assert_eq!(CouplingGraph::build(TopologyKind::Grid, 100).unwrap().degree(q), 4);
            }
        }
    }

    #[test]
    fn distances() {
        let d = CouplingGraph::build(TopologyKind::Star, 5)
            .unwrap()
            .distance_matrix()
            .unwrap();
        assert_eq!((d.get(1, 2), d.get(0, 3)), (2, 1));
        let d = CouplingGraph::build(TopologyKind::Linear, 6)
            .unwrap()
            .distance_matrix()
            .unwrap();
        assert_eq!(d.get(0, 5), 5);
        let d = CouplingGraph::build(TopologyKind::Ring, 10)
            .unwrap()
            .distance_matrix()
            .unwrap();
        assert_eq!(d.get(0, 6), 4);
    }

    #[test]
    fn ring_distance_formula() {
        for n in [3, 4, 7, 10, 31] {
            let d = CouplingGraph::build(TopologyKind::Ring, n)
                .unwrap()
                .distance_matrix()
                .unwrap();
            for i in 0..n {
                for j in 0..n {
                    let k = i.abs_diff(j);
                    assert_eq!(d.get(i, j) as usize, k.min(n - k));
                }
            }
        }
    }

    #[test]
    fn disconnected_and_invalid() {
        let g = CouplingGraph::from_edges(4, [(0, 1), (2, 3)]).unwrap();
        assert!(matches!(g.distance_matrix(), Err(Error::Disconnected)));
        assert!(CouplingGraph::from_edges(3, [(1, 1)]).is_err());
        assert!(CouplingGraph::build(TopologyKind::Linear, 1).is_err());
    }

    #[test]
    fn distance_matrix_metric_properties() {
        for kind in TopologyKind::ALL {
            for n in [2, 5, 9, 12, 30] {
                let g = CouplingGraph::build(kind, n).unwrap();
                let d = g.distance_matrix().unwrap();
                for a in 0..n {
                    assert_eq!(d.get(a, a), 0);
                    for b in 0..n {
                        assert_eq!(d.get(a, b), d.get(b, a));
                        if a != b {
                            assert!(d.get(a, b) >= 1);
                            assert_eq!(d.get(a, b) == 1, g.contains_edge(a, b));
                        }
                        for c in 0..n {
                            assert!(d.get(a, c) <= d.get(a, b) + d.get(b, c));
                        }
                    }
                }
                if kind == TopologyKind::Star {
                    assert!((0..n).all(|a| (0..n).all(|b| d.get(a, b) <= 2)));
                }
            }
        }
    }

    #[test]
    fn shortest_path_walks_edges() {
        let g = CouplingGraph::build(TopologyKind::Grid, 20).unwrap();
        let d = g.distance_matrix().unwrap();
        let p = g.shortest_path(&d, 0, 19);
        assert_eq!(p.len() as u32, d.get(0, 19) + 1);
        assert!(p.windows(2).all(|w| g.contains_edge(w[0], w[1])));
    }
}
