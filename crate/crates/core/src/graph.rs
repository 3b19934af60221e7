//! Simple undirected graphs and the construction shapes used by the game.
//!
//! Vertex numbering for the tagged shapes is fixed:
//!
//! * planar construction: `u = 0`, `v = 1`, outer pair `i` is
//!   `(x_i, y_i) = (2 + 2i, 3 + 2i)`;
//! * book `B_{d,m}`: clique vertices `0..d`, outer vertex `i` is `d + i`;
//! * complete multipartite `K_n^(m)`: vertex `(i, k)` (row `i < n`, part
//!   `k < m`) is `i * m + k`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::vec::Vec;

use crate::{HatError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Shape {
    Generic,
    /// Central pair plus `m` outer pairs, played with `q` colors.
    PlanarConstruction {
        q: u32,
        m: usize,
    },
    /// Central `d`-clique plus `m` outer vertices.
    Book {
        d: usize,
        m: usize,
    },
    /// `m` parts of `n` vertices each.
    Multipartite {
        n: usize,
        m: usize,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<Vec<usize>>,
    shape: Shape,
}

impl Graph {
    /// Builds a generic graph, rejecting loops, duplicate edges and
    /// out-of-range endpoints.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adj = alloc::vec![Vec::new(); n];
        let mut seen = BTreeSet::new();
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(HatError::invalid(format!("edge ({a},{b}) out of range for n={n}")));
            }
            if a == b {
                return Err(HatError::invalid(format!("self-loop at {a}")));
            }
            if !seen.insert((a.min(b), a.max(b))) {
                return Err(HatError::invalid(format!("duplicate edge ({a},{b})")));
            }
            adj[a].push(b);
            adj[b].push(a);
        }
        for row in &mut adj {
            row.sort_unstable();
        }
        Ok(Graph {
            n,
            adj,
            shape: Shape::Generic,
        })
    }

    /// Builds a graph and checks that the edge set is exactly the one the
    /// shape tag describes.
    pub fn with_shape(n: usize, edges: &[(usize, usize)], shape: Shape) -> Result<Self> {
        let mut g = Graph::new(n, edges)?;
        if shape != Shape::Generic {
            let canonical = Graph::from_shape(shape)?;
            if canonical.n != g.n || canonical.adj != g.adj {
                return Err(HatError::invalid(format!("edge set does not match shape {shape:?}")));
            }
        }
        g.shape = shape;
        Ok(g)
    }

    pub fn from_shape(shape: Shape) -> Result<Self> {
        match shape {
            Shape::Generic => Err(HatError::invalid("generic shape has no canonical edge set")),
            Shape::PlanarConstruction { q, m } => Ok(Graph::planar_construction(q, m)),
            Shape::Book { d, m } => Ok(Graph::book(d, m)),
            Shape::Multipartite { n, m } => Ok(Graph::multipartite(n, m)),
        }
    }

    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: alloc::vec![Vec::new(); n],
            shape: Shape::Generic,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..n {
            for b in a + 1..n {
                edges.push((a, b));
            }
        }
        Graph::new(n, &edges).expect("complete graph is simple")
    }

    pub fn planar_construction(q: u32, m: usize) -> Self {
        let mut edges = alloc::vec![(0, 1)];
        for i in 0..m {
            let (x, y) = (2 + 2 * i, 3 + 2 * i);
            edges.extend_from_slice(&[(0, x), (0, y), (1, x), (1, y), (x, y)]);
        }
        let mut g = Graph::new(2 + 2 * m, &edges).expect("construction is simple");
        g.shape = Shape::PlanarConstruction { q, m };
        g
    }

    pub fn book(d: usize, m: usize) -> Self {
        let mut edges = Vec::new();
        for a in 0..d {
            for b in a + 1..d {
                edges.push((a, b));
            }
            for o in 0..m {
                edges.push((a, d + o));
            }
        }
        let mut g = Graph::new(d + m, &edges).expect("book is simple");
        g.shape = Shape::Book { d, m };
        g
    }

    pub fn multipartite(n: usize, m: usize) -> Self {
        let idx = |i: usize, k: usize| i * m + k;
        let mut edges = Vec::new();
        for i in 0..n {
            for k in 0..m {
                for i2 in 0..n {
                    for k2 in 0..m {
                        if k2 != k && idx(i, k) < idx(i2, k2) {
                            edges.push((idx(i, k), idx(i2, k2)));
                        }
                    }
                }
            }
        }
        let mut g = Graph::new(n * m, &edges).expect("multipartite graph is simple");
        g.shape = Shape::Multipartite { n, m };
        g
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    /// Neighbours of `v` in ascending order.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.adj[a].binary_search(&b).is_ok()
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(Vec::len).sum::<usize>() / 2
    }

    /// Edges `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adj
            .iter()
            .enumerate()
            .flat_map(|(a, row)| row.iter().filter(move |&&b| b > a).map(move |&b| (a, b)))
    }
}
