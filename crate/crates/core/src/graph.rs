//! Network topologies: complete graphs, complete graphs with a missing
//! link, chains, and the multi-path family joining two antipodal vertices.
//!
//! Graphs are simple and undirected, stored as a normalized edge set over
//! 0-indexed vertices. They are immutable after construction and cheap to
//! share across workers.

use std::collections::{BTreeSet, VecDeque};

use crate::error::{Error, Result};

/// Simple undirected graph: vertex count plus a set of unordered edges.
///
/// Edges are normalized to `(min, max)` pairs; self-loops and duplicates
/// are rejected at construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: BTreeSet<(usize, usize)>,
}

/// Shortest-path distance between two vertices together with the number of
/// distinct shortest paths realizing it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeodesicCount {
    /// Shortest-path length in edges.
    pub distance: usize,
    /// Number of distinct geodesics; at least 1 when connected.
    pub count: u64,
}

impl Graph {
    /// Complete graph on `n` vertices: every pair adjacent.
    pub fn complete(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSize {
                n,
                reason: "complete graph needs at least one vertex",
            });
        }
        let mut edges = BTreeSet::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.insert((i, j));
            }
        }
        Ok(Self { n, edges })
    }

    /// Complete graph on `n` vertices with the single edge `{i, j}` removed.
    pub fn complete_minus_edge(n: usize, i: usize, j: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::InvalidSize {
                n,
                reason: "missing-link graph needs at least three vertices",
            });
        }
        if i == j {
            return Err(Error::InvalidPair { v: i });
        }
        check_vertex(i, n)?;
        check_vertex(j, n)?;
        let mut g = Self::complete(n)?;
        g.edges.remove(&normalize(i, j));
        Ok(g)
    }

    /// Path (linear chain) on `n` vertices: edges `{k, k+1}`.
    pub fn path(n: usize) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSize {
                n,
                reason: "path needs at least one vertex",
            });
        }
        let edges = (0..n.saturating_sub(1)).map(|k| (k, k + 1)).collect();
        Ok(Self { n, edges })
    }

    /// Multi-path graph: two antipodal vertices joined by `l` internally
    /// disjoint paths, each with `n - 2` internal vertices (so each path is
    /// as long as an `n`-vertex chain). Total vertex count `2 + (n-2)*l`.
    ///
    /// Vertex layout: antipodal vertices are `0` and `1 + (n-2)*l`; path `p`
    /// uses internal vertices `p*(n-2) + 1 ..= (p+1)*(n-2)` in chain order.
    /// `theta(1, n)` is exactly `path(n)`.
    pub fn theta(l: usize, n: usize) -> Result<Self> {
        if l < 1 {
            return Err(Error::InvalidParameter {
                what: format!("theta needs l >= 1, got l = {l}"),
            });
        }
        if n < 3 {
            return Err(Error::InvalidParameter {
                what: format!("theta needs n >= 3, got n = {n}"),
            });
        }
        let internal = n - 2;
        let total = 2 + internal * l;
        let sink = total - 1;
        let mut edges = BTreeSet::new();
        for p in 0..l {
            let first = p * internal + 1;
            let last = (p + 1) * internal;
            edges.insert(normalize(0, first));
            for v in first..last {
                edges.insert((v, v + 1));
            }
            edges.insert(normalize(last, sink));
        }
        Ok(Self { n: total, edges })
    }

    /// The antipodal (input, output) pair of `theta(l, n)` under the vertex
    /// layout used by [`Graph::theta`].
    pub fn theta_antipodes(l: usize, n: usize) -> (usize, usize) {
        (0, 1 + (n - 2) * l)
    }

    /// Graph with exactly the given edges. Pairs are normalized; self-loops,
    /// duplicates and out-of-range endpoints are rejected.
    pub fn from_edge_list(n: usize, pairs: &[(usize, usize)]) -> Result<Self> {
        if n < 1 {
            return Err(Error::InvalidSize {
                n,
                reason: "graph needs at least one vertex",
            });
        }
        let mut edges = BTreeSet::new();
        for &(i, j) in pairs {
            if i == j {
                return Err(Error::SelfLoop { i, j });
            }
            check_vertex(i, n)?;
            check_vertex(j, n)?;
            if !edges.insert(normalize(i, j)) {
                return Err(Error::DuplicateEdge { i, j });
            }
        }
        Ok(Self { n, edges })
    }

    /// Parse the edge-list text format: first non-comment line is `n`,
    /// each following line is `i j`; `#` starts a comment.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut n: Option<usize> = None;
        let mut pairs = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(pos) => &raw[..pos],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let lineno = idx + 1;
            if n.is_none() {
                let v = line.parse::<usize>().map_err(|e| Error::EdgeListParse {
                    line: lineno,
                    what: format!("vertex count: {e}"),
                })?;
                n = Some(v);
                continue;
            }
            let mut it = line.split_whitespace();
            let (a, b) = (it.next(), it.next());
            if it.next().is_some() {
                return Err(Error::EdgeListParse {
                    line: lineno,
                    what: "expected exactly two vertex indices".into(),
                });
            }
            match (a, b) {
                (Some(a), Some(b)) => {
                    let i = a.parse::<usize>().map_err(|e| Error::EdgeListParse {
                        line: lineno,
                        what: format!("vertex index: {e}"),
                    })?;
                    let j = b.parse::<usize>().map_err(|e| Error::EdgeListParse {
                        line: lineno,
                        what: format!("vertex index: {e}"),
                    })?;
                    pairs.push((i, j));
                }
                _ => {
                    return Err(Error::EdgeListParse {
                        line: lineno,
                        what: "expected `i j`".into(),
                    })
                }
            }
        }
        let n = n.ok_or(Error::EdgeListParse {
            line: 0,
            what: "missing vertex count line".into(),
        })?;
        Self::from_edge_list(n, &pairs)
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        i != j && self.edges.contains(&normalize(i, j))
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges
            .iter()
            .filter(|&&(a, b)| a == v || b == v)
            .count()
    }

    /// Edges as normalized `(min, max)` pairs in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    /// Adjacency lists for all vertices.
    pub fn adjacency_lists(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for &(i, j) in &self.edges {
            adj[i].push(j);
            adj[j].push(i);
        }
        adj
    }

    /// Shortest-path distance and geodesic count between `i` and `j` by
    /// breadth-first search. Returns `(0, 1)` when `i == j`; errors when the
    /// two vertices are disconnected.
    pub fn count_geodesics(&self, i: usize, j: usize) -> Result<GeodesicCount> {
        check_vertex(i, self.n)?;
        check_vertex(j, self.n)?;
        if i == j {
            return Ok(GeodesicCount {
                distance: 0,
                count: 1,
            });
        }
        let adj = self.adjacency_lists();
        let mut dist = vec![usize::MAX; self.n];
        let mut count = vec![0u64; self.n];
        let mut queue = VecDeque::new();
        dist[i] = 0;
        count[i] = 1;
        queue.push_back(i);
        while let Some(u) = queue.pop_front() {
            if dist[u] >= dist[j] {
                // everything at or past j's level is already counted
                continue;
            }
            for &v in &adj[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    count[v] = count[u];
                    queue.push_back(v);
                } else if dist[v] == dist[u] + 1 {
                    count[v] += count[u];
                }
            }
        }
        if dist[j] == usize::MAX {
            return Err(Error::NoPath { i, j });
        }
        Ok(GeodesicCount {
            distance: dist[j],
            count: count[j],
        })
    }
}

fn normalize(i: usize, j: usize) -> (usize, usize) {
    (i.min(j), i.max(j))
}

fn check_vertex(v: usize, n: usize) -> Result<()> {
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, n });
    }
    Ok(())
}
