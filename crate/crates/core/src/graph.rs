//! Undirected unweighted graphs, BFS and the brute-force oracles every faster
//! algorithm in this crate is checked against.

use std::collections::{HashSet, VecDeque};
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Distance marker for vertices a BFS never reached.
pub const UNREACHABLE: u32 = u32::MAX;

/// Default vertex-count ceiling for [`distance_vc_shatter_check`].
pub const SHATTER_GUARD: usize = 16;

/// An undirected, unweighted simple graph on the dense vertex ids `0..n`.
///
/// Adjacency lists are sorted. Construction rejects self-loops, duplicate
/// edges and out-of-range endpoints; [`Graph::from_edges`] additionally
/// rejects disconnected input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adjacency: Vec<Vec<u32>>,
    edge_count: usize,
}

impl Graph {
    /// Builds a connected graph. Disconnected input is an error.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let g = Self::from_edges_unchecked_connectivity(n, edges)?;
        if !g.is_connected() {
            return Err(Error::Disconnected);
        }
        Ok(g)
    }

    /// Builds a graph that may be disconnected (e.g. a freshly materialized
    /// geometric instance that a generator is about to accept or reject).
    pub fn from_edges_unchecked_connectivity(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut adjacency = vec![Vec::new(); n];
        for &(u, v) in edges {
            for w in [u, v] {
                if w >= n {
                    return Err(Error::VertexOutOfRange { vertex: w, n });
                }
            }
            if u == v {
                return Err(Error::SelfLoop(u));
            }
            adjacency[u].push(v as u32);
            adjacency[v].push(u as u32);
        }
        for (u, list) in adjacency.iter_mut().enumerate() {
            list.sort_unstable();
            if let Some(w) = list.windows(2).find(|w| w[0] == w[1]) {
                let v = w[0] as usize;
                return Err(Error::DuplicateEdge(u.min(v), u.max(v)));
            }
        }
        Ok(Self {
            adjacency,
            edge_count: edges.len(),
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    /// Sorted neighbour ids of `v`.
    pub fn neighbors(&self, v: usize) -> &[u32] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    /// Every edge once, as `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency.iter().enumerate().flat_map(|(u, list)| {
            list.iter()
                .map(|&v| v as usize)
                .filter(move |&v| u < v)
                .map(move |v| (u, v))
        })
    }

    pub fn is_connected(&self) -> bool {
        if self.vertex_count() == 0 {
            return true;
        }
        bfs_raw(self, 0).iter().all(|&d| d != UNREACHABLE)
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.vertex_count(),
            });
        }
        Ok(())
    }

    /// Parses the edge-list format: a header line `n m`, then exactly `m`
    /// lines `u v` with 0-based endpoints. Blank trailing lines are allowed.
    pub fn parse_edge_list(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty());
        let (line_no, header) = lines.next().ok_or(Error::Parse {
            line: 1,
            msg: "missing header `n m`".into(),
        })?;
        let (n, m) = parse_pair(header, line_no)?;
        let mut edges = Vec::with_capacity(m);
        for (line_no, line) in lines {
            if edges.len() == m {
                return Err(Error::Parse {
                    line: line_no,
                    msg: format!("more than the declared {m} edges"),
                });
            }
            edges.push(parse_pair(line, line_no)?);
        }
        if edges.len() != m {
            return Err(Error::Parse {
                line: text.lines().count(),
                msg: format!("expected {m} edges, found {}", edges.len()),
            });
        }
        Self::from_edges(n, &edges)
    }

    /// Serializes in the edge-list format accepted by [`Graph::parse_edge_list`].
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.vertex_count(), self.edge_count());
        for (u, v) in self.edges() {
            let _ = writeln!(out, "{u} {v}");
        }
        out
    }
}

fn parse_pair(line: &str, line_no: usize) -> Result<(usize, usize)> {
    let err = |msg: String| Error::Parse { line: line_no, msg };
    let mut it = line.split_whitespace();
    let mut next = || -> Result<usize> {
        let tok = it.next().ok_or_else(|| err("expected two integers".into()))?;
        tok.parse()
            .map_err(|_| err(format!("`{tok}` is not a non-negative integer")))
    };
    let a = next()?;
    let b = next()?;
    if it.next().is_some() {
        return Err(err("trailing tokens".into()));
    }
    Ok((a, b))
}

/// Hop distances from a single source.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DistanceVector {
    pub source: usize,
    /// `dist[u]` is the hop count to `u`, or [`UNREACHABLE`].
    pub dist: Vec<u32>,
}

impl DistanceVector {
    /// Largest finite distance, `None` when some vertex is unreachable.
    pub fn eccentricity(&self) -> Option<u32> {
        self.dist
            .iter()
            .try_fold(0, |acc, &d| (d != UNREACHABLE).then(|| acc.max(d)))
    }
}

fn bfs_raw(g: &Graph, source: usize) -> Vec<u32> {
    let mut dist = vec![UNREACHABLE; g.vertex_count()];
    let mut queue = VecDeque::new();
    dist[source] = 0;
    queue.push_back(source);
    while let Some(u) = queue.pop_front() {
        for &w in g.neighbors(u) {
            let w = w as usize;
            if dist[w] == UNREACHABLE {
                dist[w] = dist[u] + 1;
                queue.push_back(w);
            }
        }
    }
    dist
}

/// BFS from `source`.
pub fn bfs_distances(g: &Graph, source: usize) -> Result<DistanceVector> {
    g.check_vertex(source)?;
    Ok(DistanceVector {
        source,
        dist: bfs_raw(g, source),
    })
}

/// Exact diameter by BFS from every vertex.
pub fn diameter_naive(g: &Graph) -> Result<u32> {
    (0..g.vertex_count()).try_fold(0, |acc, v| {
        let ecc = DistanceVector {
            source: v,
            dist: bfs_raw(g, v),
        }
        .eccentricity()
        .ok_or(Error::Disconnected)?;
        Ok(acc.max(ecc))
    })
}

/// `diam(g) <= k`, decided by all-pairs BFS.
pub fn k_diameter_naive(g: &Graph, k: u32) -> Result<bool> {
    Ok(diameter_naive(g)? <= k)
}

/// The closed ball `N^r[v]`, sorted ascending.
pub fn neighborhood(g: &Graph, v: usize, r: u32) -> Result<Vec<usize>> {
    g.check_vertex(v)?;
    Ok(ball_from_dist(&bfs_raw(g, v), r))
}

pub(crate) fn ball_from_dist(dist: &[u32], r: u32) -> Vec<usize> {
    dist.iter()
        .enumerate()
        .filter(|&(_, &d)| d <= r)
        .map(|(u, _)| u)
        .collect()
}

/// Size of the largest vertex subset (of size at most `max_subset`) shattered
/// by the ball hypergraph `{N^k[v] : v in V, 0 <= k < n}`.
///
/// Exhaustive; refuses graphs above [`SHATTER_GUARD`] vertices. Use
/// [`distance_vc_shatter_check_with_guard`] to raise the ceiling (up to 64).
pub fn distance_vc_shatter_check(g: &Graph, max_subset: usize) -> Result<usize> {
    distance_vc_shatter_check_with_guard(g, max_subset, SHATTER_GUARD)
}

pub fn distance_vc_shatter_check_with_guard(
    g: &Graph,
    max_subset: usize,
    guard: usize,
) -> Result<usize> {
    let n = g.vertex_count();
    if n > guard || n > 64 {
        return Err(Error::TooLarge {
            n,
            guard: guard.min(64),
        });
    }
    let balls = ball_masks(g);
    let mut best = 0;
    for size in 1..=max_subset.min(n) {
        if !subsets_of_size(n, size).any(|y| is_shattered(&balls, y)) {
            // Shattered sets are closed under taking subsets.
            break;
        }
        best = size;
    }
    Ok(best)
}

/// Distinct balls as bitmasks; radii past `n - 1` add nothing new.
fn ball_masks(g: &Graph) -> Vec<u64> {
    let n = g.vertex_count();
    let mut seen = HashSet::new();
    for v in 0..n {
        let dist = bfs_raw(g, v);
        for k in 0..n as u32 {
            let mask = dist
                .iter()
                .enumerate()
                .filter(|&(_, &d)| d <= k)
                .fold(0u64, |m, (u, _)| m | 1 << u);
            seen.insert(mask);
        }
    }
    let mut balls: Vec<u64> = seen.into_iter().collect();
    balls.sort_unstable();
    balls
}

fn is_shattered(balls: &[u64], y: u64) -> bool {
    let needed = 1usize << y.count_ones();
    let mut traces = HashSet::with_capacity(needed);
    for &b in balls {
        traces.insert(b & y);
        if traces.len() == needed {
            return true;
        }
    }
    false
}

/// All `size`-subsets of `0..n` as bitmasks (Gosper's hack).
fn subsets_of_size(n: usize, size: usize) -> impl Iterator<Item = u64> {
    let limit = if n == 64 { u64::MAX } else { (1u64 << n) - 1 };
    let first = if size == 0 { 0 } else { (1u64 << size) - 1 };
    let mut next = Some(first);
    std::iter::from_fn(move || {
        let cur = next?;
        next = if cur == 0 {
            None
        } else {
            let c = cur & cur.wrapping_neg();
            let r = cur.checked_add(c);
            r.and_then(|r| {
                let nxt = (((r ^ cur) >> 2) / c) | r;
                (nxt <= limit && nxt & !limit == 0).then_some(nxt)
            })
        };
        Some(cur)
    })
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::Graph;

    pub fn path(n: usize) -> Graph {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn cycle(n: usize) -> Graph {
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn complete(n: usize) -> Graph {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in u + 1..n {
                edges.push((u, v));
            }
        }
        Graph::from_edges(n, &edges).unwrap()
    }

    pub fn star(leaves: usize) -> Graph {
        let edges: Vec<_> = (1..=leaves).map(|i| (0, i)).collect();
        Graph::from_edges(leaves + 1, &edges).unwrap()
    }
}
