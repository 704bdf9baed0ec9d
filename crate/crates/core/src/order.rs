//! Low-difference orders on hypergraph edges.
//!
//! Given a hypergraph `(X, R)` of VC-dimension at most `d`, sample
//! `s = ceil(|R|^(1/d))` ground elements in random order and refine a
//! partition of `R` by membership of each sampled element. Every real split
//! contributes one *primary* tree edge between the two halves; at the end the
//! members of each surviving part (which agree on the whole sample) are
//! chained by *secondary* edges. A DFS preorder of the resulting spanning
//! tree (an Euler tour with repeats pruned) is an order whose consecutive
//! hyperedges differ little in total.
//!
//! Applied to the balls `{N^k[v]}` of a graph this yields vertex orders; the
//! weighted variant samples ground elements proportionally to a weight, which
//! is what the interval-encoded diameter algorithm needs.

use rand::seq::{index, SliceRandom};
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{ball_from_dist, bfs_distances, Graph};

/// Net constant used when the caller does not pick one.
pub const DEFAULT_ALPHA: f64 = 1.0;

/// The random sample driving one spanning-tree construction.
#[derive(Clone, Debug)]
pub struct NetSchedule {
    /// Target sample size `ceil(|R|^(1/d))`, capped at the ground-set size.
    pub sample_size: usize,
    /// Sampled ground elements in the order they are processed. Weighted
    /// schedules map sampled copies back to their element and keep only the
    /// first occurrence, so this may be shorter than `sample_size`.
    pub sample: Vec<usize>,
    /// `s_k = s / 2^k` for `k = 0..=floor(log2 s)`; the prefixes of `sample`
    /// of these lengths are the nested nets used in the cost analysis.
    pub prefix_sizes: Vec<usize>,
    /// `2 * alpha * log2|X| / s`.
    pub epsilon: f64,
    pub alpha: f64,
}

fn sample_size(num_edges: usize, d: u32) -> usize {
    let s = (num_edges as f64).powf(1.0 / d as f64).ceil() as usize;
    // Guard against powf landing a hair above an exact integer root.
    if s > 1 && (s - 1).checked_pow(d).is_some_and(|p| p >= num_edges) {
        s - 1
    } else {
        s.max(1)
    }
}

impl NetSchedule {
    /// Uniform sample, without replacement, of a ground set `0..ground_size`.
    pub fn uniform<R: Rng + ?Sized>(
        num_edges: usize,
        ground_size: usize,
        d: u32,
        alpha: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_d(d)?;
        if ground_size == 0 {
            return Err(Error::InvalidArgument("empty ground set".into()));
        }
        let s = sample_size(num_edges, d).min(ground_size);
        let mut all: Vec<usize> = (0..ground_size).collect();
        let (picked, _) = all.partial_shuffle(rng, s);
        Ok(Self::finish(picked.to_vec(), s, ground_size as f64, alpha))
    }

    /// Sample of the ground set in which element `x` appears `weights[x]`
    /// times; copies are drawn without replacement.
    pub fn weighted<R: Rng + ?Sized>(
        num_edges: usize,
        weights: &[u64],
        d: u32,
        alpha: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_d(d)?;
        if let Some(x) = weights.iter().position(|&w| w == 0) {
            return Err(Error::InvalidArgument(format!(
                "weight of element {x} must be positive"
            )));
        }
        let prefix: Vec<u64> = weights
            .iter()
            .scan(0u64, |acc, &w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        let total = *prefix
            .last()
            .ok_or_else(|| Error::InvalidArgument("empty ground set".into()))?;
        let total_usize = usize::try_from(total)
            .map_err(|_| Error::InvalidArgument("total weight overflows usize".into()))?;
        let s = sample_size(num_edges, d).min(total_usize);
        let mut copies = index::sample(rng, total_usize, s).into_vec();
        copies.shuffle(rng);
        let mut seen = vec![false; weights.len()];
        let sample = copies
            .into_iter()
            .map(|c| prefix.partition_point(|&p| p <= c as u64))
            .filter(|&x| !std::mem::replace(&mut seen[x], true))
            .collect();
        Ok(Self::finish(sample, s, total as f64, alpha))
    }

    fn finish(sample: Vec<usize>, s: usize, ground: f64, alpha: f64) -> Self {
        let levels = usize::BITS - s.max(1).leading_zeros();
        let prefix_sizes = (0..levels).map(|k| s >> k).collect();
        Self {
            sample_size: s,
            sample,
            prefix_sizes,
            epsilon: 2.0 * alpha * ground.log2().max(1.0) / s.max(1) as f64,
            alpha,
        }
    }
}

fn check_d(d: u32) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum EdgeKind {
    /// Added when a sampled element split a part.
    Primary,
    /// Joins two members of a final part.
    Secondary,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct TreeEdge {
    pub a: usize,
    pub b: usize,
    pub kind: EdgeKind,
}

/// Partition of hyperedge ids into parts that agree on every sampled element
/// processed so far.
#[derive(Clone, Debug)]
pub struct ComponentPartition {
    component_of: Vec<u32>,
    members: Vec<Vec<u32>>,
}

impl ComponentPartition {
    fn single(num_edges: usize) -> Self {
        Self {
            component_of: vec![0; num_edges],
            members: vec![(0..num_edges as u32).collect()],
        }
    }

    pub fn component_of(&self, edge: usize) -> usize {
        self.component_of[edge] as usize
    }

    pub fn components(&self) -> impl Iterator<Item = &[u32]> {
        self.members.iter().map(Vec::as_slice)
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// Splits every part by membership in `containing`; returns the primary
    /// edges `(smallest outside, smallest inside)` added for real splits.
    fn split(&mut self, containing: &[usize], inside: &mut [bool]) -> Vec<TreeEdge> {
        let mut touched: Vec<u32> = containing.iter().map(|&e| self.component_of[e]).collect();
        touched.sort_unstable();
        touched.dedup();
        for &e in containing {
            inside[e] = true;
        }
        let mut added = Vec::new();
        for c in touched {
            let (ins, outs): (Vec<u32>, Vec<u32>) =
                self.members[c as usize].iter().partition(|&&e| inside[e as usize]);
            if outs.is_empty() {
                continue;
            }
            added.push(TreeEdge {
                a: outs[0] as usize,
                b: ins[0] as usize,
                kind: EdgeKind::Primary,
            });
            let new_id = self.members.len() as u32;
            for &e in &ins {
                self.component_of[e as usize] = new_id;
            }
            self.members[c as usize] = outs;
            self.members.push(ins);
        }
        for &e in containing {
            inside[e] = false;
        }
        added
    }
}

/// A spanning tree over hyperedge ids together with the sample that built it.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub num_nodes: usize,
    pub edges: Vec<TreeEdge>,
    pub schedule: NetSchedule,
    pub partition: ComponentPartition,
}

/// Builds a spanning tree over `num_edges` hyperedges with a fresh uniform
/// schedule over the ground set `0..ground_size`.
///
/// `membership(x)` must list the ids of all hyperedges containing `x`.
pub fn build_spanning_tree<R, F>(
    membership: F,
    num_edges: usize,
    ground_size: usize,
    d: u32,
    rng: &mut R,
) -> Result<SpanningTree>
where
    R: Rng + ?Sized,
    F: FnMut(usize) -> Result<Vec<usize>>,
{
    if num_edges == 0 {
        return Err(Error::InvalidArgument("hypergraph has no hyperedges".into()));
    }
    let schedule = NetSchedule::uniform(num_edges, ground_size, d, DEFAULT_ALPHA, rng)?;
    build_spanning_tree_with_schedule(membership, num_edges, schedule)
}

pub fn build_spanning_tree_with_schedule<F>(
    mut membership: F,
    num_edges: usize,
    schedule: NetSchedule,
) -> Result<SpanningTree>
where
    F: FnMut(usize) -> Result<Vec<usize>>,
{
    if num_edges == 0 {
        return Err(Error::InvalidArgument("hypergraph has no hyperedges".into()));
    }
    let mut partition = ComponentPartition::single(num_edges);
    let mut inside = vec![false; num_edges];
    let mut edges = Vec::with_capacity(num_edges - 1);
    for &x in &schedule.sample {
        let mut containing = membership(x)?;
        if let Some(&bad) = containing.iter().find(|&&e| e >= num_edges) {
            return Err(Error::InvalidArgument(format!(
                "membership oracle returned hyperedge {bad} >= {num_edges}"
            )));
        }
        containing.sort_unstable();
        containing.dedup();
        edges.extend(partition.split(&containing, &mut inside));
    }
    for part in &partition.members {
        let mut sorted = part.clone();
        sorted.sort_unstable();
        edges.extend(sorted.windows(2).map(|w| TreeEdge {
            a: w[0] as usize,
            b: w[1] as usize,
            kind: EdgeKind::Secondary,
        }));
    }
    debug_assert_eq!(edges.len(), num_edges - 1);
    Ok(SpanningTree {
        num_nodes: num_edges,
        edges,
        schedule,
        partition,
    })
}

/// A permutation of hyperedge (or vertex) ids.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeOrder {
    pub order: Vec<usize>,
    /// `sum |R_i xor R_{i+1}|` when the caller measured it.
    pub total_difference: Option<u64>,
}

impl EdgeOrder {
    pub fn identity(n: usize) -> Self {
        Self {
            order: (0..n).collect(),
            total_difference: None,
        }
    }

    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }

    /// `position[id]` = index of `id` in the order.
    pub fn positions(&self) -> Vec<usize> {
        let mut pos = vec![0; self.order.len()];
        for (i, &id) in self.order.iter().enumerate() {
            pos[id] = i;
        }
        pos
    }

    pub fn is_permutation(&self) -> bool {
        let mut seen = vec![false; self.order.len()];
        self.order
            .iter()
            .all(|&id| id < seen.len() && !std::mem::replace(&mut seen[id], true))
    }
}

/// Euler tour of a tree from `root`, keeping only the first visit of each
/// node (i.e. a DFS preorder, children in ascending id).
pub fn euler_order(num_nodes: usize, tree: &[TreeEdge], root: usize) -> Result<EdgeOrder> {
    if num_nodes == 0 || root >= num_nodes {
        return Err(Error::NotATree(format!(
            "root {root} out of range for {num_nodes} nodes"
        )));
    }
    if tree.len() != num_nodes - 1 {
        return Err(Error::NotATree(format!(
            "{} edges on {num_nodes} nodes",
            tree.len()
        )));
    }
    let mut adj = vec![Vec::new(); num_nodes];
    for e in tree {
        if e.a >= num_nodes || e.b >= num_nodes || e.a == e.b {
            return Err(Error::NotATree(format!("bad edge ({}, {})", e.a, e.b)));
        }
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    for list in &mut adj {
        list.sort_unstable_by(|a, b| b.cmp(a));
    }
    let mut visited = vec![false; num_nodes];
    let mut order = Vec::with_capacity(num_nodes);
    let mut stack = vec![root];
    while let Some(u) = stack.pop() {
        if std::mem::replace(&mut visited[u], true) {
            continue;
        }
        order.push(u);
        stack.extend(adj[u].iter().copied().filter(|&w| !visited[w]));
    }
    if order.len() != num_nodes {
        return Err(Error::NotATree("edges do not connect all nodes".into()));
    }
    Ok(EdgeOrder {
        order,
        total_difference: None,
    })
}

/// Unpruned Euler tour (each tree edge walked twice), for comparing against
/// the pruned order.
pub fn euler_tour_unpruned(num_nodes: usize, tree: &[TreeEdge], root: usize) -> Vec<usize> {
    let mut adj = vec![Vec::new(); num_nodes];
    for e in tree {
        adj[e.a].push(e.b);
        adj[e.b].push(e.a);
    }
    for list in &mut adj {
        list.sort_unstable();
    }
    let mut tour = vec![root];
    let mut stack: Vec<(usize, usize, usize)> = vec![(root, usize::MAX, 0)];
    while let Some(&mut (u, parent, ref mut next)) = stack.last_mut() {
        if let Some(&w) = adj[u][*next..].iter().find(|&&w| w != parent) {
            *next = adj[u].iter().position(|&x| x == w).unwrap() + 1;
            tour.push(w);
            stack.push((w, u, 0));
        } else {
            stack.pop();
            if let Some(&(p, _, _)) = stack.last() {
                tour.push(p);
            }
        }
    }
    tour
}

/// Vertex order for the ball family `{N^k[v]}` of an abstract graph given
/// only through a ball oracle. `ball(x)` must return `N^k[x]`, which, by
/// symmetry of distances, is exactly the set of balls containing `x`.
///
/// `weights` (one positive weight per vertex, or `None` for all ones) select
/// the weighted variant.
pub fn vertex_order_with_oracle<R, F>(
    n: usize,
    weights: Option<&[u64]>,
    d: u32,
    rng: &mut R,
    ball: F,
) -> Result<EdgeOrder>
where
    R: Rng + ?Sized,
    F: FnMut(usize) -> Result<Vec<usize>>,
{
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let schedule = match weights {
        Some(w) => {
            if w.len() != n {
                return Err(Error::InvalidArgument(format!(
                    "{} weights for {n} vertices",
                    w.len()
                )));
            }
            NetSchedule::weighted(n, w, d, DEFAULT_ALPHA, rng)?
        }
        None => NetSchedule::uniform(n, n, d, DEFAULT_ALPHA, rng)?,
    };
    let tree = build_spanning_tree_with_schedule(ball, n, schedule)?;
    euler_order(n, &tree.edges, 0)
}

fn bfs_ball_oracle(g: &Graph, k: u32) -> impl FnMut(usize) -> Result<Vec<usize>> + '_ {
    move |x| Ok(ball_from_dist(&bfs_distances(g, x)?.dist, k))
}

/// Order under which consecutive `k`-balls of `g` differ little in total.
pub fn order_by_k_neighborhoods<R: Rng + ?Sized>(
    g: &Graph,
    k: u32,
    d: u32,
    rng: &mut R,
) -> Result<EdgeOrder> {
    check_radius(k)?;
    vertex_order_with_oracle(g.vertex_count(), None, d, rng, bfs_ball_oracle(g, k))
}

/// Order keeping `sum_x weight(x) * |I(N^k[x])|` small.
pub fn weighted_order<R: Rng + ?Sized>(
    g: &Graph,
    k: u32,
    d: u32,
    weights: &[u64],
    rng: &mut R,
) -> Result<EdgeOrder> {
    check_radius(k)?;
    vertex_order_with_oracle(g.vertex_count(), Some(weights), d, rng, bfs_ball_oracle(g, k))
}

fn check_radius(k: u32) -> Result<()> {
    if k == 0 {
        return Err(Error::InvalidArgument("radius must be at least 1".into()));
    }
    Ok(())
}

/// Size of the symmetric difference of two sorted, deduplicated slices.
pub fn sym_diff_len(a: &[usize], b: &[usize]) -> usize {
    let (mut i, mut j, mut common) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                common += 1;
                i += 1;
                j += 1;
            }
        }
    }
    a.len() + b.len() - 2 * common
}

/// `sum_i |S(order[i]) xor S(order[i+1])|` for sorted sets `S`.
pub fn total_difference<S, F>(order: &[usize], mut set_of: F) -> u64
where
    S: AsRef<[usize]>,
    F: FnMut(usize) -> S,
{
    let mut total = 0u64;
    let mut prev: Option<S> = None;
    for &id in order {
        let cur = set_of(id);
        if let Some(p) = &prev {
            total += sym_diff_len(p.as_ref(), cur.as_ref()) as u64;
        }
        prev = Some(cur);
    }
    total
}
