//! `k`-Diameter for graphs given only through a [`NeighbourSets`] structure.
//!
//! Balls of radius `r` are kept as a delta encoding: under a vertex order
//! `v_1, …, v_n`, `D_1 = N^r[v_1]` and `D_i = N^r[v_{i-1}] △ N^r[v_i]`, so
//! prefix XORs reconstruct every ball. One radius step turns the encoding
//! into persistent set handles for the `(r+1)`-balls (divide and conquer in
//! [`expand_balls`]), chooses a new order using BFS simulated on the
//! structure, and reads the new deltas back with `list_differences`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::{DistanceVector, UNREACHABLE};
use crate::nsds::{NeighbourSets, SetHandle};
use crate::order::vertex_order_with_oracle;

/// Sorted symmetric difference of several sorted sets.
pub fn xor_all<'a, I: IntoIterator<Item = &'a [usize]>>(sets: I) -> Vec<usize> {
    let mut all: Vec<usize> = sets.into_iter().flatten().copied().collect();
    all.sort_unstable();
    let mut out = Vec::with_capacity(all.len());
    let mut i = 0;
    while i < all.len() {
        let mut j = i;
        while j < all.len() && all[j] == all[i] {
            j += 1;
        }
        if (j - i) % 2 == 1 {
            out.push(all[i]);
        }
        i = j;
    }
    out
}

/// Ball family of one radius as consecutive differences.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DeltaEncoding {
    pub radius: u32,
    pub order: Vec<usize>,
    /// Each sorted ascending.
    pub deltas: Vec<Vec<usize>>,
}

impl DeltaEncoding {
    /// Radius 0 under the identity order.
    pub fn trivial(n: usize) -> Self {
        let deltas = (0..n)
            .map(|i| if i == 0 { vec![0] } else { vec![i - 1, i] })
            .collect();
        Self {
            radius: 0,
            order: (0..n).collect(),
            deltas,
        }
    }

    /// `N^radius[order[i]] = D_1 △ … △ D_{i+1}` (0-based `i`).
    pub fn reconstruct(&self, i: usize) -> Vec<usize> {
        xor_all(self.deltas[..=i].iter().map(Vec::as_slice))
    }

    /// All balls, by a running XOR.
    pub fn reconstruct_all(&self) -> Vec<Vec<usize>> {
        let mut out = Vec::with_capacity(self.deltas.len());
        let mut cur: Vec<usize> = Vec::new();
        for d in &self.deltas {
            cur = xor_all([cur.as_slice(), d.as_slice()]);
            out.push(cur.clone());
        }
        out
    }

    /// `Σ |D_i|`.
    pub fn total_size(&self) -> u64 {
        self.deltas.iter().map(|d| d.len() as u64).sum()
    }

    /// Every ball is the whole vertex set.
    pub fn all_full(&self) -> bool {
        let n = self.order.len();
        self.deltas.first().is_some_and(|d| d.len() == n)
            && self.deltas[1..].iter().all(Vec::is_empty)
    }
}

/// Counters for one [`expand_balls`] invocation.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ExpandStats {
    /// `Σ (1 + |D'_1| + Σ_{i≥2} |D_i|)` over all recursive calls: the set
    /// elements each call touches plus a unit per call. Empty deltas cost
    /// nothing because the recursion only carries the non-empty ones.
    pub cost: u64,
    pub add_neighbours: u64,
    pub calls: u64,
}

/// The closed-form ceiling `a + 3b(⌈log2 t⌉ + 1) + 2t` on
/// [`ExpandStats::cost`], where `a = |D_1|` and `b = Σ_{i≥2} |D_i|`.
pub fn expand_cost_bound(deltas: &[Vec<usize>]) -> u64 {
    let t = deltas.len() as u64;
    let a = deltas.first().map_or(0, Vec::len) as u64;
    let b: u64 = deltas.iter().skip(1).map(|d| d.len() as u64).sum();
    let log = if t <= 1 { 0 } else { 64 - (t - 1).leading_zeros() as u64 };
    a + 3 * b * (log + 1) + 2 * t
}

struct Expander<'a, N: ?Sized> {
    nsds: &'a mut N,
    stamp: Vec<u32>,
    epoch: u32,
    stats: ExpandStats,
    out: Vec<SetHandle>,
}

impl<N: NeighbourSets + ?Sized> Expander<'_, N> {
    /// Positions `p0..p0 + t`: `first` sits at `p0`, and `rest` lists the
    /// non-empty deltas at positions `p0 + 1..p0 + t` as `(position, set)`.
    fn run(&mut self, s: SetHandle, first: &[usize], p0: usize, t: usize, rest: &[(usize, &[usize])]) -> Result<()> {
        self.stats.calls += 1;
        self.stats.cost += (1 + first.len() + rest.iter().map(|e| e.1.len()).sum::<usize>()) as u64;

        // 1-based m = ⌊t/2⌋ + 1; the left half is D'_1, D_2, …, D_{m-1} and
        // the right half starts at position p0 + m - 1.
        let m = t / 2 + 1;
        let pivot_pos = p0 + m - 1;
        self.epoch += 1;
        let epoch = self.epoch;
        let (mut left_end, mut pivot_end) = (0, 0);
        for (j, &(pos, set)) in rest.iter().enumerate() {
            for &v in set {
                self.stamp[v] = epoch;
            }
            if pos < pivot_pos {
                left_end = j + 1;
            }
            if pos <= pivot_pos {
                pivot_end = j + 1;
            }
        }
        let mut s = s;
        let mut reduced = Vec::with_capacity(first.len());
        for &v in first {
            if self.stamp[v] == epoch {
                reduced.push(v);
            } else {
                s = self.nsds.add_neighbours(s, v)?;
                self.stats.add_neighbours += 1;
            }
        }
        if t == 1 {
            self.out.push(s);
            return Ok(());
        }
        let pivot = xor_all(std::iter::once(reduced.as_slice()).chain(rest[..pivot_end].iter().map(|e| e.1)));
        self.run(s, &reduced, p0, m - 1, &rest[..left_end])?;
        self.run(s, &pivot, pivot_pos, t - (m - 1), &rest[pivot_end..])
    }
}

/// Handles `B_i = N[D_1 △ … △ D_i]` for `i = 1..=t`.
pub fn expand_balls<N: NeighbourSets + ?Sized>(
    deltas: &[Vec<usize>],
    nsds: &mut N,
) -> Result<(Vec<SetHandle>, ExpandStats)> {
    let (first, _) = deltas
        .split_first()
        .ok_or_else(|| Error::InvalidArgument("expand_balls needs at least one set".into()))?;
    let n = nsds.vertex_count();
    if let Some(&v) = deltas.iter().flatten().find(|&&v| v >= n) {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let rest: Vec<(usize, &[usize])> = deltas
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, d)| !d.is_empty())
        .map(|(i, d)| (i, d.as_slice()))
        .collect();
    let empty = nsds.empty();
    let mut ex = Expander {
        nsds,
        stamp: vec![0; n],
        epoch: 0,
        stats: ExpandStats::default(),
        out: Vec::with_capacity(deltas.len()),
    };
    ex.run(empty, first, 0, deltas.len(), &rest)?;
    Ok((ex.out, ex.stats))
}

/// Hop distances from `v` computed with set operations only. With
/// `limit = Some(r)`, vertices at distance `r` are not expanded, so only
/// distances up to `r + 1` are filled in.
pub fn simulate_bfs<N: NeighbourSets + ?Sized>(
    nsds: &mut N,
    v: usize,
    limit: Option<u32>,
) -> Result<DistanceVector> {
    let n = nsds.vertex_count();
    if v >= n {
        return Err(Error::VertexOutOfRange { vertex: v, n });
    }
    let mut dist = vec![UNREACHABLE; n];
    dist[v] = 0;
    let mut queue = std::collections::VecDeque::from([v]);
    let mut s = nsds.empty();
    while let Some(x) = queue.pop_front() {
        if limit.is_some_and(|r| dist[x] >= r) {
            continue;
        }
        let next = nsds.add_neighbours(s, x)?;
        for w in nsds.list_differences(s, next)? {
            if w == v {
                continue;
            }
            dist[w] = dist[x] + 1;
            queue.push_back(w);
        }
        s = next;
    }
    Ok(DistanceVector { source: v, dist })
}

/// `N^r[v]`, sorted, via [`simulate_bfs`].
pub fn simulate_bfs_ball<N: NeighbourSets + ?Sized>(nsds: &mut N, v: usize, r: u32) -> Result<Vec<usize>> {
    let d = simulate_bfs(nsds, v, Some(r))?;
    Ok((0..d.dist.len()).filter(|&u| d.dist[u] <= r).collect())
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ImplicitStepStats {
    pub radius: u32,
    pub expand: ExpandStats,
    /// `Σ |D_i|` of the new encoding.
    pub delta_total: u64,
}

#[derive(Clone, Debug)]
pub struct ImplicitRun {
    pub answer: bool,
    pub steps: Vec<ImplicitStepStats>,
    pub encodings: Vec<DeltaEncoding>,
}

/// One radius step on a fresh structure.
pub fn implicit_step<N, R>(
    nsds: &mut N,
    enc: &DeltaEncoding,
    d: u32,
    rng: &mut R,
) -> Result<(DeltaEncoding, ImplicitStepStats)>
where
    N: NeighbourSets + ?Sized,
    R: Rng + ?Sized,
{
    let n = enc.order.len();
    if nsds.vertex_count() != n {
        return Err(Error::InvalidArgument(format!(
            "structure over {} vertices, encoding over {n}",
            nsds.vertex_count()
        )));
    }
    let radius = enc.radius + 1;
    let (handles, expand) = expand_balls(&enc.deltas, nsds)?;
    let order = vertex_order_with_oracle(n, None, d, rng, |x| simulate_bfs_ball(nsds, x, radius))?.order;
    // π: new index -> old index.
    let mut old_pos = vec![0; n];
    for (i, &v) in enc.order.iter().enumerate() {
        old_pos[v] = i;
    }
    let handle_of = |i: usize| handles[old_pos[order[i]]];
    let mut deltas = Vec::with_capacity(n);
    for i in 0..n {
        let prev = if i == 0 { nsds.empty() } else { handle_of(i - 1) };
        let mut dlt = nsds.list_differences(prev, handle_of(i))?;
        dlt.sort_unstable();
        deltas.push(dlt);
    }
    let next = DeltaEncoding {
        radius,
        order,
        deltas,
    };
    let stats = ImplicitStepStats {
        radius,
        expand,
        delta_total: next.total_size(),
    };
    Ok((next, stats))
}

/// Is `diam(G) <= k`, where `factory` builds fresh neighbour-set structures
/// over the same `n`-vertex graph? Exact up to fingerprint collisions inside
/// the structure.
pub fn k_diameter_implicit<N, F, R>(factory: F, n: usize, k: u32, d: u32, rng: &mut R) -> Result<bool>
where
    N: NeighbourSets,
    F: FnMut() -> Result<N>,
    R: Rng + ?Sized,
{
    k_diameter_implicit_with(factory, n, k, d, rng, false).map(|run| run.answer)
}

pub fn k_diameter_implicit_with<N, F, R>(
    mut factory: F,
    n: usize,
    k: u32,
    d: u32,
    rng: &mut R,
    keep_encodings: bool,
) -> Result<ImplicitRun>
where
    N: NeighbourSets,
    F: FnMut() -> Result<N>,
    R: Rng + ?Sized,
{
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    let mut enc = DeltaEncoding::trivial(n);
    let mut run = ImplicitRun {
        answer: enc.all_full(),
        steps: Vec::new(),
        encodings: Vec::new(),
    };
    if keep_encodings {
        run.encodings.push(enc.clone());
    }
    for _ in 0..k {
        if run.answer {
            break;
        }
        let mut nsds = factory()?;
        let (next, stats) = implicit_step(&mut nsds, &enc, d, rng)?;
        enc = next;
        run.steps.push(stats);
        if keep_encodings {
            run.encodings.push(enc.clone());
        }
        run.answer = enc.all_full();
    }
    Ok(run)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::graph::{bfs_distances, k_diameter_naive, neighborhood, Graph};
    use crate::instances::random_connected_graph;
    use crate::nsds::NaiveNeighbourSets;
    use proptest::prelude::*;
    use rand::seq::index;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn rng(seed: u64) -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(seed)
    }

    fn closed_nbhd_of_set(g: &Graph, s: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = s
            .iter()
            .flat_map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().map(|&u| u as usize)))
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }

    #[test]
    fn xor_all_keeps_odd_counts() {
        assert_eq!(xor_all([&[1, 2, 3][..], &[2, 3, 4], &[3]]), vec![1, 3, 4]);
        assert!(xor_all(std::iter::empty()).is_empty());
    }

    #[test]
    fn trivial_encoding_reconstructs_singletons() {
        let e = DeltaEncoding::trivial(5);
        for i in 0..5 {
            assert_eq!(e.reconstruct(i), vec![i]);
        }
        assert_eq!(e.reconstruct_all(), (0..5).map(|i| vec![i]).collect::<Vec<_>>());
        assert!(DeltaEncoding::trivial(1).all_full());
        assert!(!e.all_full());
    }

    #[test]
    fn expand_examples() {
        let g = star(3);
        let mut s = NaiveNeighbourSets::new(&g, &mut rng(0));
        let (h, _) = expand_balls(&[vec![1]], &mut s).unwrap();
        assert_eq!(s.members(h[0]).unwrap(), vec![0, 1]);

        let p = path(5);
        let mut s = NaiveNeighbourSets::new(&p, &mut rng(0));
        let (h, _) = expand_balls(&[vec![0], vec![0, 4]], &mut s).unwrap();
        assert_eq!(s.members(h[0]).unwrap(), vec![0, 1]);
        assert_eq!(s.members(h[1]).unwrap(), vec![3, 4]);

        assert!(expand_balls(&[], &mut s).is_err());
        assert!(expand_balls(&[vec![9]], &mut s).is_err());
    }

    #[test]
    fn bound_formula() {
        assert_eq!(expand_cost_bound(&[vec![1, 2]]), 2 + 2);
        // t = 5: ⌈log2 5⌉ = 3.
        let d = vec![vec![0], vec![1], vec![2, 3], vec![], vec![4]];
        assert_eq!(expand_cost_bound(&d), 1 + 3 * 4 * 4 + 10);
    }

    #[test]
    fn bfs_examples() {
        let k3 = complete(3);
        let mut s = NaiveNeighbourSets::new(&k3, &mut rng(0));
        assert_eq!(simulate_bfs_ball(&mut s, 1, 1).unwrap(), vec![0, 1, 2]);
        let p5 = path(5);
        let mut s = NaiveNeighbourSets::new(&p5, &mut rng(0));
        assert_eq!(simulate_bfs_ball(&mut s, 0, 2).unwrap(), vec![0, 1, 2]);
        assert_eq!(simulate_bfs(&mut s, 4, None).unwrap().dist, vec![4, 3, 2, 1, 0]);
        assert!(simulate_bfs(&mut s, 5, None).is_err());
    }

    #[test]
    fn decider_examples_on_naive_structure() {
        let g = complete(3);
        let f = || Ok(NaiveNeighbourSets::new(&g, &mut rng(1)));
        assert!(k_diameter_implicit(f, 3, 1, 2, &mut rng(0)).unwrap());
        let g = path(5);
        let f = || Ok(NaiveNeighbourSets::new(&g, &mut rng(1)));
        assert!(!k_diameter_implicit(f, 5, 3, 2, &mut rng(0)).unwrap());
        let f = || Ok(NaiveNeighbourSets::new(&g, &mut rng(1)));
        assert!(k_diameter_implicit(f, 5, 4, 2, &mut rng(0)).unwrap());
        let f = || Ok(NaiveNeighbourSets::new(&g, &mut rng(1)));
        assert!(k_diameter_implicit(f, 5, 0, 2, &mut rng(0)).is_err());
    }

    #[test]
    fn encodings_reconstruct_balls() {
        let mut r = rng(40);
        for _ in 0..10 {
            let g = random_connected_graph(30, 45, &mut r).unwrap();
            let seed = r.gen();
            let run = k_diameter_implicit_with(
                || Ok(NaiveNeighbourSets::new(&g, &mut rng(seed))),
                30,
                4,
                2,
                &mut r,
                true,
            )
            .unwrap();
            for enc in &run.encodings {
                let balls = enc.reconstruct_all();
                // Spot-check a tenth of the prefixes against BFS on the structure.
                let mut s = NaiveNeighbourSets::new(&g, &mut r);
                for i in index::sample(&mut r, 30, 3) {
                    assert_eq!(enc.reconstruct(i), balls[i]);
                    assert_eq!(balls[i], simulate_bfs_ball(&mut s, enc.order[i], enc.radius).unwrap());
                }
                for (i, &v) in enc.order.iter().enumerate() {
                    assert_eq!(balls[i], neighborhood(&g, v, enc.radius).unwrap());
                }
            }
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]
        #[test]
        fn expand_matches_prefix_oracle(
            seed in 0u64..10_000,
            t in 1usize..33,
            density in 0usize..6,
        ) {
            let mut r = rng(seed);
            let n = 24;
            let g = random_connected_graph(n, n - 1 + density * 4, &mut r).unwrap();
            let deltas: Vec<Vec<usize>> = (0..t)
                .map(|_| {
                    let k = r.gen_range(0..6);
                    let mut d = index::sample(&mut r, n, k).into_vec();
                    d.sort_unstable();
                    d
                })
                .collect();
            let mut s = NaiveNeighbourSets::new(&g, &mut r);
            let (handles, stats) = expand_balls(&deltas, &mut s).unwrap();
            prop_assert_eq!(handles.len(), t);
            let mut prefix: Vec<usize> = Vec::new();
            for (i, d) in deltas.iter().enumerate() {
                prefix = xor_all([prefix.as_slice(), d.as_slice()]);
                prop_assert_eq!(s.members(handles[i]).unwrap(), closed_nbhd_of_set(&g, &prefix));
            }
            prop_assert!(stats.cost <= expand_cost_bound(&deltas));
        }

        #[test]
        fn bfs_matches_naive_distances(seed in 0u64..10_000, n in 1usize..40, extra in 0usize..30) {
            let m = (n - 1 + extra).min(n * (n - 1) / 2);
            let g = random_connected_graph(n, m, &mut rng(seed)).unwrap();
            let mut s = NaiveNeighbourSets::new(&g, &mut rng(seed));
            for v in 0..n {
                prop_assert_eq!(simulate_bfs(&mut s, v, None).unwrap(), bfs_distances(&g, v).unwrap());
            }
        }

        #[test]
        fn answer_matches_naive(seed in 0u64..10_000, n in 2usize..30, extra in 0usize..30, k in 1u32..6) {
            let m = (n - 1 + extra).min(n * (n - 1) / 2);
            let g = random_connected_graph(n, m, &mut rng(seed)).unwrap();
            let fast = k_diameter_implicit(
                || Ok(NaiveNeighbourSets::new(&g, &mut rng(seed))),
                n, k, 2, &mut rng(seed + 7),
            ).unwrap();
            prop_assert_eq!(fast, k_diameter_naive(&g, k).unwrap());
        }
    }
}
