//! `k`-Diameter over an explicit sparse graph by growing interval-encoded
//! balls one radius at a time.
//!
//! At radius `r` every ball `N^r[v]` is stored as its canonical interval set
//! under a vertex order chosen for that radius. One step unions the
//! representations of the neighbours' `(r-1)`-balls, picks a fresh order,
//! and re-encodes every ball under it by walking consecutive differences.

use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::interval::{union_sweep, IntervalSet};
use crate::order::vertex_order_with_oracle;

/// Balls of one radius, each as an interval set under `order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BallEncoding {
    pub radius: u32,
    pub order: Vec<usize>,
    pub reps: Vec<IntervalSet>,
}

impl BallEncoding {
    /// Radius 0: identity order, `I({v})` for every `v`.
    pub fn trivial(n: usize) -> Self {
        Self {
            radius: 0,
            order: (0..n).collect(),
            reps: (0..n).map(IntervalSet::singleton).collect(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.order.len()
    }

    /// `N^radius[v]`, sorted.
    pub fn decode(&self, v: usize) -> Vec<usize> {
        self.reps[v].decode(&self.order)
    }

    pub fn all_full(&self) -> bool {
        let n = self.vertex_count();
        self.reps.iter().all(|r| r.is_full(n))
    }

    pub fn all_canonical(&self) -> bool {
        self.reps.iter().all(IntervalSet::is_canonical)
    }

    /// Total number of stored intervals.
    pub fn interval_count(&self) -> usize {
        self.reps.iter().map(IntervalSet::len).sum()
    }
}

/// Re-encodes `reps` (interval sets under `old_order`, describing a
/// symmetric family of balls: `w ∈ S(u)` iff `u ∈ S(w)`) under `new_order`.
///
/// Returns the new representations and `Σ |A_i| + |B_i|`, the number of
/// endpoints listed.
pub fn rebase(
    reps: &[IntervalSet],
    old_order: &[usize],
    new_order: &[usize],
) -> Result<(Vec<IntervalSet>, u64)> {
    let n = reps.len();
    if old_order.len() != n || new_order.len() != n {
        return Err(Error::InvalidArgument(format!(
            "{n} representations, orders of length {} and {}",
            old_order.len(),
            new_order.len()
        )));
    }
    let mut lefts: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut rights: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut listed = 0u64;
    for (i, &u) in new_order.iter().enumerate() {
        let a: Vec<usize> = match i {
            0 => reps[u].positions().collect(),
            _ => reps[u].minus(&reps[new_order[i - 1]]),
        };
        let b: Vec<usize> = match new_order.get(i + 1) {
            None => reps[u].positions().collect(),
            Some(&next) => reps[u].minus(&reps[next]),
        };
        listed += (a.len() + b.len()) as u64;
        for p in a {
            lefts[old_order[p]].push(i as u32);
        }
        for p in b {
            rights[old_order[p]].push(i as u32);
        }
    }
    let out = lefts
        .into_iter()
        .zip(rights)
        .enumerate()
        .map(|(w, (l, r))| {
            if l.len() != r.len() || l.iter().zip(&r).any(|(a, b)| a > b) {
                return Err(Error::InvalidArgument(format!(
                    "representation of vertex {w} is inconsistent with a symmetric ball family"
                )));
            }
            Ok(IntervalSet::from_canonical(l.into_iter().zip(r).collect()))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((out, listed))
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ExplicitOptions {
    /// Keep the radius-0 (identity) order instead of recomputing one per
    /// radius.
    pub freeze_order: bool,
    /// Keep every intermediate encoding in [`ExplicitRun::encodings`].
    pub keep_encodings: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StepStats {
    pub radius: u32,
    /// Intervals fed to the union sweeps.
    pub sweep_input_intervals: u64,
    /// Intervals after the union, under the previous order.
    pub merged_intervals: u64,
    /// Endpoints listed while re-encoding.
    pub rebase_listed: u64,
    /// Intervals under the new order.
    pub rep_intervals: u64,
}

#[derive(Clone, Debug)]
pub struct ExplicitRun {
    pub answer: bool,
    pub steps: Vec<StepStats>,
    pub encodings: Vec<BallEncoding>,
}

/// Radius `r - 1` to radius `r`.
pub fn expand_step<R: Rng + ?Sized>(
    g: &Graph,
    enc: &BallEncoding,
    d: u32,
    rng: &mut R,
) -> Result<BallEncoding> {
    expand_step_with(g, enc, d, rng, false).map(|(e, _)| e)
}

pub fn expand_step_with<R: Rng + ?Sized>(
    g: &Graph,
    enc: &BallEncoding,
    d: u32,
    rng: &mut R,
    freeze_order: bool,
) -> Result<(BallEncoding, StepStats)> {
    let n = g.vertex_count();
    if enc.vertex_count() != n || enc.reps.len() != n {
        return Err(Error::InvalidArgument(format!(
            "encoding over {} vertices for a graph with {n}",
            enc.vertex_count()
        )));
    }
    let mut stats = StepStats {
        radius: enc.radius + 1,
        ..StepStats::default()
    };
    let grown: Vec<IntervalSet> = (0..n)
        .map(|v| {
            let closed = std::iter::once(v).chain(g.neighbors(v).iter().map(|&u| u as usize));
            let inputs: Vec<&IntervalSet> = closed.map(|x| &enc.reps[x]).collect();
            stats.sweep_input_intervals += inputs.iter().map(|r| r.len() as u64).sum::<u64>();
            union_sweep(inputs)
        })
        .collect();
    stats.merged_intervals = grown.iter().map(|r| r.len() as u64).sum();
    if freeze_order || n == 1 {
        stats.rep_intervals = stats.merged_intervals;
        return Ok((
            BallEncoding {
                radius: enc.radius + 1,
                order: enc.order.clone(),
                reps: grown,
            },
            stats,
        ));
    }
    let weights: Vec<u64> = (0..n).map(|v| g.degree(v).max(1) as u64).collect();
    let order = vertex_order_with_oracle(n, Some(&weights), d, rng, |x| {
        Ok(grown[x].decode(&enc.order))
    })?
    .order;
    let (reps, listed) = rebase(&grown, &enc.order, &order)?;
    stats.rebase_listed = listed;
    stats.rep_intervals = reps.iter().map(|r| r.len() as u64).sum();
    Ok((
        BallEncoding {
            radius: enc.radius + 1,
            order,
            reps,
        },
        stats,
    ))
}

/// Is `diam(g) <= k`? Always exact; the randomness only affects running
/// time.
pub fn k_diameter_explicit<R: Rng + ?Sized>(g: &Graph, k: u32, d: u32, rng: &mut R) -> Result<bool> {
    k_diameter_explicit_with(g, k, d, rng, ExplicitOptions::default()).map(|run| run.answer)
}

pub fn k_diameter_explicit_with<R: Rng + ?Sized>(
    g: &Graph,
    k: u32,
    d: u32,
    rng: &mut R,
    opts: ExplicitOptions,
) -> Result<ExplicitRun> {
    if k == 0 {
        return Err(Error::InvalidArgument("k must be at least 1".into()));
    }
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    let n = g.vertex_count();
    if n == 0 {
        return Err(Error::InvalidArgument("graph has no vertices".into()));
    }
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let mut enc = BallEncoding::trivial(n);
    let mut run = ExplicitRun {
        answer: n == 1,
        steps: Vec::new(),
        encodings: Vec::new(),
    };
    if opts.keep_encodings {
        run.encodings.push(enc.clone());
    }
    for _ in 0..k {
        if run.answer {
            break;
        }
        let (next, stats) = expand_step_with(g, &enc, d, rng, opts.freeze_order)?;
        enc = next;
        run.steps.push(stats);
        if opts.keep_encodings {
            run.encodings.push(enc.clone());
        }
        run.answer = enc.all_full();
    }
    Ok(run)
}
