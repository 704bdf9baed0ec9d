//! Canonical interval representations of vertex sets under a vertex order.
//!
//! Positions are 0-based: position `i` holds `order[i]`.

use std::cmp::Ordering;

/// Disjoint, non-adjacent, sorted closed intervals `[a, b]` of positions.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct IntervalSet {
    intervals: Vec<(u32, u32)>,
}

impl IntervalSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// `[0, n-1]`, or empty for `n == 0`.
    pub fn full(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Self {
            intervals: vec![(0, n as u32 - 1)],
        }
    }

    pub fn singleton(p: usize) -> Self {
        Self {
            intervals: vec![(p as u32, p as u32)],
        }
    }

    /// Builds from intervals that are already canonical; panics in debug
    /// builds otherwise.
    pub fn from_canonical(intervals: Vec<(u32, u32)>) -> Self {
        let s = Self { intervals };
        debug_assert!(s.is_canonical(), "{:?}", s.intervals);
        s
    }

    pub fn intervals(&self) -> &[(u32, u32)] {
        &self.intervals
    }

    /// Number of intervals.
    pub fn len(&self) -> usize {
        self.intervals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    /// Number of covered positions.
    pub fn cardinality(&self) -> usize {
        self.intervals.iter().map(|&(a, b)| (b - a + 1) as usize).sum()
    }

    pub fn is_full(&self, n: usize) -> bool {
        n > 0 && self.intervals == [(0, n as u32 - 1)]
    }

    pub fn is_canonical(&self) -> bool {
        self.intervals.iter().all(|&(a, b)| a <= b)
            && self
                .intervals
                .windows(2)
                .all(|w| w[0].1.checked_add(1).is_some_and(|e| e < w[1].0))
    }

    pub fn contains(&self, p: usize) -> bool {
        let p = p as u32;
        self.intervals
            .binary_search_by(|&(a, b)| {
                if b < p {
                    Ordering::Less
                } else if a > p {
                    Ordering::Greater
                } else {
                    Ordering::Equal
                }
            })
            .is_ok()
    }

    pub fn positions(&self) -> impl Iterator<Item = usize> + '_ {
        self.intervals
            .iter()
            .flat_map(|&(a, b)| (a as usize)..=(b as usize))
    }

    /// The vertex set this represents under `order`, sorted by vertex id.
    pub fn decode(&self, order: &[usize]) -> Vec<usize> {
        let mut out: Vec<usize> = self.positions().map(|p| order[p]).collect();
        out.sort_unstable();
        out
    }

    /// Positions in `self` but not in `other`, ascending. Runs in
    /// `O(len + other.len + output)`.
    pub fn minus(&self, other: &IntervalSet) -> Vec<usize> {
        let mut out = Vec::new();
        let mut j = 0;
        for &(a, b) in &self.intervals {
            while j < other.intervals.len() && other.intervals[j].1 < a {
                j += 1;
            }
            let mut cur = a as usize;
            let end = b as usize;
            let mut k = j;
            while cur <= end {
                match other.intervals.get(k) {
                    Some(&(c, d)) if (c as usize) <= end => {
                        out.extend(cur..(c as usize).max(cur));
                        cur = cur.max(d as usize + 1);
                        k += 1;
                    }
                    _ => {
                        out.extend(cur..=end);
                        break;
                    }
                }
            }
        }
        out
    }
}

/// Canonical minimal cover of a set of positions (any order, duplicates
/// allowed).
pub fn canonicalize(positions: &[usize]) -> IntervalSet {
    let mut sorted: Vec<u32> = positions.iter().map(|&p| p as u32).collect();
    sorted.sort_unstable();
    sorted.dedup();
    let mut intervals: Vec<(u32, u32)> = Vec::new();
    for p in sorted {
        match intervals.last_mut() {
            Some((_, b)) if *b + 1 == p => *b = p,
            _ => intervals.push((p, p)),
        }
    }
    IntervalSet { intervals }
}

/// Canonical representation of the union of `sets`, by a sweep over sorted
/// endpoint events with a coverage counter.
pub fn union_sweep<'a, I>(sets: I) -> IntervalSet
where
    I: IntoIterator<Item = &'a IntervalSet>,
{
    // (position, delta); openings sort before closings at the same position,
    // which glues adjacent intervals together.
    let mut events: Vec<(u64, i8)> = Vec::new();
    for s in sets {
        for &(a, b) in &s.intervals {
            events.push((a as u64, -1));
            events.push((b as u64 + 1, 1));
        }
    }
    events.sort_unstable();
    let mut intervals = Vec::new();
    let mut depth = 0i64;
    let mut start = 0u64;
    for (p, kind) in events {
        if kind < 0 {
            if depth == 0 {
                start = p;
            }
            depth += 1;
        } else {
            depth -= 1;
            if depth == 0 {
                intervals.push((start as u32, (p - 1) as u32));
            }
        }
    }
    IntervalSet { intervals }
}
