//! Persistent neighbour-set structures.
//!
//! A [`NeighbourSets`] maintains a growing family of vertex sets. It starts
//! with the empty set and supports exactly two operations: derive a new set
//! `S ∪ N[v]` from an existing one, and list the symmetric difference of two
//! registered sets. Sets are never modified after creation.

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, KeyTable};
use crate::graph::Graph;

/// Opaque id of a registered set. `SetHandle::EMPTY` is always valid.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetHandle(pub u32);

impl SetHandle {
    pub const EMPTY: SetHandle = SetHandle(0);
}

pub trait NeighbourSets {
    fn vertex_count(&self) -> usize;

    fn empty(&self) -> SetHandle {
        SetHandle::EMPTY
    }

    /// Registers `S(h) ∪ N[v]` (closed neighbourhood) and returns its handle.
    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> Result<SetHandle>;

    /// `S(a) △ S(b)`, each element once, in no particular order.
    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<usize>>;
}

impl<T: NeighbourSets + ?Sized> NeighbourSets for &mut T {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }

    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> Result<SetHandle> {
        (**self).add_neighbours(h, v)
    }

    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<usize>> {
        (**self).list_differences(a, b)
    }
}

impl<T: NeighbourSets + ?Sized> NeighbourSets for Box<T> {
    fn vertex_count(&self) -> usize {
        (**self).vertex_count()
    }

    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> Result<SetHandle> {
        (**self).add_neighbours(h, v)
    }

    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<usize>> {
        (**self).list_differences(a, b)
    }
}

#[derive(Clone, Debug)]
struct Version {
    words: Arc<Vec<u64>>,
    fingerprint: Fingerprint,
}

/// Reference implementation over an explicit graph: every version is a
/// bitset, shared with its parent when an insertion adds nothing, plus an
/// XOR fingerprint for constant-time equality checks.
#[derive(Clone, Debug)]
pub struct NaiveNeighbourSets<'g> {
    graph: &'g Graph,
    keys: KeyTable,
    versions: Vec<Version>,
}

impl<'g> NaiveNeighbourSets<'g> {
    pub fn new<R: Rng + ?Sized>(graph: &'g Graph, rng: &mut R) -> Self {
        let n = graph.vertex_count();
        Self {
            graph,
            keys: KeyTable::new(n, rng),
            versions: vec![Version {
                words: Arc::new(vec![0; n.div_ceil(64)]),
                fingerprint: Fingerprint::EMPTY,
            }],
        }
    }

    pub fn version_count(&self) -> usize {
        self.versions.len()
    }

    fn version(&self, h: SetHandle) -> Result<&Version> {
        self.versions
            .get(h.0 as usize)
            .ok_or(Error::InvalidHandle(h.0))
    }

    /// Members of `S(h)` in ascending order.
    pub fn members(&self, h: SetHandle) -> Result<Vec<usize>> {
        let v = self.version(h)?;
        Ok(bits(&v.words).collect())
    }

    pub fn fingerprint(&self, h: SetHandle) -> Result<Fingerprint> {
        Ok(self.version(h)?.fingerprint)
    }
}

fn bits(words: &[u64]) -> impl Iterator<Item = usize> + '_ {
    words.iter().enumerate().flat_map(|(i, &w)| {
        let mut w = w;
        std::iter::from_fn(move || {
            (w != 0).then(|| {
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                i * 64 + b
            })
        })
    })
}

impl NeighbourSets for NaiveNeighbourSets<'_> {
    fn vertex_count(&self) -> usize {
        self.graph.vertex_count()
    }

    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> Result<SetHandle> {
        let n = self.graph.vertex_count();
        if v >= n {
            return Err(Error::VertexOutOfRange { vertex: v, n });
        }
        let parent = self.version(h)?.clone();
        let closed = std::iter::once(v).chain(self.graph.neighbors(v).iter().map(|&u| u as usize));
        let fresh: Vec<usize> = closed
            .filter(|&u| parent.words[u / 64] & (1 << (u % 64)) == 0)
            .collect();
        let version = if fresh.is_empty() {
            parent
        } else {
            let mut words = (*parent.words).clone();
            let mut fingerprint = parent.fingerprint;
            for u in fresh {
                words[u / 64] |= 1 << (u % 64);
                fingerprint ^= self.keys.key(u);
            }
            Version {
                words: Arc::new(words),
                fingerprint,
            }
        };
        let id = u32::try_from(self.versions.len())
            .map_err(|_| Error::InvalidArgument("too many versions".into()))?;
        self.versions.push(version);
        Ok(SetHandle(id))
    }

    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<usize>> {
        let (va, vb) = (self.version(a)?, self.version(b)?);
        if Arc::ptr_eq(&va.words, &vb.words) || va.fingerprint == vb.fingerprint {
            return Ok(Vec::new());
        }
        let xor: Vec<u64> = va.words.iter().zip(vb.words.iter()).map(|(x, y)| x ^ y).collect();
        Ok(bits(&xor).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use std::collections::BTreeSet;

    fn sorted(mut v: Vec<usize>) -> Vec<usize> {
        v.sort_unstable();
        v
    }

    #[test]
    fn examples() {
        let g = star(3);
        let mut s = NaiveNeighbourSets::new(&g, &mut ChaCha8Rng::seed_from_u64(0));
        let e = s.empty();
        let h = s.add_neighbours(e, 0).unwrap();
        assert_eq!(s.members(h).unwrap(), vec![0, 1, 2, 3]);
        let h2 = s.add_neighbours(h, 0).unwrap();
        assert_eq!(s.members(h2).unwrap(), s.members(h).unwrap());
        assert!(s.list_differences(h, h).unwrap().is_empty());
        assert!(s.list_differences(h, h2).unwrap().is_empty());
        let leaf = s.add_neighbours(e, 2).unwrap();
        assert_eq!(sorted(s.list_differences(e, leaf).unwrap()), vec![0, 2]);
    }

    #[test]
    fn invalid_handles_and_vertices() {
        let g = path(3);
        let mut s = NaiveNeighbourSets::new(&g, &mut ChaCha8Rng::seed_from_u64(0));
        assert!(matches!(s.add_neighbours(SetHandle(5), 0), Err(Error::InvalidHandle(5))));
        assert!(matches!(
            s.list_differences(SetHandle::EMPTY, SetHandle(9)),
            Err(Error::InvalidHandle(9))
        ));
        assert!(s.add_neighbours(SetHandle::EMPTY, 3).is_err());
    }

    proptest! {
        #[test]
        fn replay_matches_naive_sets(
            seed in 0u64..1000,
            ops in proptest::collection::vec((0usize..64, 0usize..20), 1..60),
        ) {
            let g = crate::instances::random_connected_graph(20, 30, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
            let mut s = NaiveNeighbourSets::new(&g, &mut ChaCha8Rng::seed_from_u64(seed));
            let mut replay: Vec<BTreeSet<usize>> = vec![BTreeSet::new()];
            let mut handles = vec![SetHandle::EMPTY];
            for (pick, v) in ops {
                let i = pick % handles.len();
                let h = s.add_neighbours(handles[i], v).unwrap();
                let mut set = replay[i].clone();
                set.insert(v);
                set.extend(g.neighbors(v).iter().map(|&u| u as usize));
                handles.push(h);
                replay.push(set);
            }
            for i in 0..handles.len() {
                let members: BTreeSet<usize> = s.members(handles[i]).unwrap().into_iter().collect();
                prop_assert_eq!(&members, &replay[i]);
            }
            for i in 0..handles.len() {
                for j in (i..handles.len()).step_by(3) {
                    let d = sorted(s.list_differences(handles[i], handles[j]).unwrap());
                    let expect: Vec<usize> = replay[i].symmetric_difference(&replay[j]).copied().collect();
                    prop_assert_eq!(&d, &expect);
                    let back = sorted(s.list_differences(handles[j], handles[i]).unwrap());
                    prop_assert_eq!(d, back);
                }
            }
        }
    }
}
