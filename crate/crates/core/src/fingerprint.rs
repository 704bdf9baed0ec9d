//! 128-bit XOR fingerprints for set equality.

use std::ops::{BitXor, BitXorAssign};

use rand::Rng;

/// XOR-combinable identifier of a set: the XOR of its members' random keys.
/// The empty set has fingerprint zero.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub u128);

impl Fingerprint {
    pub const EMPTY: Fingerprint = Fingerprint(0);

    pub fn random<R: Rng + ?Sized>(rng: &mut R) -> Self {
        Fingerprint(rng.gen())
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }
}

impl BitXor for Fingerprint {
    type Output = Fingerprint;
    fn bitxor(self, rhs: Fingerprint) -> Fingerprint {
        Fingerprint(self.0 ^ rhs.0)
    }
}

impl BitXorAssign for Fingerprint {
    fn bitxor_assign(&mut self, rhs: Fingerprint) {
        self.0 ^= rhs.0;
    }
}

/// Per-element random keys, drawn once from a seeded generator.
#[derive(Clone, Debug)]
pub struct KeyTable {
    keys: Vec<Fingerprint>,
}

impl KeyTable {
    pub fn new<R: Rng + ?Sized>(len: usize, rng: &mut R) -> Self {
        Self {
            keys: (0..len).map(|_| Fingerprint::random(rng)).collect(),
        }
    }

    pub fn key(&self, element: usize) -> Fingerprint {
        self.keys[element]
    }

    pub fn len(&self) -> usize {
        self.keys.len()
    }

    pub fn is_empty(&self) -> bool {
        self.keys.is_empty()
    }

    pub fn of_set<I: IntoIterator<Item = usize>>(&self, elements: I) -> Fingerprint {
        elements
            .into_iter()
            .fold(Fingerprint::EMPTY, |acc, e| acc ^ self.keys[e])
    }
}
