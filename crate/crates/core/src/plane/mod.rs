//! Neighbour sets for intersection graphs of translates of a convex polygon.
//!
//! Translates `F + u` and `F + v` meet iff `u ∈ v + M` with `M = 2H` and `H`
//! the symmetrized `F`. `M` is normalized by a linear map (applied to the
//! points too), so adding `N[v]` to a set means marking every point covered
//! by the normalized shape placed at `v`. The plane is cut into bands of
//! height 1; each band with at least one point gets a [`StripeTree`], and a
//! persistent segment tree over the band indices carries one fingerprint per
//! band so that difference listing only enters bands that actually differ.

use std::cell::Cell;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, KeyTable};
use crate::geometry::{check_points, normalize_polygon, symmetrize, AffineMap, ConvexPolygon, Point, EPS};
use crate::nsds::{NeighbourSets, SetHandle};
use crate::stripe::{MarkShape, StripeTree, StripeVersion};

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug)]
struct AuxNode {
    left: u32,
    right: u32,
    /// Index into `stripes` for leaves.
    stripe: u32,
    version: Option<StripeVersion>,
    fp: Fingerprint,
}

/// Immutable snapshot of the marked point set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct PlaneVersion {
    root: u32,
    structure: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaneCounters {
    pub marks: u64,
    /// Auxiliary-tree node pairs entered by difference listing.
    pub aux_list_visits: u64,
    /// Stripe node pairs entered by difference listing.
    pub stripe_list_visits: u64,
    /// Stripe nodes entered by updates.
    pub stripe_update_visits: u64,
    /// Stripes touched by marks.
    pub stripes_touched: u64,
    pub max_stripes_per_mark: u64,
}

pub struct PlaneStructure {
    map: AffineMap,
    shape: MarkShape,
    /// Input points after `map`.
    mapped: Vec<Point>,
    keys: KeyTable,
    /// Sorted distinct band indices; `stripes[i]` covers `bands[i]`.
    bands: Vec<i64>,
    stripes: Vec<StripeTree>,
    aux: Vec<AuxNode>,
    id: u64,
    marks: Cell<u64>,
    aux_list_visits: Cell<u64>,
    stripes_touched: Cell<u64>,
    max_stripes_per_mark: Cell<u64>,
}

impl std::fmt::Debug for PlaneStructure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("PlaneStructure")
            .field("points", &self.mapped.len())
            .field("stripes", &self.stripes.len())
            .field("aux_nodes", &self.aux.len())
            .finish()
    }
}

fn band_of(y: f64) -> i64 {
    y.floor() as i64
}

impl PlaneStructure {
    /// Structure for the translates `f + p`, `p ∈ points`, holding only
    /// the empty set.
    pub fn init(points: &[Point], f: &ConvexPolygon, seed: u64) -> Result<(Self, PlaneVersion)> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("no points".into()));
        }
        check_points(points)?;
        let m = symmetrize(f).scale(2.0)?;
        let (g, map) = normalize_polygon(&m)?;
        let shape = MarkShape::from_polygon(&g)?;
        let mapped: Vec<Point> = points.iter().map(|&p| map.apply(p)).collect();
        check_points(&mapped)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let keys = KeyTable::new(points.len(), &mut rng);

        let mut by_band: Vec<(i64, usize)> = mapped.iter().enumerate().map(|(i, p)| (band_of(p.y), i)).collect();
        by_band.sort_unstable();
        let mut bands = Vec::new();
        let mut stripes = Vec::new();
        let mut roots = Vec::new();
        for group in by_band.chunk_by(|a, b| a.0 == b.0) {
            let band = group[0].0;
            let pts: Vec<(usize, Point)> = group.iter().map(|&(_, i)| (i, mapped[i])).collect();
            let (tree, v) = StripeTree::new(&pts, band, &shape.slopes, &keys, &mut rng)?;
            bands.push(band);
            stripes.push(tree);
            roots.push(v);
        }
        let mut s = Self {
            map,
            shape,
            mapped,
            keys,
            bands,
            stripes,
            aux: Vec::new(),
            id: rng.gen(),
            marks: Cell::new(0),
            aux_list_visits: Cell::new(0),
            stripes_touched: Cell::new(0),
            max_stripes_per_mark: Cell::new(0),
        };
        let root = s.build(0, roots.len() as u32 - 1, &roots);
        let v = PlaneVersion { root, structure: s.id };
        Ok((s, v))
    }

    fn build(&mut self, lo: u32, hi: u32, roots: &[StripeVersion]) -> u32 {
        let node = if lo == hi {
            AuxNode {
                left: NIL,
                right: NIL,
                stripe: lo,
                version: Some(roots[lo as usize]),
                fp: Fingerprint::EMPTY,
            }
        } else {
            let m = (lo + hi) / 2;
            let l = self.build(lo, m, roots);
            let r = self.build(m + 1, hi, roots);
            AuxNode {
                left: l,
                right: r,
                stripe: lo,
                version: None,
                fp: Fingerprint::EMPTY,
            }
        };
        self.aux.push(node);
        self.aux.len() as u32 - 1
    }

    pub fn point_count(&self) -> usize {
        self.mapped.len()
    }

    pub fn stripe_count(&self) -> usize {
        self.stripes.len()
    }

    /// Band indices of the instantiated stripes, ascending.
    pub fn bands(&self) -> &[i64] {
        &self.bands
    }

    /// Band holding point `i`.
    pub fn band_of_point(&self, i: usize) -> Result<i64> {
        let p = self.mapped.get(i).ok_or(Error::VertexOutOfRange {
            vertex: i,
            n: self.mapped.len(),
        })?;
        Ok(band_of(p.y))
    }

    /// The linear map applied to the input points.
    pub fn map(&self) -> AffineMap {
        self.map
    }

    pub fn shape(&self) -> &MarkShape {
        &self.shape
    }

    pub fn mapped_points(&self) -> &[Point] {
        &self.mapped
    }

    pub fn empty(&self) -> PlaneVersion {
        // The first build leaves the root last.
        PlaneVersion {
            root: self.initial_root(),
            structure: self.id,
        }
    }

    fn initial_root(&self) -> u32 {
        2 * self.stripes.len() as u32 - 2
    }

    pub fn counters(&self) -> PlaneCounters {
        let (mut list, mut upd) = (0, 0);
        for s in &self.stripes {
            let c = s.counters();
            list += c.list_visits;
            upd += c.update_visits;
        }
        PlaneCounters {
            marks: self.marks.get(),
            aux_list_visits: self.aux_list_visits.get(),
            stripe_list_visits: list,
            stripe_update_visits: upd,
            stripes_touched: self.stripes_touched.get(),
            max_stripes_per_mark: self.max_stripes_per_mark.get(),
        }
    }

    pub fn reset_counters(&self) {
        self.marks.set(0);
        self.aux_list_visits.set(0);
        self.stripes_touched.set(0);
        self.max_stripes_per_mark.set(0);
        for s in &self.stripes {
            s.reset_counters();
        }
    }

    fn check(&self, v: PlaneVersion) -> Result<()> {
        if v.structure != self.id || v.root as usize >= self.aux.len() {
            return Err(Error::ForeignVersion);
        }
        Ok(())
    }

    pub fn fingerprint(&self, v: PlaneVersion) -> Result<Fingerprint> {
        self.check(v)?;
        Ok(self.aux[v.root as usize].fp)
    }

    /// Current stripe version of stripe `i` under `v`.
    fn leaf(&self, v: PlaneVersion, i: u32) -> StripeVersion {
        let mut idx = v.root;
        let (mut lo, mut hi) = (0u32, self.stripes.len() as u32 - 1);
        while lo < hi {
            let m = (lo + hi) / 2;
            let n = &self.aux[idx as usize];
            if i <= m {
                idx = n.left;
                hi = m;
            } else {
                idx = n.right;
                lo = m + 1;
            }
        }
        self.aux[idx as usize].version.expect("aux leaf")
    }

    /// Persistently replaces the leaves in `updates` (sorted by stripe).
    fn set_leaves(&mut self, idx: u32, lo: u32, hi: u32, updates: &[(u32, StripeVersion, Fingerprint)]) -> u32 {
        if updates.is_empty() {
            return idx;
        }
        if lo == hi {
            let (stripe, version, fp) = updates[0];
            self.aux.push(AuxNode {
                left: NIL,
                right: NIL,
                stripe,
                version: Some(version),
                fp,
            });
            return self.aux.len() as u32 - 1;
        }
        let m = (lo + hi) / 2;
        let split = updates.partition_point(|u| u.0 <= m);
        let n = self.aux[idx as usize];
        let l = self.set_leaves(n.left, lo, m, &updates[..split]);
        let r = self.set_leaves(n.right, m + 1, hi, &updates[split..]);
        self.aux.push(AuxNode {
            left: l,
            right: r,
            stripe: lo,
            version: None,
            fp: self.aux[l as usize].fp ^ self.aux[r as usize].fp,
        });
        self.aux.len() as u32 - 1
    }

    /// `v` plus every point covered by the shape placed at the mapped
    /// position `center`.
    pub fn mark_mapped(&mut self, v: PlaneVersion, center: Point) -> Result<PlaneVersion> {
        self.check(v)?;
        if !center.is_finite() {
            return Err(Error::InvalidArgument("centre is not finite".into()));
        }
        self.marks.set(self.marks.get() + 1);
        let lo_band = band_of(center.y + self.shape.ymin - EPS);
        let hi_band = band_of(center.y + self.shape.ymax + EPS);
        let first = self.bands.partition_point(|&b| b < lo_band);
        let last = self.bands.partition_point(|&b| b <= hi_band);
        let mut updates = Vec::with_capacity(last.saturating_sub(first));
        for i in first..last {
            let old = self.leaf(v, i as u32);
            let new = self.stripes[i].mark(old, &self.shape, center)?;
            if new != old {
                updates.push((i as u32, new, self.stripes[i].fingerprint(new)?));
            }
        }
        let touched = last.saturating_sub(first) as u64;
        self.stripes_touched.set(self.stripes_touched.get() + touched);
        if touched > self.max_stripes_per_mark.get() {
            self.max_stripes_per_mark.set(touched);
        }
        let root = self.set_leaves(v.root, 0, self.stripes.len() as u32 - 1, &updates);
        Ok(PlaneVersion { root, ..v })
    }

    /// `v` plus every point covered by the marking shape placed at input
    /// point `p` (before mapping), i.e. the closed neighbourhood of `p`.
    pub fn mark(&mut self, v: PlaneVersion, p: Point) -> Result<PlaneVersion> {
        let c = self.map.apply(p);
        self.mark_mapped(v, c)
    }

    /// Marks the closed neighbourhood of input point `i`.
    pub fn mark_point(&mut self, v: PlaneVersion, i: usize) -> Result<PlaneVersion> {
        let c = *self.mapped.get(i).ok_or(Error::VertexOutOfRange {
            vertex: i,
            n: self.mapped.len(),
        })?;
        self.mark_mapped(v, c)
    }

    fn diff(&self, a: u32, b: u32, out: &mut Vec<usize>) -> Result<()> {
        let (x, y) = (&self.aux[a as usize], &self.aux[b as usize]);
        if x.fp == y.fp {
            return Ok(());
        }
        self.aux_list_visits.set(self.aux_list_visits.get() + 1);
        match (x.version, y.version) {
            (Some(va), Some(vb)) => {
                out.extend(self.stripes[x.stripe as usize].list_differences(va, vb)?);
            }
            _ => {
                self.diff(x.left, y.left, out)?;
                self.diff(x.right, y.right, out)?;
            }
        }
        Ok(())
    }

    /// Point ids in exactly one of the two sets, grouped by stripe.
    pub fn list_differences(&self, a: PlaneVersion, b: PlaneVersion) -> Result<Vec<usize>> {
        self.check(a)?;
        self.check(b)?;
        let mut out = Vec::new();
        if a.root != b.root {
            self.diff(a.root, b.root, &mut out)?;
        }
        Ok(out)
    }

    /// Marked point ids, ascending.
    pub fn marked(&self, v: PlaneVersion) -> Result<Vec<usize>> {
        self.check(v)?;
        let mut out = Vec::new();
        for i in 0..self.stripes.len() {
            out.extend(self.stripes[i].marked(self.leaf(v, i as u32))?);
        }
        out.sort_unstable();
        Ok(out)
    }

    /// Walks the auxiliary tree of `v` checking that leaf fingerprints
    /// match their stripe roots and internal ones are XORs of children;
    /// with `deep`, also audits every stripe version it reaches.
    pub fn audit(&self, v: PlaneVersion, deep: bool) -> Result<(usize, Vec<String>)> {
        self.check(v)?;
        let mut problems = Vec::new();
        let mut count = 0;
        self.audit_node(v.root, 0, self.stripes.len() as u32 - 1, deep, &mut count, &mut problems)?;
        Ok((count, problems))
    }

    fn audit_node(
        &self,
        idx: u32,
        lo: u32,
        hi: u32,
        deep: bool,
        count: &mut usize,
        problems: &mut Vec<String>,
    ) -> Result<()> {
        let mut report = |msg: String, count: &mut usize| {
            *count += 1;
            if problems.len() < 8 {
                problems.push(msg);
            }
        };
        let n = self.aux[idx as usize];
        if lo == hi {
            let Some(sv) = n.version else {
                report(format!("aux node {idx}: leaf position without a stripe version"), count);
                return Ok(());
            };
            if n.stripe != lo {
                report(format!("aux node {idx}: holds stripe {} at position {lo}", n.stripe), count);
            }
            let tree = &self.stripes[lo as usize];
            if tree.fingerprint(sv)? != n.fp {
                report(format!("aux node {idx}: fingerprint differs from stripe {lo}"), count);
            }
            if deep {
                let (bad, why) = tree.audit(sv, &self.keys)?;
                let shown = why.len();
                for w in why {
                    report(format!("stripe {lo}: {w}"), count);
                }
                *count += bad - shown;
            }
            return Ok(());
        }
        if n.version.is_some() {
            report(format!("aux node {idx}: internal node with a stripe version"), count);
        }
        if n.fp != self.aux[n.left as usize].fp ^ self.aux[n.right as usize].fp {
            report(format!("aux node {idx}: fingerprint is not the XOR of its children"), count);
        }
        let m = (lo + hi) / 2;
        self.audit_node(n.left, lo, m, deep, count, problems)?;
        self.audit_node(n.right, m + 1, hi, deep, count, problems)
    }
}

/// [`NeighbourSets`] over the intersection graph of the translates
/// `f + points[i]`, without materializing its edges.
#[derive(Debug)]
pub struct GeometricNeighbourSets {
    plane: PlaneStructure,
    versions: Vec<PlaneVersion>,
}

impl GeometricNeighbourSets {
    pub fn plane(&self) -> &PlaneStructure {
        &self.plane
    }

    pub fn version(&self, h: SetHandle) -> Result<PlaneVersion> {
        self.versions.get(h.0 as usize).copied().ok_or(Error::InvalidHandle(h.0))
    }

    /// Members of `S(h)` in ascending order.
    pub fn members(&self, h: SetHandle) -> Result<Vec<usize>> {
        self.plane.marked(self.version(h)?)
    }

    pub fn version_count(&self) -> usize {
        self.versions.len()
    }
}

/// Builds the geometric neighbour-set structure for `f + p`, `p ∈ points`.
pub fn geometric_nsds(points: &[Point], f: &ConvexPolygon, seed: u64) -> Result<GeometricNeighbourSets> {
    let (plane, v) = PlaneStructure::init(points, f, seed)?;
    Ok(GeometricNeighbourSets {
        plane,
        versions: vec![v],
    })
}

impl NeighbourSets for GeometricNeighbourSets {
    fn vertex_count(&self) -> usize {
        self.plane.point_count()
    }

    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> Result<SetHandle> {
        let base = self.version(h)?;
        let next = self.plane.mark_point(base, v)?;
        let id = u32::try_from(self.versions.len())
            .map_err(|_| Error::InvalidArgument("too many versions".into()))?;
        self.versions.push(next);
        Ok(SetHandle(id))
    }

    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> Result<Vec<usize>> {
        let (va, vb) = (self.version(a)?, self.version(b)?);
        self.plane.list_differences(va, vb)
    }
}
