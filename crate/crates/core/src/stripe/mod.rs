//! Persistent marking structure for the points of one horizontal band
//! `[y0, y0 + 1)`.
//!
//! A shape placed over the band either reaches below the band (it then marks
//! every point under its top edge) or, when its chords are at least 1 tall,
//! reaches above it (it marks every point over its bottom edge). Each point
//! therefore only needs a bottom boundary `B(p)` (the upper envelope of
//! bottom marks) and a top boundary `T(p)` (the lower envelope of top
//! marks), and is marked iff `y ≤ B(p)` or `y ≥ T(p)`.
//!
//! Points sit in x order in a persistent segment tree. Boundary lines come
//! from a fixed set of slopes (the non-vertical side directions of the
//! shape). Every node keeps, per slope `β`, the extremes of `B(p) − βx` and
//! `T(p) − βx` over its points and its points sorted by `y − βx`, with
//! prefix XOR fingerprints. When an update line clears a whole node's
//! boundary, and the node's two marked sets stay either disjoint or cover
//! everything, the new fingerprints come from one binary search and the
//! line is parked as a lazy tag.

use std::borrow::Cow;
use std::cell::Cell;

use rand::Rng;

use crate::error::{Error, Result};
use crate::fingerprint::{Fingerprint, KeyTable};
use crate::geometry::{Point, EPS};

const NIL: u32 = u32::MAX;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    /// Marks points on or below the line.
    Bottom,
    /// Marks points on or above the line.
    Top,
}

/// `y = alpha + slope[dir] * x`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryLine {
    pub dir: usize,
    pub alpha: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Overlap {
    /// No point is both bottom- and top-marked.
    Disjoint,
    /// Every point is marked.
    Full,
    Mixed,
}

#[derive(Clone, Debug)]
struct StaticNode {
    lo: u32,
    hi: u32,
    left: u32,
    right: u32,
    depth: u32,
    xmin: f64,
    xmax: f64,
    /// Per slope: `y − βx` of the node's points, ascending.
    keys: Vec<Vec<f64>>,
    /// Per slope: `prefix[c]` = XOR of the first `c` sorted points.
    prefix: Vec<Vec<Fingerprint>>,
}

impl StaticNode {
    fn all(&self) -> Fingerprint {
        *self.prefix[0].last().unwrap()
    }

    fn is_leaf(&self) -> bool {
        self.left == NIL
    }

    /// Fingerprint of points with key `<= a` (or `< a`).
    fn below(&self, dir: usize, a: f64, inclusive: bool) -> Fingerprint {
        let k = &self.keys[dir];
        let c = if inclusive {
            k.partition_point(|&x| x <= a)
        } else {
            k.partition_point(|&x| x < a)
        };
        self.prefix[dir][c]
    }
}

#[derive(Clone, Debug)]
struct Node {
    stat: u32,
    left: u32,
    right: u32,
    /// `[bmin; s] [bmax; s] [tmin; s] [tmax; s]`.
    ext: Box<[f64]>,
    bot: Fingerprint,
    top: Fingerprint,
    hash: Fingerprint,
    overlap: Overlap,
    bot_lazy: Option<BoundaryLine>,
    top_lazy: Option<BoundaryLine>,
}

/// Immutable snapshot of a stripe's marked set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct StripeVersion {
    root: u32,
    universe: u64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct StripeCounters {
    /// Nodes entered by updates.
    pub update_visits: u64,
    /// Node pairs entered by difference listing.
    pub list_visits: u64,
    /// Largest number, on a single tree level during one update, of nodes
    /// fully inside the update range that still had to be split.
    pub max_split_per_level: u64,
    pub updates: u64,
}

/// What an audit reconstructs for one point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LeafState {
    pub id: usize,
    pub point: Point,
    pub bottom: f64,
    pub top: f64,
    pub marked: bool,
}

pub struct StripeTree {
    band: i64,
    slopes: Vec<f64>,
    ids: Vec<usize>,
    points: Vec<Point>,
    xs: Vec<f64>,
    statics: Vec<StaticNode>,
    nodes: Vec<Node>,
    universe: u64,
    update_visits: Cell<u64>,
    list_visits: Cell<u64>,
    max_split_per_level: Cell<u64>,
    updates: Cell<u64>,
    level_scratch: Vec<u64>,
}

impl std::fmt::Debug for StripeTree {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("StripeTree")
            .field("band", &self.band)
            .field("points", &self.points.len())
            .field("nodes", &self.nodes.len())
            .finish()
    }
}

fn line_range(alpha: f64, slope_diff: f64, xmin: f64, xmax: f64) -> (f64, f64) {
    let (a, b) = (alpha + slope_diff * xmin, alpha + slope_diff * xmax);
    (a.min(b), a.max(b))
}

impl StripeTree {
    /// Empty-marking structure over `points` (`(global id, point)` pairs)
    /// lying in band `[band, band + 1)`. `slopes` must contain `0.0`;
    /// `keys` holds one fingerprint per global id.
    pub fn new<R: Rng + ?Sized>(
        points: &[(usize, Point)],
        band: i64,
        slopes: &[f64],
        keys: &KeyTable,
        rng: &mut R,
    ) -> Result<(Self, StripeVersion)> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("stripe without points".into()));
        }
        let zero = slopes
            .iter()
            .position(|&s| s == 0.0)
            .ok_or_else(|| Error::InvalidArgument("slope set must contain 0".into()))?;
        let y0 = band as f64;
        for &(id, p) in points {
            if id >= keys.len() {
                return Err(Error::VertexOutOfRange {
                    vertex: id,
                    n: keys.len(),
                });
            }
            if !(p.y >= y0 && p.y < y0 + 1.0) {
                return Err(Error::OutsideBand(id));
            }
        }
        let mut sorted = points.to_vec();
        sorted.sort_by(|a, b| a.1.x.total_cmp(&b.1.x).then(a.0.cmp(&b.0)));
        let n = sorted.len();
        let mut tree = StripeTree {
            band,
            slopes: slopes.to_vec(),
            ids: sorted.iter().map(|p| p.0).collect(),
            points: sorted.iter().map(|p| p.1).collect(),
            xs: sorted.iter().map(|p| p.1.x).collect(),
            statics: Vec::with_capacity(2 * n),
            nodes: Vec::with_capacity(4 * n),
            universe: rng.gen(),
            update_visits: Cell::new(0),
            list_visits: Cell::new(0),
            max_split_per_level: Cell::new(0),
            updates: Cell::new(0),
            level_scratch: Vec::new(),
        };
        tree.build_static(0, n as u32 - 1, 0, keys);
        let bottom = BoundaryLine {
            dir: zero,
            alpha: y0 - 1.0,
        };
        let top = BoundaryLine {
            dir: zero,
            alpha: y0 + 2.0,
        };
        let root = tree.build_dynamic(0, bottom, top);
        let depth = tree.statics.iter().map(|s| s.depth).max().unwrap_or(0);
        tree.level_scratch = vec![0; depth as usize + 1];
        let version = StripeVersion {
            root,
            universe: tree.universe,
        };
        Ok((tree, version))
    }

    fn build_static(&mut self, lo: u32, hi: u32, depth: u32, keys: &KeyTable) -> u32 {
        let id = self.statics.len() as u32;
        self.statics.push(StaticNode {
            lo,
            hi,
            left: NIL,
            right: NIL,
            depth,
            xmin: self.xs[lo as usize],
            xmax: self.xs[hi as usize],
            keys: Vec::new(),
            prefix: Vec::new(),
        });
        if lo < hi {
            let m = (lo + hi) / 2;
            let l = self.build_static(lo, m, depth + 1, keys);
            let r = self.build_static(m + 1, hi, depth + 1, keys);
            self.statics[id as usize].left = l;
            self.statics[id as usize].right = r;
        }
        let range = lo as usize..=hi as usize;
        let mut all_keys = Vec::with_capacity(self.slopes.len());
        let mut all_prefix = Vec::with_capacity(self.slopes.len());
        for &beta in &self.slopes {
            let mut kv: Vec<(f64, Fingerprint)> = range
                .clone()
                .map(|i| {
                    let p = self.points[i];
                    (p.y - beta * p.x, keys.key(self.ids[i]))
                })
                .collect();
            kv.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut prefix = Vec::with_capacity(kv.len() + 1);
            let mut acc = Fingerprint::EMPTY;
            prefix.push(acc);
            for &(_, h) in &kv {
                acc ^= h;
                prefix.push(acc);
            }
            all_keys.push(kv.into_iter().map(|(k, _)| k).collect());
            all_prefix.push(prefix);
        }
        let st = &mut self.statics[id as usize];
        st.keys = all_keys;
        st.prefix = all_prefix;
        id
    }

    fn build_dynamic(&mut self, stat: u32, bottom: BoundaryLine, top: BoundaryLine) -> u32 {
        let st = &self.statics[stat as usize];
        let (sl, sr) = (st.left, st.right);
        let (left, right) = if sl == NIL {
            (NIL, NIL)
        } else {
            (
                self.build_dynamic(sl, bottom, top),
                self.build_dynamic(sr, bottom, top),
            )
        };
        let s = self.slopes.len();
        let mut node = Node {
            stat,
            left,
            right,
            ext: vec![0.0; 4 * s].into_boxed_slice(),
            bot: Fingerprint::EMPTY,
            top: Fingerprint::EMPTY,
            hash: Fingerprint::EMPTY,
            overlap: Overlap::Disjoint,
            bot_lazy: None,
            top_lazy: None,
        };
        self.set_line(&mut node, Side::Bottom, bottom);
        self.set_line(&mut node, Side::Top, top);
        node.bot_lazy = None;
        node.top_lazy = None;
        node.hash = node.bot ^ node.top;
        self.nodes.push(node);
        self.nodes.len() as u32 - 1
    }

    pub fn band(&self) -> i64 {
        self.band
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn slopes(&self) -> &[f64] {
        &self.slopes
    }

    /// Global ids in x order (the leaf order).
    pub fn leaf_ids(&self) -> &[usize] {
        &self.ids
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn counters(&self) -> StripeCounters {
        StripeCounters {
            update_visits: self.update_visits.get(),
            list_visits: self.list_visits.get(),
            max_split_per_level: self.max_split_per_level.get(),
            updates: self.updates.get(),
        }
    }

    pub fn reset_counters(&self) {
        self.update_visits.set(0);
        self.list_visits.set(0);
        self.max_split_per_level.set(0);
        self.updates.set(0);
    }

    /// Fingerprint of the marked set of `v`.
    pub fn fingerprint(&self, v: StripeVersion) -> Result<Fingerprint> {
        self.check(v)?;
        Ok(self.nodes[v.root as usize].hash)
    }

    fn check(&self, v: StripeVersion) -> Result<()> {
        if v.universe != self.universe || v.root as usize >= self.nodes.len() {
            return Err(Error::ForeignVersion);
        }
        Ok(())
    }

    /// Overwrites one boundary of `node` with `line` (which must dominate
    /// the old boundary on every point of the node).
    fn set_line(&self, node: &mut Node, side: Side, line: BoundaryLine) {
        let st = &self.statics[node.stat as usize];
        let s = self.slopes.len();
        let beta = self.slopes[line.dir];
        let base = match side {
            Side::Bottom => 0,
            Side::Top => 2 * s,
        };
        for (j, &bj) in self.slopes.iter().enumerate() {
            let (lo, hi) = line_range(line.alpha, beta - bj, st.xmin, st.xmax);
            node.ext[base + j] = lo;
            node.ext[base + s + j] = hi;
        }
        match side {
            Side::Bottom => {
                node.bot = st.below(line.dir, line.alpha, true);
                if !st.is_leaf() {
                    node.bot_lazy = Some(line);
                }
            }
            Side::Top => {
                node.top = st.all() ^ st.below(line.dir, line.alpha, false);
                if !st.is_leaf() {
                    node.top_lazy = Some(line);
                }
            }
        }
    }

    fn finish_hash(&self, node: &mut Node) {
        node.hash = match node.overlap {
            Overlap::Full => self.statics[node.stat as usize].all(),
            _ => node.bot ^ node.top,
        };
    }

    /// `child` as it would look after pushing `parent`'s lazy tags.
    fn child_view(&self, parent: &Node, child: u32) -> Cow<'_, Node> {
        let c = &self.nodes[child as usize];
        if parent.bot_lazy.is_none() && parent.top_lazy.is_none() {
            return Cow::Borrowed(c);
        }
        let mut c = c.clone();
        if let Some(l) = parent.bot_lazy {
            self.set_line(&mut c, Side::Bottom, l);
        }
        if let Some(l) = parent.top_lazy {
            self.set_line(&mut c, Side::Top, l);
        }
        c.overlap = parent.overlap;
        self.finish_hash(&mut c);
        Cow::Owned(c)
    }

    fn push(&mut self, idx: u32) -> (u32, u32) {
        let node = &self.nodes[idx as usize];
        if node.bot_lazy.is_none() && node.top_lazy.is_none() {
            return (node.left, node.right);
        }
        let (l, r) = (node.left, node.right);
        let node = node.clone();
        let lv = self.child_view(&node, l).into_owned();
        let rv = self.child_view(&node, r).into_owned();
        self.nodes.push(lv);
        self.nodes.push(rv);
        let n = self.nodes.len() as u32;
        (n - 2, n - 1)
    }

    fn combine(&mut self, stat: u32, l: u32, r: u32) -> u32 {
        let s4 = 4 * self.slopes.len();
        let half = s4 / 2;
        let (a, b) = (&self.nodes[l as usize], &self.nodes[r as usize]);
        let mut ext = vec![0.0; s4].into_boxed_slice();
        for q in 0..s4 {
            // Minima live in [0, s) and [2s, 3s).
            let is_min = (q % half) < half / 2;
            ext[q] = if is_min {
                a.ext[q].min(b.ext[q])
            } else {
                a.ext[q].max(b.ext[q])
            };
        }
        let overlap = match (a.overlap, b.overlap) {
            (Overlap::Full, Overlap::Full) => Overlap::Full,
            (Overlap::Disjoint, Overlap::Disjoint) => Overlap::Disjoint,
            _ => Overlap::Mixed,
        };
        let node = Node {
            stat,
            left: l,
            right: r,
            ext,
            bot: a.bot ^ b.bot,
            top: a.top ^ b.top,
            hash: a.hash ^ b.hash,
            overlap,
            bot_lazy: None,
            top_lazy: None,
        };
        self.nodes.push(node);
        self.nodes.len() as u32 - 1
    }

    fn update(&mut self, idx: u32, lo: u32, hi: u32, side: Side, line: BoundaryLine) -> u32 {
        let stat = self.nodes[idx as usize].stat;
        let (slo, shi, depth) = {
            let st = &self.statics[stat as usize];
            (st.lo, st.hi, st.depth)
        };
        if shi < lo || slo > hi {
            return idx;
        }
        self.update_visits.set(self.update_visits.get() + 1);
        let s = self.slopes.len();
        let i = line.dir;
        let a = line.alpha;
        let node = &self.nodes[idx as usize];
        let (bmin, bmax, tmin, tmax) = (node.ext[i], node.ext[s + i], node.ext[2 * s + i], node.ext[3 * s + i]);
        let covered = lo <= slo && shi <= hi;
        let direct = match side {
            Side::Bottom => {
                if a <= bmin {
                    return idx;
                }
                if !covered || a <= bmax {
                    None
                } else if a < tmin {
                    Some(Overlap::Disjoint)
                } else if a >= tmax {
                    Some(Overlap::Full)
                } else {
                    None
                }
            }
            Side::Top => {
                if a >= tmax {
                    return idx;
                }
                if !covered || a >= tmin {
                    None
                } else if a > bmax {
                    Some(Overlap::Disjoint)
                } else if a <= bmin {
                    Some(Overlap::Full)
                } else {
                    None
                }
            }
        };
        if let Some(overlap) = direct {
            let mut n = node.clone();
            self.set_line(&mut n, side, line);
            n.overlap = overlap;
            self.finish_hash(&mut n);
            self.nodes.push(n);
            return self.nodes.len() as u32 - 1;
        }
        debug_assert!(!self.statics[stat as usize].is_leaf(), "leaf updates are always direct");
        if covered {
            let c = &mut self.level_scratch[depth as usize];
            *c += 1;
            if *c > self.max_split_per_level.get() {
                self.max_split_per_level.set(*c);
            }
        }
        let (l, r) = self.push(idx);
        let l2 = self.update(l, lo, hi, side, line);
        let r2 = self.update(r, lo, hi, side, line);
        self.combine(stat, l2, r2)
    }

    /// Applies one boundary update to the points with `x ∈ [xl, xr]`
    /// (closed, widened by the tolerance). Bottom updates mark points with
    /// `y ≤ line(x)`, top updates points with `y ≥ line(x)`.
    pub fn mark_line(
        &mut self,
        v: StripeVersion,
        side: Side,
        line: BoundaryLine,
        xl: f64,
        xr: f64,
    ) -> Result<StripeVersion> {
        self.check(v)?;
        if line.dir >= self.slopes.len() || !line.alpha.is_finite() {
            return Err(Error::InvalidArgument(format!("bad boundary line {line:?}")));
        }
        let lo = self.xs.partition_point(|&x| x < xl - EPS);
        let hi = self.xs.partition_point(|&x| x <= xr + EPS);
        if lo >= hi {
            return Ok(v);
        }
        let alpha = match side {
            Side::Bottom => line.alpha + EPS,
            Side::Top => line.alpha - EPS,
        };
        self.updates.set(self.updates.get() + 1);
        self.level_scratch.iter_mut().for_each(|c| *c = 0);
        let root = self.update(v.root, lo as u32, hi as u32 - 1, side, BoundaryLine { alpha, ..line });
        Ok(StripeVersion { root, ..v })
    }

    /// Marks the points of this band covered by `shape` placed at `center`.
    pub fn mark(&mut self, v: StripeVersion, shape: &MarkShape, center: Point) -> Result<StripeVersion> {
        if shape.slopes != self.slopes {
            return Err(Error::InvalidArgument("shape slopes differ from the stripe's".into()));
        }
        let y0 = self.band as f64;
        let mut v = v;
        for t in &shape.parts {
            let (xl, xr) = (center.x + t.xl, center.x + t.xr);
            let place = |l: BoundaryLine| BoundaryLine {
                dir: l.dir,
                alpha: l.alpha + center.y - self.slopes[l.dir] * center.x,
            };
            let (bot, top) = (place(t.bottom), place(t.top));
            let beta = self.slopes[bot.dir];
            // Where the bottom edge is at or below y0 the shape covers the
            // band from below up to its top edge; elsewhere (chords being at
            // least 1 tall) from its bottom edge up past the band.
            let (below, above) = if beta == 0.0 {
                if bot.alpha <= y0 {
                    (Some((xl, xr)), None)
                } else {
                    (None, Some((xl, xr)))
                }
            } else {
                let xs = (y0 - bot.alpha) / beta;
                let clip = |a: f64, b: f64| (a <= b).then_some((a, b));
                if beta > 0.0 {
                    (clip(xl, xr.min(xs)), clip(xl.max(xs), xr))
                } else {
                    (clip(xl.max(xs), xr), clip(xl, xr.min(xs)))
                }
            };
            if let Some((a, b)) = below {
                v = self.mark_line(v, Side::Bottom, top, a, b)?;
            }
            if let Some((a, b)) = above {
                v = self.mark_line(v, Side::Top, bot, a, b)?;
            }
        }
        Ok(v)
    }

    fn diff(&self, a: &Node, b: &Node, out: &mut Vec<usize>) {
        if a.hash == b.hash {
            return;
        }
        self.list_visits.set(self.list_visits.get() + 1);
        let st = &self.statics[a.stat as usize];
        if st.is_leaf() {
            out.push(self.ids[st.lo as usize]);
            return;
        }
        let (al, ar) = (self.child_view(a, a.left), self.child_view(a, a.right));
        let (bl, br) = (self.child_view(b, b.left), self.child_view(b, b.right));
        self.diff(&al, &bl, out);
        self.diff(&ar, &br, out);
    }

    /// Global ids in exactly one of the two marked sets, in x order.
    pub fn list_differences(&self, a: StripeVersion, b: StripeVersion) -> Result<Vec<usize>> {
        self.check(a)?;
        self.check(b)?;
        let mut out = Vec::new();
        if a.root != b.root {
            self.diff(&self.nodes[a.root as usize], &self.nodes[b.root as usize], &mut out);
        }
        Ok(out)
    }

    /// Marked global ids, ascending.
    pub fn marked(&self, v: StripeVersion) -> Result<Vec<usize>> {
        let mut out: Vec<usize> = self
            .leaf_states(v)?
            .into_iter()
            .filter(|s| s.marked)
            .map(|s| s.id)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// Effective boundaries of every point, in x order.
    pub fn leaf_states(&self, v: StripeVersion) -> Result<Vec<LeafState>> {
        self.check(v)?;
        let mut out = Vec::with_capacity(self.len());
        self.walk(v.root, None, None, &mut out);
        Ok(out)
    }

    fn walk(&self, idx: u32, bot: Option<BoundaryLine>, top: Option<BoundaryLine>, out: &mut Vec<LeafState>) {
        let node = &self.nodes[idx as usize];
        let st = &self.statics[node.stat as usize];
        let bot = bot.or(node.bot_lazy);
        let top = top.or(node.top_lazy);
        if st.is_leaf() {
            let s = self.slopes.len();
            let i = st.lo as usize;
            let p = self.points[i];
            let eval = |l: BoundaryLine| l.alpha + self.slopes[l.dir] * p.x;
            let key = |l: BoundaryLine| st.keys[l.dir][0];
            let zero = self.slopes.iter().position(|&x| x == 0.0).unwrap();
            let (bottom, bmarked) = match bot {
                Some(l) => (eval(l), key(l) <= l.alpha),
                None => (node.ext[zero], !node.bot.is_empty()),
            };
            let (topv, tmarked) = match top {
                Some(l) => (eval(l), key(l) >= l.alpha),
                None => (node.ext[2 * s + zero], !node.top.is_empty()),
            };
            out.push(LeafState {
                id: self.ids[i],
                point: p,
                bottom,
                top: topv,
                marked: bmarked || tmarked,
            });
            return;
        }
        self.walk(node.left, bot, top, out);
        self.walk(node.right, bot, top, out);
    }

    /// Checks every structural invariant reachable from `v`; returns the
    /// number of violations and a description of the first few.
    pub fn audit(&self, v: StripeVersion, keys: &KeyTable) -> Result<(usize, Vec<String>)> {
        self.check(v)?;
        let mut problems = Vec::new();
        self.audit_node(v.root, false, keys, &mut problems);
        let n = problems.len();
        problems.truncate(8);
        Ok((n, problems))
    }

    /// Returns the leaf states under `idx` (with ancestors' tags applied).
    fn audit_node(&self, idx: u32, outdated: bool, keys: &KeyTable, problems: &mut Vec<String>) -> Vec<LeafState> {
        let node = &self.nodes[idx as usize];
        let st = &self.statics[node.stat as usize];
        let leaves = if st.is_leaf() {
            let mut out = Vec::new();
            self.walk(idx, None, None, &mut out);
            out
        } else {
            let lazy = node.bot_lazy.is_some() || node.top_lazy.is_some();
            let mut l = self.audit_node(node.left, outdated || lazy, keys, problems);
            let r = self.audit_node(node.right, outdated || lazy, keys, problems);
            l.extend(r);
            l
        };
        // Re-derive the leaf states as seen from here (tags applied).
        let mut here = Vec::new();
        self.walk(idx, None, None, &mut here);
        if outdated {
            return here;
        }
        let s = self.slopes.len();
        let tol = 1e-9;
        for (j, &bj) in self.slopes.iter().enumerate() {
            let vals = |f: fn(&LeafState) -> f64| here.iter().map(move |q| f(q) - bj * q.point.x);
            let (bmin, bmax) = vals(|q| q.bottom).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            let (tmin, tmax) = vals(|q| q.top).fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x), b.max(x)));
            for (q, want) in [(j, bmin), (s + j, bmax), (2 * s + j, tmin), (3 * s + j, tmax)] {
                if (node.ext[q] - want).abs() > tol * want.abs().max(1.0) {
                    problems.push(format!("node {idx}: extreme {q} is {} expected {want}", node.ext[q]));
                }
            }
        }
        let fp = |pred: &dyn Fn(&LeafState) -> bool| {
            here.iter().filter(|q| pred(q)).fold(Fingerprint::EMPTY, |a, q| a ^ keys.key(q.id))
        };
        let marked = fp(&|q| q.marked);
        if node.hash != marked {
            problems.push(format!("node {idx}: hash disagrees with marked points"));
        }
        if let Some(l) = node.bot_lazy {
            let b = self.slopes[l.dir];
            if here.iter().any(|q| (q.bottom - b * q.point.x - l.alpha).abs() > tol * l.alpha.abs().max(1.0)) {
                problems.push(format!("node {idx}: bottom tag but boundary is not that line"));
            }
        }
        if let Some(l) = node.top_lazy {
            let b = self.slopes[l.dir];
            if here.iter().any(|q| (q.top - b * q.point.x - l.alpha).abs() > tol * l.alpha.abs().max(1.0)) {
                problems.push(format!("node {idx}: top tag but boundary is not that line"));
            }
        }
        if (node.bot_lazy.is_some() || node.top_lazy.is_some()) && node.overlap == Overlap::Mixed {
            problems.push(format!("node {idx}: tagged node with mixed overlap"));
        }
        if node.overlap == Overlap::Full && here.iter().any(|q| !q.marked) {
            problems.push(format!("node {idx}: claims all points marked"));
        }
        if node.overlap == Overlap::Disjoint && node.hash != node.bot ^ node.top {
            problems.push(format!("node {idx}: disjoint node with hash != bot ^ top"));
        }
        debug_assert_eq!(leaves.len(), here.len());
        here
    }
}

/// A shape decomposed into vertical-sided trapezoids whose bottom and top
/// edges use slopes from a shared list; coordinates relative to the
/// shape's centre. Every vertical chord must be at least 1 long.
#[derive(Clone, Debug, PartialEq)]
pub struct MarkShape {
    pub slopes: Vec<f64>,
    pub parts: Vec<ShapePart>,
    /// Vertical extent relative to the centre.
    pub ymin: f64,
    pub ymax: f64,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ShapePart {
    pub xl: f64,
    pub xr: f64,
    pub bottom: BoundaryLine,
    pub top: BoundaryLine,
}

impl MarkShape {
    /// Axis-aligned square of side 1 centred at the origin.
    pub fn unit_square() -> Self {
        Self {
            slopes: vec![0.0],
            parts: vec![ShapePart {
                xl: -0.5,
                xr: 0.5,
                bottom: BoundaryLine { dir: 0, alpha: -0.5 },
                top: BoundaryLine { dir: 0, alpha: 0.5 },
            }],
            ymin: -0.5,
            ymax: 0.5,
        }
    }

    /// From a polygon whose vertical chords are all at least 1 long (e.g.
    /// the output of [`crate::geometry::normalize_polygon`]).
    pub fn from_polygon(f: &crate::geometry::ConvexPolygon) -> Result<Self> {
        let traps = crate::geometry::trapezoid_decompose(f);
        let mut slopes = vec![0.0];
        let mut dir_of = |s: f64| -> usize {
            let s = if s.abs() <= 1e-12 { 0.0 } else { s };
            match slopes.iter().position(|&x| (x - s).abs() <= 1e-12) {
                Some(i) => i,
                None => {
                    slopes.push(s);
                    slopes.len() - 1
                }
            }
        };
        let mut parts = Vec::with_capacity(traps.len());
        for t in &traps {
            for x in [t.xl, t.xr] {
                if t.top.at(x) - t.bottom.at(x) < 1.0 - 1e-9 {
                    return Err(Error::InvalidArgument(format!(
                        "vertical chord at x = {x} is shorter than 1"
                    )));
                }
            }
            parts.push(ShapePart {
                xl: t.xl,
                xr: t.xr,
                bottom: BoundaryLine {
                    dir: dir_of(t.bottom.slope),
                    alpha: t.bottom.intercept,
                },
                top: BoundaryLine {
                    dir: dir_of(t.top.slope),
                    alpha: t.top.intercept,
                },
            });
        }
        let (lo, hi) = f.bounding_box();
        Ok(Self {
            slopes,
            parts,
            ymin: lo.y,
            ymax: hi.y,
        })
    }

    /// Boundary-inclusive containment of `p` in the shape placed at `c`.
    pub fn covers(&self, c: Point, p: Point) -> bool {
        let q = p - c;
        self.parts.iter().any(|t| {
            q.x >= t.xl - EPS
                && q.x <= t.xr + EPS
                && q.y >= t.bottom.alpha + self.slopes[t.bottom.dir] * q.x - EPS
                && q.y <= t.top.alpha + self.slopes[t.top.dir] * q.x + EPS
        })
    }
}
