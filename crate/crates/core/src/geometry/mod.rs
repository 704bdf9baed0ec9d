//! Convex polygons in the plane and intersection graphs of their translates.

use std::fmt::Write as _;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::graph::Graph;

/// Absolute tolerance for every geometric predicate.
pub const EPS: f64 = 1e-9;

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub const ORIGIN: Point = Point { x: 0.0, y: 0.0 };

    pub const fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn dot(self, o: Point) -> f64 {
        self.x * o.x + self.y * o.y
    }

    pub fn cross(self, o: Point) -> f64 {
        self.x * o.y - self.y * o.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }

    fn dist(self, o: Point) -> f64 {
        (self - o).norm()
    }
}

impl Add for Point {
    type Output = Point;
    fn add(self, o: Point) -> Point {
        Point::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Point {
    type Output = Point;
    fn sub(self, o: Point) -> Point {
        Point::new(self.x - o.x, self.y - o.y)
    }
}

impl Neg for Point {
    type Output = Point;
    fn neg(self) -> Point {
        Point::new(-self.x, -self.y)
    }
}

impl Mul<f64> for Point {
    type Output = Point;
    fn mul(self, k: f64) -> Point {
        Point::new(self.x * k, self.y * k)
    }
}

/// Strictly convex polygon, vertices counter-clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexPolygon {
    vertices: Vec<Point>,
}

fn signed_area2(v: &[Point]) -> f64 {
    (0..v.len())
        .map(|i| v[i].cross(v[(i + 1) % v.len()]))
        .sum()
}

impl ConvexPolygon {
    /// Validates strict convexity. Clockwise input is reversed.
    pub fn new(mut vertices: Vec<Point>) -> Result<Self> {
        if vertices.len() < 3 {
            return Err(Error::DegeneratePolygon(format!(
                "{} vertices",
                vertices.len()
            )));
        }
        if vertices.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegeneratePolygon("non-finite coordinate".into()));
        }
        if signed_area2(&vertices) < 0.0 {
            vertices.reverse();
        }
        let n = vertices.len();
        for i in 0..n {
            let (a, b, c) = (vertices[i], vertices[(i + 1) % n], vertices[(i + 2) % n]);
            let turn = (b - a).cross(c - b);
            if turn <= EPS * (b - a).norm().max(1.0) * (c - b).norm().max(1.0) {
                return Err(Error::DegeneratePolygon(format!(
                    "vertices {i}..{} are not strictly convex",
                    (i + 2) % n
                )));
            }
        }
        Ok(Self { vertices })
    }

    /// Axis-aligned square `[-half, half]^2`.
    pub fn square(half: f64) -> Self {
        Self {
            vertices: vec![
                Point::new(-half, -half),
                Point::new(half, -half),
                Point::new(half, half),
                Point::new(-half, half),
            ],
        }
    }

    /// Unit-side square centred at the origin.
    pub fn unit_square() -> Self {
        Self::square(0.5)
    }

    /// Regular `s`-gon with circumradius `r`, first vertex at angle `phase`.
    pub fn regular(s: usize, r: f64, phase: f64) -> Result<Self> {
        let v = (0..s)
            .map(|i| {
                let t = phase + std::f64::consts::TAU * i as f64 / s as f64;
                Point::new(r * t.cos(), r * t.sin())
            })
            .collect();
        Self::new(v)
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn side_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edges(&self) -> impl Iterator<Item = (Point, Point)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area2(&self.vertices) / 2.0
    }

    /// Boundary-inclusive containment.
    pub fn contains(&self, p: Point) -> bool {
        self.edges()
            .all(|(a, b)| (b - a).cross(p - a) >= -EPS * (b - a).norm())
    }

    pub fn translate(&self, t: Point) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| v + t).collect(),
        }
    }

    pub fn scale(&self, k: f64) -> Result<Self> {
        if !(k.is_finite() && k > 0.0) {
            return Err(Error::InvalidArgument(format!("scale factor {k}")));
        }
        Ok(Self {
            vertices: self.vertices.iter().map(|&v| v * k).collect(),
        })
    }

    /// Point reflection through the origin.
    pub fn negate(&self) -> Self {
        Self {
            vertices: self.vertices.iter().map(|&v| -v).collect(),
        }
    }

    pub fn transform(&self, map: &AffineMap) -> Result<Self> {
        Self::new(self.vertices.iter().map(|&v| map.apply(v)).collect())
    }

    /// Centrally symmetric about the origin: vertex `i + s/2` is `-vertex i`.
    pub fn is_centrally_symmetric(&self) -> bool {
        let s = self.vertices.len();
        s.is_multiple_of(2)
            && (0..s).all(|i| {
                let (a, b) = (self.vertices[i], self.vertices[(i + s / 2) % s]);
                (a + b).norm() <= EPS * a.norm().max(1.0) * 10.0
            })
    }

    pub fn bounding_box(&self) -> (Point, Point) {
        let fold = |f: fn(f64, f64) -> f64, init: f64, c: fn(&Point) -> f64| {
            self.vertices.iter().map(c).fold(init, f)
        };
        (
            Point::new(
                fold(f64::min, f64::INFINITY, |p| p.x),
                fold(f64::min, f64::INFINITY, |p| p.y),
            ),
            Point::new(
                fold(f64::max, f64::NEG_INFINITY, |p| p.x),
                fold(f64::max, f64::NEG_INFINITY, |p| p.y),
            ),
        )
    }

    /// Projection interval of the polygon onto `n`.
    fn project(&self, n: Point) -> (f64, f64) {
        self.vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
            let d = v.dot(n);
            (lo.min(d), hi.max(d))
        })
    }

    /// Do the closed translates `u + self` and `v + self` meet? Separating
    /// axis test over the edge normals.
    pub fn translates_intersect(&self, u: Point, v: Point) -> bool {
        let d = u - v;
        self.edges().all(|(a, b)| {
            let n = Point::new(b.y - a.y, a.x - b.x);
            let (lo, hi) = self.project(n);
            d.dot(n).abs() <= (hi - lo) + EPS * n.norm()
        })
    }
}

/// Minkowski sum of two convex vertex lists in counter-clockwise order; a
/// single-point operand is allowed. Collinear edges are merged.
pub fn minkowski_hull(p: &[Point], q: &[Point]) -> Result<Vec<Point>> {
    if p.is_empty() || q.is_empty() {
        return Err(Error::DegeneratePolygon("empty operand".into()));
    }
    if p.len() == 1 || q.len() == 1 {
        let (t, poly) = if p.len() == 1 { (p[0], q) } else { (q[0], p) };
        return Ok(poly.iter().map(|&v| v + t).collect());
    }
    let start = |v: &[Point]| {
        (0..v.len())
            .min_by(|&i, &j| {
                (v[i].y, v[i].x)
                    .partial_cmp(&(v[j].y, v[j].x))
                    .expect("finite coordinates")
            })
            .unwrap()
    };
    let (sp, sq) = (start(p), start(q));
    let (np, nq) = (p.len(), q.len());
    let edge = |v: &[Point], s: usize, i: usize| v[(s + i + 1) % v.len()] - v[(s + i) % v.len()];
    let mut out = Vec::with_capacity(np + nq);
    let (mut i, mut j) = (0, 0);
    let mut cur = p[sp] + q[sq];
    while i < np || j < nq {
        out.push(cur);
        let step = if i == np {
            let e = edge(q, sq, j);
            j += 1;
            e
        } else if j == nq {
            let e = edge(p, sp, i);
            i += 1;
            e
        } else {
            let (ep, eq) = (edge(p, sp, i), edge(q, sq, j));
            let c = ep.cross(eq);
            if c > 0.0 {
                i += 1;
                ep
            } else if c < 0.0 {
                j += 1;
                eq
            } else {
                i += 1;
                j += 1;
                ep + eq
            }
        };
        cur = cur + step;
    }
    Ok(drop_collinear(out))
}

fn drop_collinear(mut v: Vec<Point>) -> Vec<Point> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let bad = (0..n).find(|&i| {
            let (a, b, c) = (v[(i + n - 1) % n], v[i], v[(i + 1) % n]);
            let scale = (b - a).norm().max(1.0) * (c - b).norm().max(1.0);
            (b - a).cross(c - b).abs() <= EPS * scale || a.dist(b) <= EPS
        });
        match bad {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

pub fn minkowski_sum(p: &ConvexPolygon, q: &ConvexPolygon) -> Result<ConvexPolygon> {
    ConvexPolygon::new(minkowski_hull(&p.vertices, &q.vertices)?)
}

/// `½ (F ⊕ −F)`: centrally symmetric about the origin, and translates of it
/// intersect exactly when the corresponding translates of `F` do.
pub fn symmetrize(f: &ConvexPolygon) -> ConvexPolygon {
    let sum = minkowski_hull(&f.vertices, &f.negate().vertices)
        .expect("non-empty operands")
        .into_iter()
        .map(|v| v * 0.5)
        .collect();
    ConvexPolygon::new(sum).expect("sum of a polygon with its reflection is non-degenerate")
}

/// Gauge `min { r >= 0 : x ∈ r·F }` of a polygon with the origin in its
/// interior.
pub fn norm_value(f: &ConvexPolygon, x: Point) -> Result<f64> {
    let mut best = 0.0f64;
    for (a, b) in f.edges() {
        let n = Point::new(b.y - a.y, a.x - b.x);
        let c = n.dot(a);
        if c <= EPS * n.norm() {
            return Err(Error::DegeneratePolygon(
                "origin is not in the interior".into(),
            ));
        }
        best = best.max(n.dot(x) / c);
    }
    Ok(best)
}

/// Distance induced by the gauge of `f`.
pub fn metric(f: &ConvexPolygon, a: Point, b: Point) -> Result<f64> {
    norm_value(f, b - a)
}

fn check_distinct(points: &[Point]) -> Result<()> {
    let mut idx: Vec<usize> = (0..points.len()).collect();
    idx.sort_by(|&i, &j| {
        (points[i].x, points[i].y)
            .partial_cmp(&(points[j].x, points[j].y))
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    for w in idx.windows(2) {
        if points[w[0]] == points[w[1]] {
            return Err(Error::DuplicatePoint {
                first: w[0].min(w[1]),
                second: w[0].max(w[1]),
            });
        }
    }
    Ok(())
}

pub fn check_points(points: &[Point]) -> Result<()> {
    if let Some(i) = points.iter().position(|p| !p.is_finite()) {
        return Err(Error::InvalidArgument(format!("point {i} is not finite")));
    }
    check_distinct(points)
}

/// Intersection graph of the closed translates `p + f`, `p ∈ points`. The
/// result may be disconnected.
pub fn intersection_graph_naive(points: &[Point], f: &ConvexPolygon) -> Result<Graph> {
    check_points(points)?;
    let (lo, hi) = f.bounding_box();
    let (w, h) = (2.0 * (hi.x - lo.x) + EPS, 2.0 * (hi.y - lo.y) + EPS);
    let mut by_x: Vec<usize> = (0..points.len()).collect();
    by_x.sort_by(|&i, &j| points[i].x.total_cmp(&points[j].x).then(i.cmp(&j)));
    let mut edges = Vec::new();
    for (a, &i) in by_x.iter().enumerate() {
        for &j in &by_x[a + 1..] {
            if points[j].x - points[i].x > w {
                break;
            }
            if (points[j].y - points[i].y).abs() <= h
                && f.translates_intersect(points[i], points[j])
            {
                edges.push((i.min(j), i.max(j)));
            }
        }
    }
    Graph::from_edges_unchecked_connectivity(points.len(), &edges)
}

/// Adjacency by `u ∈ v + 2F`; agrees with [`intersection_graph_naive`] when
/// `f` is centrally symmetric.
pub fn adjacent_by_containment(f: &ConvexPolygon, u: Point, v: Point) -> bool {
    f.contains((u - v) * 0.5)
}

/// `p ↦ L p + t`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineMap {
    pub linear: [[f64; 2]; 2],
    pub translation: Point,
}

impl AffineMap {
    pub const IDENTITY: AffineMap = AffineMap {
        linear: [[1.0, 0.0], [0.0, 1.0]],
        translation: Point::ORIGIN,
    };

    pub fn linear(m: [[f64; 2]; 2]) -> Result<Self> {
        let map = Self {
            linear: m,
            translation: Point::ORIGIN,
        };
        if map.determinant().abs() <= EPS || !map.determinant().is_finite() {
            return Err(Error::InvalidArgument("singular affine map".into()));
        }
        Ok(map)
    }

    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self {
            linear: [[c, -s], [s, c]],
            translation: Point::ORIGIN,
        }
    }

    pub fn determinant(&self) -> f64 {
        let m = &self.linear;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }

    pub fn apply(&self, p: Point) -> Point {
        let m = &self.linear;
        Point::new(
            m[0][0] * p.x + m[0][1] * p.y + self.translation.x,
            m[1][0] * p.x + m[1][1] * p.y + self.translation.y,
        )
    }

    /// `self ∘ inner`.
    pub fn compose(&self, inner: &AffineMap) -> AffineMap {
        let (a, b) = (&self.linear, &inner.linear);
        let mut linear = [[0.0; 2]; 2];
        for (r, row) in linear.iter_mut().enumerate() {
            for (c, cell) in row.iter_mut().enumerate() {
                *cell = a[r][0] * b[0][c] + a[r][1] * b[1][c];
            }
        }
        let t = self.apply(inner.translation);
        AffineMap {
            linear,
            translation: t,
        }
    }

    pub fn inverse(&self) -> Result<AffineMap> {
        let det = self.determinant();
        if det.abs() <= EPS {
            return Err(Error::InvalidArgument("singular affine map".into()));
        }
        let m = &self.linear;
        let inv = AffineMap {
            linear: [[m[1][1] / det, -m[0][1] / det], [-m[1][0] / det, m[0][0] / det]],
            translation: Point::ORIGIN,
        };
        let t = inv.apply(self.translation);
        Ok(AffineMap {
            translation: -t,
            ..inv
        })
    }

    pub fn approx_eq(&self, o: &AffineMap, tol: f64) -> bool {
        (0..2).all(|r| (0..2).all(|c| (self.linear[r][c] - o.linear[r][c]).abs() <= tol))
            && (self.translation - o.translation).norm() <= tol
    }
}

/// Rotation angle in `(-π/2, π/2]` turning direction `e` vertical.
fn angle_to_vertical(e: Point) -> f64 {
    use std::f64::consts::{FRAC_PI_2, PI};
    let mut t = FRAC_PI_2 - e.y.atan2(e.x);
    while t <= -FRAC_PI_2 {
        t += PI;
    }
    while t > FRAC_PI_2 {
        t -= PI;
    }
    if (t - FRAC_PI_2).abs() <= 1e-12 || (t + FRAC_PI_2).abs() <= 1e-12 {
        FRAC_PI_2
    } else if t.abs() <= 1e-12 {
        0.0
    } else {
        t
    }
}

/// Maps a centrally symmetric polygon with an even number of sides to one
/// with `x`-extent `[-½, ½]`, whose two vertical sides are `x = ±½,
/// y ∈ [-½, ½]`. Such a polygon contains the unit square and each of its
/// vertical chords is at least 1 long. Returns the polygon and the linear
/// map applied to it (apply the same map to point sets).
pub fn normalize_polygon(f: &ConvexPolygon) -> Result<(ConvexPolygon, AffineMap)> {
    if !f.is_centrally_symmetric() {
        return Err(Error::InvalidArgument(
            "polygon must be centrally symmetric about the origin".into(),
        ));
    }
    let sides: Vec<Point> = f.edges().map(|(a, b)| b - a).collect();
    let longest = sides.iter().map(|e| e.norm()).fold(0.0, f64::max);
    let chosen = sides
        .iter()
        .filter(|e| e.norm() >= longest * (1.0 - 1e-9))
        .map(|&e| (angle_to_vertical(e), e))
        .min_by(|a, b| a.0.abs().total_cmp(&b.0.abs()).then(b.0.total_cmp(&a.0)))
        .expect("polygon has sides");
    let rot = AffineMap::rotation(chosen.0);
    let rotated: Vec<Point> = f.vertices.iter().map(|&v| rot.apply(v)).collect();
    let len = chosen.1.norm();
    let half_width = rotated.iter().map(|p| p.x).fold(0.0, f64::max) / len;
    let scale = AffineMap::linear([[1.0 / (2.0 * half_width * len), 0.0], [0.0, 1.0 / len]])?;
    let stage = scale.compose(&rot);
    let scaled: Vec<Point> = f.vertices.iter().map(|&v| stage.apply(v)).collect();
    let ya = scaled
        .iter()
        .filter(|p| (p.x - 0.5).abs() <= 1e-9)
        .map(|p| p.y)
        .fold(f64::INFINITY, f64::min);
    let c = (ya + 0.5) / 0.5;
    let shear = AffineMap::linear([[1.0, 0.0], [-c, 1.0]])?;
    let mut map = shear.compose(&stage);
    if map.approx_eq(&AffineMap::IDENTITY, 1e-12) {
        map = AffineMap::IDENTITY;
    }
    let out = ConvexPolygon::new(
        f.vertices
            .iter()
            .map(|&v| snap(map.apply(v)))
            .collect(),
    )?;
    Ok((out, map))
}

/// Rounds coordinates within `1e-12` of a multiple of ½ onto it.
fn snap(p: Point) -> Point {
    let s = |v: f64| {
        let r = (v * 2.0).round() / 2.0;
        if (v - r).abs() <= 1e-12 {
            r
        } else {
            v
        }
    };
    Point::new(s(p.x), s(p.y))
}

/// Maximum vertical chord length.
pub fn polygon_height(f: &ConvexPolygon) -> f64 {
    let (lo, hi) = f.bounding_box();
    hi.y - lo.y
}

/// Line `y = slope * x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Line {
    pub slope: f64,
    pub intercept: f64,
}

impl Line {
    pub fn through(a: Point, b: Point) -> Self {
        let slope = (b.y - a.y) / (b.x - a.x);
        Self {
            slope,
            intercept: a.y - slope * a.x,
        }
    }

    pub fn at(&self, x: f64) -> f64 {
        self.slope * x + self.intercept
    }
}

/// `{(x, y) : xl <= x <= xr, bottom(x) <= y <= top(x)}`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Trapezoid {
    pub xl: f64,
    pub xr: f64,
    pub bottom: Line,
    pub top: Line,
}

impl Trapezoid {
    pub fn area(&self) -> f64 {
        let h = |x| self.top.at(x) - self.bottom.at(x);
        (self.xr - self.xl) * (h(self.xl) + h(self.xr)) / 2.0
    }

    pub fn contains(&self, p: Point) -> bool {
        p.x >= self.xl - EPS
            && p.x <= self.xr + EPS
            && p.y >= self.bottom.at(p.x) - EPS
            && p.y <= self.top.at(p.x) + EPS
    }
}

/// Cuts `f` with vertical lines through its vertices.
pub fn trapezoid_decompose(f: &ConvexPolygon) -> Vec<Trapezoid> {
    let mut xs: Vec<f64> = f.vertices.iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= EPS);
    let mut out = Vec::with_capacity(xs.len().saturating_sub(1));
    for w in xs.windows(2) {
        let mid = (w[0] + w[1]) / 2.0;
        let mut crossing: Vec<Line> = f
            .edges()
            .filter(|(a, b)| (a.x - b.x).abs() > EPS && a.x.min(b.x) <= mid && mid <= a.x.max(b.x))
            .map(|(a, b)| Line::through(a, b))
            .collect();
        crossing.sort_by(|l, m| l.at(mid).total_cmp(&m.at(mid)));
        debug_assert_eq!(crossing.len(), 2);
        out.push(Trapezoid {
            xl: w[0],
            xr: w[1],
            bottom: crossing[0],
            top: crossing[crossing.len() - 1],
        });
    }
    out
}

/// `x,y` per line; blank lines are skipped.
pub fn parse_points(text: &str) -> Result<Vec<Point>> {
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() {
            continue;
        }
        out.push(parse_xy(line, i + 1)?);
    }
    Ok(out)
}

fn parse_xy(line: &str, lineno: usize) -> Result<Point> {
    let bad = |msg: &str| Error::Parse {
        line: lineno,
        msg: msg.to_string(),
    };
    let mut parts = line.split(',').map(str::trim);
    let x = parts.next().ok_or_else(|| bad("missing x"))?;
    let y = parts.next().ok_or_else(|| bad("missing y"))?;
    if parts.next().is_some() {
        return Err(bad("expected two fields"));
    }
    let p = Point::new(
        x.parse().map_err(|_| bad("bad x"))?,
        y.parse().map_err(|_| bad("bad y"))?,
    );
    if !p.is_finite() {
        return Err(bad("non-finite coordinate"));
    }
    Ok(p)
}

pub fn points_to_csv(points: &[Point]) -> String {
    let mut s = String::new();
    for p in points {
        writeln!(s, "{},{}", p.x, p.y).unwrap();
    }
    s
}

/// First line `s`, then `s` lines `x,y` in counter-clockwise order.
pub fn parse_polygon(text: &str) -> Result<ConvexPolygon> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());
    let (_, head) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty polygon file".into(),
    })?;
    let s: usize = head.parse().map_err(|_| Error::Parse {
        line: 1,
        msg: "expected side count".into(),
    })?;
    let vertices = lines
        .map(|(i, l)| parse_xy(l, i))
        .collect::<Result<Vec<_>>>()?;
    if vertices.len() != s {
        return Err(Error::Parse {
            line: 1,
            msg: format!("declared {s} vertices, found {}", vertices.len()),
        });
    }
    ConvexPolygon::new(vertices)
}

pub fn polygon_to_csv(f: &ConvexPolygon) -> String {
    let mut s = format!("{}\n", f.side_count());
    s.push_str(&points_to_csv(&f.vertices));
    s
}

#[cfg(test)]
mod tests;
