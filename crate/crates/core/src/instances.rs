//! Seeded generators for test and benchmark instances.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::geometry::{intersection_graph_naive, ConvexPolygon, Point};
use crate::graph::Graph;

/// Connected simple graph with `n` vertices and `m` edges: a random
/// recursive tree on a shuffled labelling plus `m - n + 1` distinct extra
/// edges drawn uniformly.
pub fn random_connected_graph<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Graph> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let max_edges = n * (n - 1) / 2;
    if m + 1 < n || m > max_edges {
        return Err(Error::InvalidArgument(format!(
            "a connected simple graph on {n} vertices has between {} and {max_edges} edges, got {m}",
            n - 1
        )));
    }
    let mut label: Vec<usize> = (0..n).collect();
    label.shuffle(rng);
    let mut seen = HashSet::with_capacity(m);
    let mut edges = Vec::with_capacity(m);
    for i in 1..n {
        let j = rng.gen_range(0..i);
        let e = (label[i].min(label[j]), label[i].max(label[j]));
        seen.insert(e);
        edges.push(e);
    }
    if m - edges.len() > max_edges / 2 {
        // Dense request: draw from the complement list instead of rejection.
        let mut rest: Vec<(usize, usize)> = (0..n)
            .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
            .filter(|e| !seen.contains(e))
            .collect();
        rest.shuffle(rng);
        edges.extend(rest.into_iter().take(m - (n - 1)));
    } else {
        while edges.len() < m {
            let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
            if u != v && seen.insert((u.min(v), u.max(v))) {
                edges.push((u.min(v), u.max(v)));
            }
        }
    }
    Graph::from_edges(n, &edges)
}

/// `n` points uniform in `[0, side)^2`.
pub fn random_points<R: Rng + ?Sized>(n: usize, side: f64, rng: &mut R) -> Vec<Point> {
    (0..n)
        .map(|_| Point::new(rng.gen_range(0.0..side), rng.gen_range(0.0..side)))
        .collect()
}

/// Resamples [`random_points`] until the intersection graph of the
/// translates of `f` is connected; gives up after `attempts` tries.
pub fn random_connected_points<R: Rng + ?Sized>(
    n: usize,
    side: f64,
    f: &ConvexPolygon,
    attempts: usize,
    rng: &mut R,
) -> Result<(Vec<Point>, Graph)> {
    for _ in 0..attempts {
        let pts = random_points(n, side, rng);
        match intersection_graph_naive(&pts, f) {
            Ok(g) if g.is_connected() => return Ok((pts, g)),
            Ok(_) | Err(Error::DuplicatePoint { .. }) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Disconnected)
}

/// Strictly convex `s`-gon inscribed in a random rotated ellipse around the
/// origin, with angular gaps bounded away from zero.
pub fn random_convex_polygon<R: Rng + ?Sized>(s: usize, rng: &mut R) -> Result<ConvexPolygon> {
    if s < 3 {
        return Err(Error::InvalidArgument("need at least 3 sides".into()));
    }
    let (a, b) = (rng.gen_range(0.5..1.5), rng.gen_range(0.5..1.5));
    let tilt: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
    let step = std::f64::consts::TAU / s as f64;
    let base = rng.gen_range(0.0..step);
    let (st, ct) = tilt.sin_cos();
    let vertices = (0..s)
        .map(|i| {
            let t = base + step * (i as f64 + rng.gen_range(-0.3..0.3));
            let (x, y) = (a * t.cos(), b * t.sin());
            Point::new(ct * x - st * y, st * x + ct * y)
        })
        .collect();
    ConvexPolygon::new(vertices)
}
