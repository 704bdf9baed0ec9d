use super::*;
use crate::instances::{random_convex_polygon, random_points};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn close(a: Point, b: Point) -> bool {
    (a - b).norm() <= 1e-9
}

/// Equal as cyclic vertex sequences.
fn same_polygon(a: &[Point], b: &[Point]) -> bool {
    a.len() == b.len()
        && (0..a.len()).any(|r| (0..a.len()).all(|i| close(a[(i + r) % a.len()], b[i])))
}

/// Gift-wrapping hull without collinear points; independent of the
/// edge-merge code.
fn hull_oracle(pts: &[Point]) -> Vec<Point> {
    let start = *pts
        .iter()
        .min_by(|a, b| (a.x, a.y).partial_cmp(&(b.x, b.y)).unwrap())
        .unwrap();
    let mut hull = vec![start];
    let mut cur = start;
    loop {
        let mut next = if close(pts[0], cur) { pts[1] } else { pts[0] };
        for &p in pts {
            if close(p, cur) {
                continue;
            }
            let c = (next - cur).cross(p - cur);
            if c < -1e-12 || (c.abs() <= 1e-12 && (p - cur).norm() > (next - cur).norm()) {
                next = p;
            }
        }
        if close(next, start) {
            break;
        }
        hull.push(next);
        cur = next;
    }
    hull
}

fn pairwise_sums(p: &[Point], q: &[Point]) -> Vec<Point> {
    p.iter().flat_map(|&a| q.iter().map(move |&b| a + b)).collect()
}

fn triangle() -> ConvexPolygon {
    ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(1.0, 0.0), Point::new(0.0, 1.0)]).unwrap()
}

#[test]
fn polygon_validation() {
    assert!(ConvexPolygon::new(vec![Point::ORIGIN, Point::new(1.0, 0.0)]).is_err());
    let collinear = vec![
        Point::new(0.0, 0.0),
        Point::new(1.0, 0.0),
        Point::new(2.0, 0.0),
        Point::new(1.0, 1.0),
    ];
    assert!(matches!(ConvexPolygon::new(collinear), Err(Error::DegeneratePolygon(_))));
    let cw = ConvexPolygon::new(vec![Point::new(0.0, 0.0), Point::new(0.0, 1.0), Point::new(1.0, 0.0)]).unwrap();
    assert!(cw.area() > 0.0);
}

#[test]
fn minkowski_examples() {
    let sq = ConvexPolygon::unit_square();
    let same = minkowski_hull(sq.vertices(), &[Point::ORIGIN]).unwrap();
    assert!(same_polygon(&same, sq.vertices()));

    let doubled = minkowski_sum(&sq, &sq).unwrap();
    assert!(same_polygon(doubled.vertices(), ConvexPolygon::square(1.0).vertices()));

    let t = triangle();
    let hex = minkowski_sum(&t, &t.negate()).unwrap();
    assert_eq!(hex.side_count(), 6);
    let oracle = hull_oracle(&pairwise_sums(t.vertices(), t.negate().vertices()));
    assert!(same_polygon(hex.vertices(), &oracle));
}

#[test]
fn minkowski_matches_hull_of_sums() {
    let mut r = rng(9);
    for _ in 0..30 {
        let s1 = r.gen_range(3..8);
        let s2 = r.gen_range(3..8);
        let p = random_convex_polygon(s1, &mut r).unwrap();
        let q = random_convex_polygon(s2, &mut r).unwrap();
        let sum = minkowski_sum(&p, &q).unwrap();
        assert!(sum.side_count() <= s1 + s2);
        let oracle = hull_oracle(&pairwise_sums(p.vertices(), q.vertices()));
        assert!(same_polygon(sum.vertices(), &oracle));
    }
}

#[test]
fn symmetrize_examples() {
    let sq = ConvexPolygon::unit_square();
    assert!(same_polygon(symmetrize(&sq).vertices(), sq.vertices()));

    let h = symmetrize(&triangle());
    assert_eq!(h.side_count(), 6);
    assert!(h.is_centrally_symmetric());
    let t = triangle();
    let oracle: Vec<Point> = hull_oracle(&pairwise_sums(t.vertices(), t.negate().vertices()))
        .into_iter()
        .map(|p| p * 0.5)
        .collect();
    assert!(same_polygon(h.vertices(), &oracle));

    let mut r = rng(4);
    for _ in 0..20 {
        let f = random_convex_polygon(5, &mut r).unwrap();
        let h = symmetrize(&f);
        assert!(h.is_centrally_symmetric());
        for &v in h.vertices() {
            assert!(h.contains(-v));
        }
    }
}

#[test]
fn norm_examples() {
    let sq = ConvexPolygon::square(1.0);
    assert_eq!(norm_value(&sq, Point::ORIGIN).unwrap(), 0.0);
    assert!((norm_value(&sq, Point::new(1.0, 0.0)).unwrap() - 1.0).abs() < 1e-12);
    assert!(norm_value(&sq.translate(Point::new(3.0, 3.0)), Point::new(1.0, 0.0)).is_err());
    assert!(norm_value(&sq.translate(Point::new(1.0, 0.0)), Point::new(1.0, 0.0)).is_err());
}

#[test]
fn norm_matches_bisection() {
    let mut r = rng(12);
    for _ in 0..200 {
        let f = symmetrize(&random_convex_polygon(r.gen_range(3..7), &mut r).unwrap());
        let x = Point::new(r.gen_range(-3.0..3.0), r.gen_range(-3.0..3.0));
        let (mut lo, mut hi) = (0.0f64, 1e3f64);
        for _ in 0..200 {
            let mid = (lo + hi) / 2.0;
            let scaled: Vec<Point> = f.vertices().iter().map(|&v| v * mid).collect();
            let inside = scaled
                .iter()
                .zip(scaled.iter().cycle().skip(1))
                .all(|(&a, &b)| (b - a).cross(x - a) >= 0.0);
            if inside {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let v = norm_value(&f, x).unwrap();
        assert!((v - hi).abs() <= 1e-9 * v.max(1.0), "{v} vs {hi}");
        let lambda = r.gen_range(-4.0..4.0);
        let scaled = norm_value(&f, x * lambda).unwrap();
        assert!((scaled - lambda.abs() * v).abs() <= 1e-9 * scaled.max(1.0));
    }
}

#[test]
fn metric_axioms() {
    let mut r = rng(21);
    let f = symmetrize(&random_convex_polygon(5, &mut r).unwrap());
    for _ in 0..2000 {
        let mut p = || Point::new(r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0));
        let (a, b, c) = (p(), p(), p());
        let m = |u, v| metric(&f, u, v).unwrap();
        assert!(m(a, c) <= m(a, b) + m(b, c) + 1e-9);
        assert!((m(a, b) - m(b, a)).abs() <= 1e-9);
        let t = r.gen_range(0.0..1.0);
        let on = a + (c - a) * t;
        assert!((m(a, c) - m(a, on) - m(on, c)).abs() <= 1e-9);
    }
}

fn segments_cross(a: Point, b: Point, c: Point, d: Point) -> bool {
    let o = |p: Point, q: Point, r: Point| (q - p).cross(r - p);
    let (d1, d2, d3, d4) = (o(c, d, a), o(c, d, b), o(a, b, c), o(a, b, d));
    let on = |p: Point, q: Point, r: Point| {
        r.x >= p.x.min(q.x) - 1e-12 && r.x <= p.x.max(q.x) + 1e-12 && r.y >= p.y.min(q.y) - 1e-12 && r.y <= p.y.max(q.y) + 1e-12
    };
    ((d1 > 0.0) != (d2 > 0.0) && (d3 > 0.0) != (d4 > 0.0))
        || (d1.abs() <= 1e-12 && on(c, d, a))
        || (d2.abs() <= 1e-12 && on(c, d, b))
        || (d3.abs() <= 1e-12 && on(a, b, c))
        || (d4.abs() <= 1e-12 && on(a, b, d))
}

/// Vertex-containment plus edge-crossing test for two convex polygons.
fn polygons_meet(p: &ConvexPolygon, q: &ConvexPolygon) -> bool {
    p.vertices().iter().any(|&v| q.contains(v))
        || q.vertices().iter().any(|&v| p.contains(v))
        || p.edges().any(|(a, b)| q.edges().any(|(c, d)| segments_cross(a, b, c, d)))
}

#[test]
fn intersection_graph_examples() {
    let sq = ConvexPolygon::unit_square();
    let far = intersection_graph_naive(&[Point::new(0.0, 0.0), Point::new(3.0, 0.0)], &sq).unwrap();
    assert_eq!(far.edge_count(), 0);
    let near = intersection_graph_naive(&[Point::new(0.0, 0.0), Point::new(0.9, 0.0)], &sq).unwrap();
    assert_eq!(near.edge_count(), 1);
    let touching = intersection_graph_naive(&[Point::new(0.0, 0.0), Point::new(1.0, 1.0)], &sq).unwrap();
    assert_eq!(touching.edge_count(), 1);
    assert!(matches!(
        intersection_graph_naive(&[Point::new(1.0, 2.0), Point::new(0.0, 0.0), Point::new(1.0, 2.0)], &sq),
        Err(Error::DuplicatePoint { first: 0, second: 2 })
    ));
}

#[test]
fn intersection_graph_matches_polygon_oracle() {
    let mut r = rng(33);
    for trial in 0..6 {
        let f = if trial == 0 {
            ConvexPolygon::unit_square()
        } else {
            random_convex_polygon(r.gen_range(3..7), &mut r).unwrap()
        };
        let pts = random_points(50, 6.0, &mut r);
        let g = intersection_graph_naive(&pts, &f).unwrap();
        for i in 0..pts.len() {
            for j in i + 1..pts.len() {
                let expect = polygons_meet(&f.translate(pts[i]), &f.translate(pts[j]));
                assert_eq!(g.neighbors(i).contains(&(j as u32)), expect, "pair {i},{j}");
            }
        }
    }
}

#[test]
fn symmetrization_preserves_intersection_graph() {
    let mut r = rng(77);
    for _ in 0..50 {
        let f = random_convex_polygon(5, &mut r).unwrap();
        let h = symmetrize(&f);
        let pts = random_points(30, 5.0, &mut r);
        let gf = intersection_graph_naive(&pts, &f).unwrap();
        let gh = intersection_graph_naive(&pts, &h).unwrap();
        assert_eq!(gf.edges().collect::<Vec<_>>(), gh.edges().collect::<Vec<_>>());
        for (i, j) in gh.edges() {
            assert!(adjacent_by_containment(&h, pts[i], pts[j]));
        }
    }
}

#[test]
fn affine_map_algebra() {
    let m = AffineMap {
        linear: [[2.0, 1.0], [0.5, 3.0]],
        translation: Point::new(1.0, -2.0),
    };
    let inv = m.inverse().unwrap();
    let p = Point::new(0.3, -1.7);
    assert!(close(inv.apply(m.apply(p)), p));
    assert!(m.compose(&inv).approx_eq(&AffineMap::IDENTITY, 1e-12));
    assert!(AffineMap::linear([[1.0, 2.0], [2.0, 4.0]]).is_err());
}

fn check_normalized(g: &ConvexPolygon, s: usize) {
    let (lo, hi) = g.bounding_box();
    assert!((lo.x + 0.5).abs() <= 1e-9 && (hi.x - 0.5).abs() <= 1e-9);
    for c in [(-0.5, -0.5), (0.5, -0.5), (0.5, 0.5), (-0.5, 0.5)] {
        assert!(g.contains(Point::new(c.0, c.1)));
    }
    for t in trapezoid_decompose(g) {
        for x in [t.xl, t.xr, (t.xl + t.xr) / 2.0] {
            assert!(t.top.at(x) - t.bottom.at(x) >= 1.0 - 1e-9);
        }
    }
    assert!(polygon_height(g) <= s as f64 + 1e-9);
}

#[test]
fn normalize_examples() {
    let sq = ConvexPolygon::unit_square();
    let (out, map) = normalize_polygon(&sq).unwrap();
    assert_eq!(map, AffineMap::IDENTITY);
    assert!(same_polygon(out.vertices(), sq.vertices()));

    let turned = sq.transform(&AffineMap::rotation(std::f64::consts::FRAC_PI_2)).unwrap();
    let (out, _) = normalize_polygon(&turned).unwrap();
    assert!(same_polygon(out.vertices(), sq.vertices()));

    let tilted = ConvexPolygon::square(1.3).transform(&AffineMap::rotation(0.4)).unwrap();
    let (out, _) = normalize_polygon(&tilted).unwrap();
    assert!(same_polygon(out.vertices(), sq.vertices()));

    let hex = ConvexPolygon::regular(6, 1.0, 0.1).unwrap();
    let (out, map) = normalize_polygon(&hex).unwrap();
    check_normalized(&out, 6);
    for &v in hex.vertices() {
        assert!(out.contains(map.apply(v)));
    }
    assert!(normalize_polygon(&triangle()).is_err());
}

#[test]
fn normalize_random_symmetric_polygons() {
    let mut r = rng(5);
    for _ in 0..50 {
        let h = symmetrize(&random_convex_polygon(r.gen_range(3..7), &mut r).unwrap());
        let (out, map) = normalize_polygon(&h).unwrap();
        check_normalized(&out, h.side_count());
        assert!(map.determinant() > 0.0);
        assert!((out.area() - h.area() * map.determinant()).abs() <= 1e-9 * out.area());
    }
}

#[test]
fn trapezoid_examples() {
    let sq = ConvexPolygon::unit_square();
    let t = trapezoid_decompose(&sq);
    assert_eq!(t.len(), 1);
    assert_eq!((t[0].xl, t[0].xr), (-0.5, 0.5));
    assert_eq!((t[0].bottom.at(0.0), t[0].top.at(0.0)), (-0.5, 0.5));

    let hex = ConvexPolygon::regular(6, 1.0, std::f64::consts::FRAC_PI_2).unwrap();
    let mut xs: Vec<f64> = hex.vertices().iter().map(|p| p.x).collect();
    xs.sort_by(f64::total_cmp);
    xs.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    assert_eq!(xs.len(), 3);
    assert_eq!(trapezoid_decompose(&hex).len(), 2);

    let mut r = rng(8);
    for _ in 0..30 {
        let h = symmetrize(&random_convex_polygon(r.gen_range(3..7), &mut r).unwrap());
        let (g, _) = normalize_polygon(&h).unwrap();
        let parts = trapezoid_decompose(&g);
        let total: f64 = parts.iter().map(Trapezoid::area).sum();
        assert!((total - g.area()).abs() <= 1e-9);
        for p in &parts {
            for x in [p.xl, p.xr] {
                assert!(g.contains(Point::new(x, p.bottom.at(x))));
                assert!(g.contains(Point::new(x, p.top.at(x))));
            }
        }
    }
}

#[test]
fn csv_round_trips() {
    let pts = vec![Point::new(0.25, -1.5), Point::new(3.0, 1e-3)];
    assert_eq!(parse_points(&points_to_csv(&pts)).unwrap(), pts);
    assert!(matches!(parse_points("1,2\n3\n"), Err(Error::Parse { line: 2, .. })));
    assert!(parse_points("1,2,3\n").is_err());
    assert!(parse_points("a,2\n").is_err());

    let hex = ConvexPolygon::regular(6, 2.0, 0.0).unwrap();
    let back = parse_polygon(&polygon_to_csv(&hex)).unwrap();
    assert!(same_polygon(back.vertices(), hex.vertices()));
    assert!(parse_polygon("4\n0,0\n1,0\n1,1\n").is_err());
    assert!(parse_polygon("").is_err());
}
