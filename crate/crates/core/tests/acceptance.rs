//! End-to-end acceptance run. Prints one PASS/FAIL line per criterion and
//! exits nonzero if any criterion fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use vcdiam::explicit::{k_diameter_explicit, k_diameter_explicit_with, ExplicitOptions};
use vcdiam::fingerprint::KeyTable;
use vcdiam::geometry::{
    adjacent_by_containment, intersection_graph_naive, metric, symmetrize, ConvexPolygon, Point,
};
use vcdiam::graph::{distance_vc_shatter_check, k_diameter_naive, neighborhood, Graph};
use vcdiam::implicit::{expand_balls, expand_cost_bound, k_diameter_implicit, k_diameter_implicit_with, xor_all};
use vcdiam::instances::{random_connected_graph, random_convex_polygon, random_points};
use vcdiam::nsds::NaiveNeighbourSets;
use vcdiam::order::{order_by_k_neighborhoods, total_difference};
use vcdiam::plane::{geometric_nsds, PlaneStructure};
use vcdiam::stripe::{MarkShape, StripeTree};

const EXPLICIT_GRAPHS: usize = 200;
const EXPLICIT_BUDGET: Duration = Duration::from_secs(120);
const IMPLICIT_INSTANCES: usize = 100;
const IMPLICIT_BUDGET: Duration = Duration::from_secs(300);
const PLANE_SEQUENCES: usize = 50;
const PLANE_HEXAGON_SEQUENCES: usize = 10;
const PLANE_PAIRS: usize = 200;
const PLANE_BUDGET: Duration = Duration::from_secs(300);
const EXPAND_INPUTS: usize = 100;
const VC_INSTANCES: usize = 50;
const VC_CEILING: usize = 4;
const VC_BUDGET: Duration = Duration::from_secs(180);
const SLOPE_SIZES: [usize; 4] = [200, 400, 800, 1600];
const SLOPE_SEEDS: u64 = 5;
const SLOPE_LIMIT: f64 = 2.0;
const SLOPE_DENSITY: f64 = 4.0;
const SLOPE_BUDGET: Duration = Duration::from_secs(600);
const ISO_INSTANCES: usize = 50;
const METRIC_TRIPLES: usize = 10_000;
const METRIC_TOL: f64 = 1e-9;

struct Outcome {
    pass: bool,
    detail: String,
}

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn within(start: Instant, budget: Duration, detail: &mut String) -> bool {
    let t = start.elapsed();
    detail.push_str(&format!(", {:.1}s of {}s", t.as_secs_f64(), budget.as_secs()));
    t <= budget
}

fn naive_answer(g: &Graph, k: u32) -> bool {
    g.is_connected() && k_diameter_naive(g, k).unwrap()
}

fn explicit_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(1);
    let (mut checks, mut mismatches) = (0, 0);
    for i in 0..EXPLICIT_GRAPHS {
        let n = r.gen_range(1..=60);
        let max = (n * (n - 1) / 2).min(300);
        let m = r.gen_range(n - 1..=max.max(n - 1));
        let g = random_connected_graph(n, m, &mut r).unwrap();
        let d = r.gen_range(2..=4);
        for k in 1..=5 {
            checks += 1;
            let fast = k_diameter_explicit(&g, k, d, &mut rng(i as u64 * 10 + k as u64)).unwrap();
            if fast != naive_answer(&g, k) {
                mismatches += 1;
            }
        }
    }
    let mut detail = format!("{checks} checks, {mismatches} mismatches");
    let ok = within(start, EXPLICIT_BUDGET, &mut detail);
    Outcome {
        pass: mismatches == 0 && ok,
        detail,
    }
}

fn implicit_equivalence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(2);
    let f = ConvexPolygon::unit_square();
    let (mut checks, mut mismatches, mut trues) = (0, 0, 0);
    for i in 0..IMPLICIT_INSTANCES {
        let n = r.gen_range(2..=200);
        let side = r.gen_range(1.0..6.0);
        let pts = random_points(n, side, &mut r);
        let g = intersection_graph_naive(&pts, &f).unwrap();
        for k in 1..=5 {
            checks += 1;
            let seed = i as u64 * 10 + k as u64;
            let fast = k_diameter_implicit(|| geometric_nsds(&pts, &f, seed), n, k, 4, &mut rng(seed)).unwrap();
            let want = naive_answer(&g, k);
            trues += want as usize;
            if fast != want {
                mismatches += 1;
            }
        }
    }
    let mut detail = format!("{checks} checks ({trues} true), {mismatches} mismatches");
    let ok = within(start, IMPLICIT_BUDGET, &mut detail);
    Outcome {
        pass: mismatches == 0 && ok,
        detail,
    }
}

fn plane_persistence() -> Outcome {
    let start = Instant::now();
    let mut r = rng(3);
    let (mut pairs, mut bad) = (0, 0);
    for seq in 0..PLANE_SEQUENCES {
        let f = if seq < PLANE_HEXAGON_SEQUENCES {
            ConvexPolygon::regular(6, 0.6, r.gen_range(0.0..1.0)).unwrap()
        } else {
            ConvexPolygon::unit_square()
        };
        let n = r.gen_range(1..=500);
        let marks = r.gen_range(1..=500);
        let pts = random_points(n, (n as f64).sqrt() * 1.2, &mut r);
        let (mut p, v0) = PlaneStructure::init(&pts, &f, seq as u64).unwrap();
        let mut versions = vec![v0];
        let mut naive = vec![BTreeSet::new()];
        let g = intersection_graph_naive(&pts, &f).unwrap();
        for _ in 0..marks {
            let base = r.gen_range(0..versions.len());
            let v = r.gen_range(0..n);
            versions.push(p.mark_point(versions[base], v).unwrap());
            let mut set: BTreeSet<usize> = naive[base].clone();
            set.insert(v);
            set.extend(g.neighbors(v).iter().map(|&u| u as usize));
            naive.push(set);
        }
        for _ in 0..PLANE_PAIRS {
            let (a, b) = (r.gen_range(0..versions.len()), r.gen_range(0..versions.len()));
            let mut got = p.list_differences(versions[a], versions[b]).unwrap();
            got.sort_unstable();
            let want: Vec<usize> = naive[a].symmetric_difference(&naive[b]).copied().collect();
            pairs += 1;
            if got != want {
                bad += 1;
            }
        }
    }
    let mut detail = format!("{pairs} version pairs, {bad} wrong");
    let ok = within(start, PLANE_BUDGET, &mut detail);
    Outcome {
        pass: bad == 0 && ok,
        detail,
    }
}

fn expand_bound() -> Outcome {
    let mut r = rng(4);
    let (mut worst, mut over) = (0.0f64, 0);
    for i in 0..EXPAND_INPUTS {
        let n = r.gen_range(2..=80);
        let max = n * (n - 1) / 2;
        let m = r.gen_range(n - 1..=max.min(4 * n));
        let g = random_connected_graph(n, m, &mut r).unwrap();
        let t = r.gen_range(1..=2 * n);
        let density = r.gen_range(0.0..0.3);
        let deltas: Vec<Vec<usize>> = (0..t)
            .map(|_| (0..n).filter(|_| r.gen_bool(density)).collect())
            .collect();
        let mut nsds = NaiveNeighbourSets::new(&g, &mut rng(i as u64));
        let (handles, stats) = expand_balls(&deltas, &mut nsds).unwrap();
        let bound = expand_cost_bound(&deltas);
        worst = worst.max(stats.cost as f64 / bound as f64);
        if stats.cost > bound || handles.len() != t {
            over += 1;
        }
        // The handles must be the balls they claim to be.
        let mut prefix = Vec::new();
        for (d, h) in deltas.iter().zip(&handles) {
            prefix = xor_all([prefix.as_slice(), d.as_slice()]);
            let want: BTreeSet<usize> = prefix
                .iter()
                .flat_map(|&v| std::iter::once(v).chain(g.neighbors(v).iter().map(|&u| u as usize)))
                .collect();
            if nsds.members(*h).unwrap() != want.into_iter().collect::<Vec<_>>() {
                over += 1;
            }
        }
    }
    Outcome {
        pass: over == 0,
        detail: format!("{EXPAND_INPUTS} inputs, {over} violations, worst cost/bound {worst:.3}"),
    }
}

fn vc_ceiling() -> Outcome {
    let start = Instant::now();
    let mut r = rng(5);
    let f = ConvexPolygon::unit_square();
    let (mut largest, mut too_big) = (0, 0);
    for _ in 0..VC_INSTANCES {
        let n = r.gen_range(5..=12);
        let pts = random_points(n, r.gen_range(1.5..4.0), &mut r);
        let g = intersection_graph_naive(&pts, &f).unwrap();
        let s = distance_vc_shatter_check(&g, VC_CEILING + 1).unwrap();
        largest = largest.max(s);
        if s > VC_CEILING {
            too_big += 1;
        }
    }
    let mut detail = format!("largest shattered set {largest}, {too_big} instances above {VC_CEILING}");
    let ok = within(start, VC_BUDGET, &mut detail);
    Outcome {
        pass: too_big == 0 && ok,
        detail,
    }
}

fn slope(xs: &[f64], ys: &[f64]) -> f64 {
    let k = xs.len() as f64;
    let (lx, ly): (Vec<f64>, Vec<f64>) = (xs.iter().map(|x| x.ln()).collect(), ys.iter().map(|y| y.ln()).collect());
    let (mx, my) = (lx.iter().sum::<f64>() / k, ly.iter().sum::<f64>() / k);
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    sxy / sxx
}

fn difference_sum_slope() -> Outcome {
    let start = Instant::now();
    let f = ConvexPolygon::unit_square();
    let (k, d) = (2, 4);
    let mut slopes = Vec::new();
    for seed in 0..SLOPE_SEEDS {
        let mut sums = Vec::new();
        for &n in &SLOPE_SIZES {
            let mut r = rng(600 + seed * 10_000 + n as u64);
            let pts = random_points(n, (n as f64 / SLOPE_DENSITY).sqrt(), &mut r);
            let g = intersection_graph_naive(&pts, &f).unwrap();
            let order = order_by_k_neighborhoods(&g, k, d, &mut r).unwrap();
            let balls: Vec<Vec<usize>> = (0..n).map(|v| neighborhood(&g, v, k).unwrap()).collect();
            sums.push(total_difference(&order.order, |v| &balls[v]) as f64);
        }
        let xs: Vec<f64> = SLOPE_SIZES.iter().map(|&n| n as f64).collect();
        slopes.push(slope(&xs, &sums));
    }
    let max = slopes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let listed: Vec<String> = slopes.iter().map(|s| format!("{s:.3}")).collect();
    let mut detail = format!("slopes [{}], max {max:.3} (limit {SLOPE_LIMIT})", listed.join(", "));
    let ok = within(start, SLOPE_BUDGET, &mut detail);
    Outcome {
        pass: max < SLOPE_LIMIT && ok,
        detail,
    }
}

fn geometry_equivalences() -> Outcome {
    let mut r = rng(7);
    let mut edge_diffs = 0;
    for _ in 0..ISO_INSTANCES {
        let f = random_convex_polygon(5, &mut r).unwrap();
        let n = r.gen_range(2..=60);
        let pts = random_points(n, r.gen_range(2.0..8.0), &mut r);
        let g = intersection_graph_naive(&pts, &f).unwrap();
        let h = symmetrize(&f);
        let gh = intersection_graph_naive(&pts, &h).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                let a = g.neighbors(u).contains(&(v as u32));
                let b = gh.neighbors(u).contains(&(v as u32));
                let c = adjacent_by_containment(&h, pts[u], pts[v]);
                edge_diffs += (a != b) as usize + (a != c) as usize;
            }
        }
    }
    let mut bad_metric = 0;
    let mut worst = 0.0f64;
    for _ in 0..METRIC_TRIPLES / 100 {
        let f = symmetrize(&random_convex_polygon(r.gen_range(3..8), &mut r).unwrap());
        for _ in 0..100 {
            let mut p = || Point::new(r.gen_range(-10.0..10.0), r.gen_range(-10.0..10.0));
            let (a, b, c) = (p(), p(), p());
            let (ab, bc, ac) = (metric(&f, a, b).unwrap(), metric(&f, b, c).unwrap(), metric(&f, a, c).unwrap());
            let scale = ac.max(1.0);
            if ac > ab + bc + METRIC_TOL * scale {
                bad_metric += 1;
            }
            let t = r.gen_range(0.0..1.0);
            let m = a + (c - a) * t;
            let gap = (metric(&f, a, m).unwrap() + metric(&f, m, c).unwrap() - ac).abs() / scale;
            worst = worst.max(gap);
            if gap > METRIC_TOL {
                bad_metric += 1;
            }
        }
    }
    Outcome {
        pass: edge_diffs == 0 && bad_metric == 0,
        detail: format!(
            "{ISO_INSTANCES} pentagon instances, {edge_diffs} edge differences; {METRIC_TRIPLES} triples, {bad_metric} violations, worst additivity gap {worst:.1e}"
        ),
    }
}

fn invariant_audits() -> Outcome {
    let mut r = rng(8);
    let mut violations = 0usize;
    let mut checked = [0usize; 4];
    // Interval canonicality after every explicit step.
    for _ in 0..40 {
        let n = r.gen_range(2..=50);
        let m = r.gen_range(n - 1..=(n * (n - 1) / 2).min(3 * n));
        let g = random_connected_graph(n, m, &mut r).unwrap();
        let opts = ExplicitOptions {
            keep_encodings: true,
            ..Default::default()
        };
        let run = k_diameter_explicit_with(&g, 6, 3, &mut r, opts).unwrap();
        for enc in &run.encodings {
            checked[0] += 1;
            violations += !enc.all_canonical() as usize;
            for v in 0..n {
                if enc.decode(v) != neighborhood(&g, v, enc.radius).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    // Delta prefixes reconstruct the balls.
    for seed in 0..20u64 {
        let n = r.gen_range(2..=60);
        let pts = random_points(n, r.gen_range(1.0..4.0), &mut r);
        let f = ConvexPolygon::unit_square();
        let g = intersection_graph_naive(&pts, &f).unwrap();
        let run = k_diameter_implicit_with(|| geometric_nsds(&pts, &f, seed), n, 4, 4, &mut rng(seed), true).unwrap();
        for enc in &run.encodings {
            for _ in 0..10 {
                let i = r.gen_range(0..n);
                checked[1] += 1;
                if enc.reconstruct(i) != neighborhood(&g, enc.order[i], enc.radius).unwrap() {
                    violations += 1;
                }
            }
        }
    }
    // Stripe-node walker on trees with at most 256 points.
    for seed in 0..12u64 {
        let n = r.gen_range(1..=256);
        let shape = if seed % 3 == 0 {
            let (g, _) = vcdiam::geometry::normalize_polygon(&ConvexPolygon::regular(6, 1.0, 0.4).unwrap()).unwrap();
            MarkShape::from_polygon(&g).unwrap()
        } else {
            MarkShape::unit_square()
        };
        let pts: Vec<(usize, Point)> = (0..n)
            .map(|i| (i, Point::new(r.gen_range(0.0..16.0), r.gen_range(0.0..1.0))))
            .collect();
        let keys = KeyTable::new(n, &mut r);
        let (mut t, mut v) = StripeTree::new(&pts, 0, &shape.slopes, &keys, &mut r).unwrap();
        for _ in 0..150 {
            let c = Point::new(r.gen_range(-1.0..17.0), r.gen_range(shape.ymin - 0.5..1.5 + shape.ymax));
            v = t.mark(v, &shape, c).unwrap();
            checked[2] += 1;
            violations += t.audit(v, &keys).unwrap().0;
        }
    }
    // Auxiliary-tree fingerprints.
    for seed in 0..10u64 {
        let n = r.gen_range(1..=200);
        let pts = random_points(n, 12.0, &mut r);
        let f = if seed % 2 == 0 {
            ConvexPolygon::unit_square()
        } else {
            ConvexPolygon::regular(6, 0.7, 0.1).unwrap()
        };
        let (mut p, mut v) = PlaneStructure::init(&pts, &f, seed).unwrap();
        for _ in 0..100 {
            v = p.mark_point(v, r.gen_range(0..n)).unwrap();
            checked[3] += 1;
            violations += p.audit(v, false).unwrap().0;
        }
        violations += p.audit(v, true).unwrap().0;
    }
    Outcome {
        pass: violations == 0,
        detail: format!(
            "{} explicit encodings, {} delta prefixes, {} stripe versions, {} plane versions; {violations} violations",
            checked[0], checked[1], checked[2], checked[3]
        ),
    }
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 8] = [
        ("explicit decider agrees with all-pairs BFS", explicit_equivalence),
        ("implicit geometric decider agrees with all-pairs BFS", implicit_equivalence),
        ("persistent plane structure lists exact differences", plane_persistence),
        ("ball expansion stays within its cost bound", expand_bound),
        ("unit-square ball hypergraphs shatter no 5-set", vc_ceiling),
        ("difference sum grows sub-quadratically", difference_sum_slope),
        ("geometry equivalences and metric axioms", geometry_equivalences),
        ("invariant audits report no violations", invariant_audits),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let out = run();
        let verdict = if out.pass { "PASS" } else { "FAIL" };
        println!("acceptance {}: {verdict} {name} ({})", i + 1, out.detail);
        failed += !out.pass as usize;
    }
    if failed > 0 {
        println!("{failed} acceptance criteria failed");
        std::process::exit(1);
    }
}
