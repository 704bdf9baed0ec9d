//! `vcdiam`: generate instances, decide `diam(G) <= k`, cross-check the
//! algorithms against each other and emit scaling tables.

mod instance;
mod run;

use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use log::info;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vcdiam::geometry::{points_to_csv, polygon_to_csv, ConvexPolygon};
use vcdiam::graph::{neighborhood, Graph};
use vcdiam::instances::{random_connected_graph, random_convex_polygon, random_points};
use vcdiam::order::{order_by_k_neighborhoods, total_difference};

use instance::{expand_inputs, load_instance, load_polygon, Instance};
use run::{Algo, Backend, RunParams, RunReport};

#[derive(Parser)]
#[command(name = "vcdiam", version, about = "k-Diameter for graphs of bounded distance VC-dimension")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Write a random instance.
    Gen(GenArgs),
    /// Decide whether the instance has diameter at most k.
    Diam(DiamArgs),
    /// Run every applicable algorithm and fail on any disagreement.
    Verify(VerifyArgs),
    /// Scaling table over several instance sizes.
    Bench(BenchArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenKind {
    SparseGraph,
    UnitSquares,
    PolygonPoints,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GenArgs {
    kind: GenKind,
    #[arg(long)]
    n: usize,
    /// Edge count for graphs (default 2n, capped at the complete graph).
    #[arg(long)]
    m: Option<usize>,
    /// Side of the square box the points are drawn from.
    #[arg(long = "box", default_value_t = 10.0)]
    box_side: f64,
    /// Side count of the random polygon.
    #[arg(long, default_value_t = 5)]
    sides: usize,
    /// Where `polygon-points` writes its polygon.
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct DiamArgs {
    #[arg(long, value_enum, default_value = "explicit")]
    algo: Algo,
    /// Neighbour-set backend of the implicit algorithm.
    #[arg(long, value_enum, default_value = "auto")]
    nsds: Backend,
    #[arg(long)]
    input: PathBuf,
    /// Polygon for point instances (default: unit square).
    #[arg(long)]
    polygon: Option<PathBuf>,
    #[arg(long)]
    k: u32,
    /// Order parameter; defaults to 4 for point instances.
    #[arg(long)]
    d: Option<u32>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    /// Instance files or directories of them.
    #[arg(long)]
    input: Vec<PathBuf>,
    #[arg(long)]
    polygon: Option<PathBuf>,
    /// Also check this many random graphs with at most 12 vertices.
    #[arg(long, default_value_t = 0)]
    random: usize,
    #[arg(long, default_value_t = 1)]
    k_min: u32,
    #[arg(long, default_value_t = 4)]
    k_max: u32,
    #[arg(long)]
    d: Option<u32>,
    /// Seeds tried per instance and k for the randomized algorithms.
    #[arg(long, default_value_t = 1)]
    trials: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BenchKind {
    SparseGraph,
    UnitSquares,
}

#[derive(Args)]
struct BenchArgs {
    #[arg(long, value_enum, default_value = "unit-squares")]
    kind: BenchKind,
    #[arg(long, value_delimiter = ',', default_values_t = [200usize, 400, 800, 1600])]
    sizes: Vec<usize>,
    #[arg(long, default_value_t = 2)]
    k: u32,
    #[arg(long, default_value_t = 4)]
    d: u32,
    #[arg(long, value_enum, default_value = "explicit")]
    algo: Algo,
    /// Points per unit area (squares) or average degree (graphs).
    #[arg(long, default_value_t = 4.0)]
    density: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    output: Option<PathBuf>,
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<()> {
    match path {
        Some(p) => fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes())?;
            Ok(())
        }
    }
}

fn cmd_gen(a: &GenArgs) -> Result<()> {
    if a.n == 0 {
        bail!("--n must be positive");
    }
    if !(a.box_side.is_finite() && a.box_side > 0.0) {
        bail!("--box must be positive");
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let text = match a.kind {
        GenKind::SparseGraph => {
            let max = a.n * (a.n - 1) / 2;
            let m = a.m.unwrap_or((2 * a.n).min(max));
            random_connected_graph(a.n, m, &mut rng)?.to_edge_list()
        }
        GenKind::UnitSquares => points_to_csv(&random_points(a.n, a.box_side, &mut rng)),
        GenKind::PolygonPoints => {
            let Some(path) = &a.polygon else {
                bail!("polygon-points needs --polygon <file> for the polygon");
            };
            let f = random_convex_polygon(a.sides, &mut rng)?;
            fs::write(path, polygon_to_csv(&f)).with_context(|| format!("writing {}", path.display()))?;
            points_to_csv(&random_points(a.n, a.box_side, &mut rng))
        }
    };
    write_out(a.output.as_ref(), &text)
}

fn render(report: &RunReport, format: Format) -> Result<String> {
    Ok(match format {
        Format::Json => serde_json::to_string_pretty(report)? + "\n",
        Format::Csv => format!("{}\n{}\n", RunReport::CSV_HEADER, report.csv_row()),
    })
}

fn cmd_diam(a: &DiamArgs) -> Result<()> {
    let polygon = load_polygon(a.polygon.as_deref())?;
    let inst = load_instance(&a.input, polygon.as_ref())?;
    let params = RunParams {
        algo: a.algo,
        backend: a.nsds,
        k: a.k,
        d: a.d,
        seed: a.seed,
    };
    let report = run::run(&inst, &a.input.display().to_string(), &params)?;
    info!("{} k={} -> {}", a.input.display(), a.k, report.answer);
    write_out(a.output.as_ref(), &render(&report, a.format)?)
}

#[derive(Serialize)]
struct Mismatch {
    instance: String,
    k: u32,
    seed: u64,
    expected: bool,
    algorithm: String,
    got: Option<bool>,
    error: Option<String>,
}

#[derive(Serialize)]
struct VerifySummary {
    instances: usize,
    checks: usize,
    mismatches: Vec<Mismatch>,
    pass: bool,
}

fn verify_one(
    inst: &Instance,
    name: &str,
    a: &VerifyArgs,
    summary: &mut VerifySummary,
) -> Result<()> {
    run::resolve_d(inst, Algo::Explicit, a.d)?;
    let mut variants = vec![(Algo::Explicit, Backend::Auto), (Algo::Implicit, Backend::Naive)];
    if matches!(inst, Instance::Points { .. }) {
        variants.push((Algo::Implicit, Backend::Geometric));
    }
    for k in a.k_min..=a.k_max {
        let base = RunParams {
            algo: Algo::Naive,
            backend: Backend::Auto,
            k,
            d: a.d,
            seed: a.seed,
        };
        let expected = run::run(inst, name, &base)?.answer;
        for t in 0..a.trials {
            for &(algo, backend) in &variants {
                let seed = a.seed.wrapping_add(t);
                let p = RunParams { algo, backend, seed, ..base };
                summary.checks += 1;
                let label = match algo {
                    Algo::Implicit => format!("implicit/{}", run::name(backend)),
                    _ => run::name(algo),
                };
                let outcome = run::run(inst, name, &p);
                let (got, error) = match outcome {
                    Ok(r) if r.answer == expected => continue,
                    Ok(r) => (Some(r.answer), None),
                    Err(e) => (None, Some(format!("{e:#}"))),
                };
                summary.mismatches.push(Mismatch {
                    instance: name.to_string(),
                    k,
                    seed,
                    expected,
                    algorithm: label,
                    got,
                    error,
                });
            }
        }
    }
    Ok(())
}

fn cmd_verify(a: &VerifyArgs) -> Result<bool> {
    if a.k_min == 0 || a.k_min > a.k_max {
        bail!("need 1 <= --k-min <= --k-max");
    }
    let polygon = load_polygon(a.polygon.as_deref())?;
    let mut summary = VerifySummary {
        instances: 0,
        checks: 0,
        mismatches: Vec::new(),
        pass: true,
    };
    for path in expand_inputs(&a.input)? {
        let inst = load_instance(&path, polygon.as_ref())?;
        summary.instances += 1;
        verify_one(&inst, &path.display().to_string(), a, &mut summary)?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    for i in 0..a.random {
        let n = rng.gen_range(1..=12);
        let max = n * (n - 1) / 2;
        let m = rng.gen_range(n - 1..=max);
        let g = random_connected_graph(n, m, &mut rng)?;
        summary.instances += 1;
        verify_one(&Instance::Graph(g), &format!("random#{i}"), a, &mut summary)?;
    }
    summary.pass = summary.mismatches.is_empty();
    write_out(a.output.as_ref(), &(serde_json::to_string_pretty(&summary)? + "\n"))?;
    Ok(summary.pass)
}

/// Least-squares slope of `ln y` against `ln x`.
fn log_log_slope(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(x, y)| **x > 0.0 && **y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / k, pts.iter().map(|p| p.1).sum::<f64>() / k);
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

fn cmd_bench(a: &BenchArgs) -> Result<()> {
    if a.sizes.is_empty() || a.sizes.contains(&0) {
        bail!("--sizes must list positive sizes");
    }
    if !(a.density.is_finite() && a.density > 0.0) {
        bail!("--density must be positive");
    }
    let mut out = String::from(
        "n,m,k,d,algorithm,seed,connected,answer,wall_time_ms,diff_sum,interval_total,delta_total,expand_cost,nodes_visited\n",
    );
    let mut diff_sums = Vec::new();
    for &n in &a.sizes {
        let mut rng = ChaCha8Rng::seed_from_u64(a.seed.wrapping_add(n as u64));
        let inst = match a.kind {
            BenchKind::UnitSquares => {
                let side = (n as f64 / a.density).sqrt();
                Instance::Points {
                    points: random_points(n, side, &mut rng),
                    polygon: ConvexPolygon::unit_square(),
                }
            }
            BenchKind::SparseGraph => {
                let max = n * n.saturating_sub(1) / 2;
                let m = ((a.density * n as f64 / 2.0).round() as usize).clamp(n - 1, max);
                Instance::Graph(random_connected_graph(n, m, &mut rng)?)
            }
        };
        let g: Graph = inst.materialize()?;
        let order = order_by_k_neighborhoods(&g, a.k, a.d, &mut rng)?;
        let balls = (0..n).map(|v| neighborhood(&g, v, a.k)).collect::<vcdiam::Result<Vec<_>>>()?;
        let diff_sum = total_difference(&order.order, |v| &balls[v]);
        diff_sums.push(diff_sum as f64);
        let params = RunParams {
            algo: a.algo,
            backend: Backend::Auto,
            k: a.k,
            d: Some(a.d),
            seed: a.seed,
        };
        let r = run::run(&inst, &format!("{n}"), &params)?;
        let c = &r.counters;
        out.push_str(&format!(
            "{n},{},{},{},{},{},{},{},{:.3},{diff_sum},{},{},{},{}\n",
            g.edge_count(),
            a.k,
            a.d,
            run::name(a.algo),
            a.seed,
            g.is_connected(),
            r.answer,
            r.wall_time_ms,
            c.interval_total,
            c.delta_total,
            c.expand_cost,
            c.nodes_visited
        ));
        info!("bench n={n} diff_sum={diff_sum}");
    }
    write_out(a.output.as_ref(), &out)?;
    let xs: Vec<f64> = a.sizes.iter().map(|&n| n as f64).collect();
    match log_log_slope(&xs, &diff_sums) {
        Some(s) => eprintln!("log-log slope of diff_sum: {s:.4}"),
        None => eprintln!("log-log slope of diff_sum: n/a (need two sizes)"),
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("VCDIAM_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.cmd {
        Cmd::Gen(a) => cmd_gen(a).map(|_| true),
        Cmd::Diam(a) => cmd_diam(a).map(|_| true),
        Cmd::Verify(a) => cmd_verify(a),
        Cmd::Bench(a) => cmd_bench(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
