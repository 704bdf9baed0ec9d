use std::cell::RefCell;
use std::rc::Rc;
use std::time::Instant;

use anyhow::{bail, Result};
use clap::ValueEnum;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use vcdiam::explicit::{k_diameter_explicit_with, ExplicitOptions};
use vcdiam::graph::{k_diameter_naive, Graph};
use vcdiam::implicit::k_diameter_implicit_with;
use vcdiam::nsds::{NaiveNeighbourSets, NeighbourSets, SetHandle};
use vcdiam::plane::{geometric_nsds, GeometricNeighbourSets};

use crate::instance::Instance;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Algo {
    Naive,
    Explicit,
    Implicit,
}

/// Neighbour-set backend for the implicit algorithm.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Backend {
    /// Geometric for point instances, naive otherwise.
    Auto,
    Naive,
    Geometric,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct Counters {
    /// Radius steps performed.
    pub steps: u64,
    /// Σ over steps of the intervals in the new encoding (explicit).
    pub interval_total: u64,
    /// Σ over steps of the delta sizes (implicit).
    pub delta_total: u64,
    /// Expansion operations (implicit).
    pub expand_cost: u64,
    /// Stripe and auxiliary nodes visited (implicit, geometric backend).
    pub nodes_visited: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct InstanceInfo {
    pub source: String,
    pub kind: String,
    pub n: usize,
    /// Edges of the (materialized) graph, when it was built.
    pub m: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct RunReport {
    pub instance: InstanceInfo,
    pub algorithm: Algo,
    pub backend: Option<Backend>,
    pub k: u32,
    pub d: Option<u32>,
    pub answer: bool,
    pub wall_time_ms: f64,
    pub counters: Counters,
    pub seed: u64,
}

impl RunReport {
    pub const CSV_HEADER: &'static str =
        "source,kind,n,m,algorithm,backend,k,d,answer,wall_time_ms,steps,interval_total,delta_total,expand_cost,nodes_visited,seed";

    pub fn csv_row(&self) -> String {
        let c = &self.counters;
        let opt = |v: Option<String>| v.unwrap_or_default();
        format!(
            "{},{},{},{},{},{},{},{},{},{:.3},{},{},{},{},{},{}",
            self.instance.source,
            self.instance.kind,
            self.instance.n,
            opt(self.instance.m.map(|m| m.to_string())),
            name(self.algorithm),
            opt(self.backend.map(|b| name(b).to_string())),
            self.k,
            opt(self.d.map(|d| d.to_string())),
            self.answer,
            self.wall_time_ms,
            c.steps,
            c.interval_total,
            c.delta_total,
            c.expand_cost,
            c.nodes_visited,
            self.seed
        )
    }
}

pub fn name<T: ValueEnum>(v: T) -> String {
    v.to_possible_value().map(|p| p.get_name().to_string()).unwrap_or_default()
}

/// Geometric neighbour sets that add their node-visit counters to a shared
/// total when dropped (the driver builds a fresh one per radius).
struct Tallied {
    inner: GeometricNeighbourSets,
    sink: Rc<RefCell<u64>>,
}

impl NeighbourSets for Tallied {
    fn vertex_count(&self) -> usize {
        self.inner.vertex_count()
    }

    fn add_neighbours(&mut self, h: SetHandle, v: usize) -> vcdiam::Result<SetHandle> {
        self.inner.add_neighbours(h, v)
    }

    fn list_differences(&mut self, a: SetHandle, b: SetHandle) -> vcdiam::Result<Vec<usize>> {
        self.inner.list_differences(a, b)
    }
}

impl Drop for Tallied {
    fn drop(&mut self) {
        let c = self.inner.plane().counters();
        *self.sink.borrow_mut() += c.aux_list_visits + c.stripe_list_visits + c.stripe_update_visits;
    }
}

pub struct RunParams {
    pub algo: Algo,
    pub backend: Backend,
    pub k: u32,
    pub d: Option<u32>,
    pub seed: u64,
}

/// Default `d`: 4 for point instances; graphs need it spelled out unless
/// the naive algorithm is used.
pub fn resolve_d(inst: &Instance, algo: Algo, d: Option<u32>) -> Result<Option<u32>> {
    match (d, inst, algo) {
        (Some(d), _, _) => Ok(Some(d)),
        (None, Instance::Points { .. }, _) => Ok(Some(4)),
        (None, Instance::Graph(_), Algo::Naive) => Ok(None),
        (None, Instance::Graph(_), _) => bail!("--d is required for graph instances"),
    }
}

pub fn run(inst: &Instance, source: &str, p: &RunParams) -> Result<RunReport> {
    if p.k == 0 {
        bail!("--k must be at least 1");
    }
    let d = resolve_d(inst, p.algo, p.d)?;
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut counters = Counters::default();
    let mut backend = None;
    let mut m = None;
    let start = Instant::now();
    let answer = match p.algo {
        Algo::Naive | Algo::Explicit => {
            let g = inst.materialize()?;
            m = Some(g.edge_count());
            if !g.is_connected() {
                false
            } else if p.algo == Algo::Naive {
                k_diameter_naive(&g, p.k)?
            } else {
                let run = k_diameter_explicit_with(&g, p.k, d.unwrap_or(4), &mut rng, ExplicitOptions::default())?;
                counters.steps = run.steps.len() as u64;
                counters.interval_total = run.steps.iter().map(|s| s.rep_intervals).sum();
                run.answer
            }
        }
        Algo::Implicit => {
            let d = d.unwrap_or(4);
            let chosen = match (p.backend, inst) {
                (Backend::Auto, Instance::Points { .. }) => Backend::Geometric,
                (Backend::Auto, Instance::Graph(_)) => Backend::Naive,
                (Backend::Geometric, Instance::Graph(_)) => {
                    bail!("the geometric backend needs a point instance")
                }
                (b, _) => b,
            };
            backend = Some(chosen);
            let n = inst.vertex_count();
            let run = match (chosen, inst) {
                (Backend::Geometric, Instance::Points { points, polygon }) => {
                    let sink = Rc::new(RefCell::new(0u64));
                    let seed = p.seed;
                    let factory = || {
                        Ok(Tallied {
                            inner: geometric_nsds(points, polygon, seed)?,
                            sink: Rc::clone(&sink),
                        })
                    };
                    let run = k_diameter_implicit_with(factory, n, p.k, d, &mut rng, false)?;
                    counters.nodes_visited = *sink.borrow();
                    run
                }
                _ => {
                    let g = inst.materialize()?;
                    m = Some(g.edge_count());
                    let mut keys = ChaCha8Rng::seed_from_u64(p.seed ^ 0x5eed);
                    let g: &Graph = &g;
                    k_diameter_implicit_with(|| Ok(NaiveNeighbourSets::new(g, &mut keys)), n, p.k, d, &mut rng, false)?
                }
            };
            counters.steps = run.steps.len() as u64;
            counters.delta_total = run.steps.iter().map(|s| s.delta_total).sum();
            counters.expand_cost = run.steps.iter().map(|s| s.expand.cost).sum();
            run.answer
        }
    };
    Ok(RunReport {
        instance: InstanceInfo {
            source: source.to_string(),
            kind: inst.kind().to_string(),
            n: inst.vertex_count(),
            m,
        },
        algorithm: p.algo,
        backend,
        k: p.k,
        d,
        answer,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
        counters,
        seed: p.seed,
    })
}
