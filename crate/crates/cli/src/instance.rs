use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use vcdiam::geometry::{intersection_graph_naive, parse_points, parse_polygon, ConvexPolygon, Point};
use vcdiam::graph::Graph;

/// A loaded instance: an abstract graph, or points with the polygon whose
/// translates they carry.
pub enum Instance {
    Graph(Graph),
    Points { points: Vec<Point>, polygon: ConvexPolygon },
}

impl Instance {
    pub fn kind(&self) -> &'static str {
        match self {
            Instance::Graph(_) => "graph",
            Instance::Points { .. } => "points",
        }
    }

    pub fn vertex_count(&self) -> usize {
        match self {
            Instance::Graph(g) => g.vertex_count(),
            Instance::Points { points, .. } => points.len(),
        }
    }

    /// The graph itself, or the intersection graph of the translates.
    pub fn materialize(&self) -> Result<Graph> {
        Ok(match self {
            Instance::Graph(g) => g.clone(),
            Instance::Points { points, polygon } => intersection_graph_naive(points, polygon)?,
        })
    }
}

/// Points CSV lines contain a comma; edge lists never do.
fn looks_like_points(text: &str) -> bool {
    text.lines()
        .map(str::trim)
        .find(|l| !l.is_empty())
        .is_some_and(|l| l.contains(','))
}

pub fn parse_instance(text: &str, polygon: Option<&ConvexPolygon>) -> Result<Instance> {
    if looks_like_points(text) {
        let points = parse_points(text)?;
        if points.is_empty() {
            bail!("no points");
        }
        let polygon = polygon.cloned().unwrap_or_else(ConvexPolygon::unit_square);
        Ok(Instance::Points { points, polygon })
    } else {
        Ok(Instance::Graph(Graph::parse_edge_list(text)?))
    }
}

pub fn load_polygon(path: Option<&Path>) -> Result<Option<ConvexPolygon>> {
    path.map(|p| {
        let text = fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?;
        parse_polygon(&text).with_context(|| format!("parsing polygon {}", p.display()))
    })
    .transpose()
}

pub fn load_instance(path: &Path, polygon: Option<&ConvexPolygon>) -> Result<Instance> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_instance(&text, polygon).with_context(|| format!("parsing {}", path.display()))
}

/// Files named directly plus the regular files inside named directories,
/// sorted for a stable order.
pub fn expand_inputs(inputs: &[PathBuf]) -> Result<Vec<PathBuf>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut files: Vec<PathBuf> = fs::read_dir(p)
                .with_context(|| format!("listing {}", p.display()))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|p| p.is_file())
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}
