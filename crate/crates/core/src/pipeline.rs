//! End-to-end run: read inputs, build the cost matrix, run the spanning
//! tree step and serialize the tree, the edge table and a report.

use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use serde::Serialize;

use crate::cost::{build_cost_matrix, CostMatrix, CostMode, CostModel, GeoCoordinate, Sample};
use crate::error::{Error, Result};
use crate::geo_rw::{EpsLadder, GeoBounds, GeoGraph, RandomWalk};
use crate::io;
use crate::mst::{kruskal_mst, root_tree, tree_cost_directed, tree_cost_symmetric, PhyloTree};
use crate::substitution::SiteModel;

#[derive(Clone, Debug, PartialEq)]
pub enum ModelSpec {
    Binary,
    Jc69,
    /// Model file with stationary frequencies and exchangeabilities.
    Gtr(PathBuf),
}

impl FromStr for ModelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "binary" => Ok(ModelSpec::Binary),
            "jc69" => Ok(ModelSpec::Jc69),
            _ => match s.strip_prefix("gtr:") {
                Some(path) if !path.is_empty() => Ok(ModelSpec::Gtr(PathBuf::from(path))),
                _ => Err(Error::domain(format!(
                    "unknown model `{s}` (expected binary, jc69 or gtr:FILE)"
                ))),
            },
        }
    }
}

impl ModelSpec {
    /// `mu` applies to the one-parameter models; a GTR file carries its own
    /// rates.
    pub fn load(&self, mu: f64) -> Result<SiteModel> {
        match self {
            ModelSpec::Binary => SiteModel::binary(mu),
            ModelSpec::Jc69 => SiteModel::jc69(mu),
            ModelSpec::Gtr(path) => {
                let text = std::fs::read_to_string(path)?;
                let gtr = text.parse().map_err(|e| match e {
                    Error::Parse { line, msg, .. } => Error::parse(&path.display().to_string(), line, msg),
                    other => other,
                })?;
                Ok(SiteModel::Gtr(gtr))
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct RunConfig {
    pub fasta: PathBuf,
    pub model: ModelSpec,
    pub mu: f64,
    pub locations: Option<PathBuf>,
    pub geo_graph: Option<PathBuf>,
    pub mode: CostMode,
    /// End-to-end tolerance of the geographic estimates.
    pub eps: f64,
    pub root: Option<String>,
    pub out_newick: Option<PathBuf>,
    pub out_edges: Option<PathBuf>,
    pub out_report: Option<PathBuf>,
    pub seed: Option<u64>,
    /// Record wall time in the report (makes it run-dependent).
    pub timing: bool,
}

impl RunConfig {
    pub fn new(fasta: impl Into<PathBuf>, model: ModelSpec) -> Self {
        RunConfig {
            fasta: fasta.into(),
            model,
            mu: 1.0,
            locations: None,
            geo_graph: None,
            mode: CostMode::Independent,
            eps: 0.1,
            root: None,
            out_newick: None,
            out_edges: None,
            out_report: None,
            seed: None,
            timing: true,
        }
    }

    fn validate(&self) -> Result<()> {
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return Err(Error::domain(format!("eps must lie in (0, 1), got {}", self.eps)));
        }
        if self.locations.is_some() != self.geo_graph.is_some() {
            return Err(Error::domain("--locations and --geo-graph must be given together"));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GeoReport {
    pub nodes: usize,
    pub lambda: f64,
    pub r: f64,
    pub a: f64,
    pub b: f64,
    pub eps: EpsLadder,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub k: usize,
    pub n: usize,
    pub model: String,
    pub mode: CostMode,
    pub log_base: &'static str,
    pub root: String,
    pub total_w: f64,
    pub tree_cost_directed: f64,
    pub tree_cost_symmetric: f64,
    pub geo: Option<GeoReport>,
    pub wall_time_s: Option<f64>,
    pub seed: Option<u64>,
    pub version: &'static str,
}

/// Tree and costs for in-memory samples.
#[derive(Clone, Debug)]
pub struct Inference {
    pub costs: CostMatrix,
    pub tree: PhyloTree,
    pub total_w: f64,
    pub tree_cost_directed: f64,
    pub tree_cost_symmetric: f64,
}

pub fn infer(samples: &[Sample], model: &CostModel, root: Option<&str>) -> Result<Inference> {
    let costs = build_cost_matrix(samples, model)?;
    let span = kruskal_mst(&costs)?;
    let total_w = span.total_weight(|u, v| costs.weight(u, v));
    let tree = root_tree(&span, costs.ids(), root)?;
    let tree_cost_directed = tree_cost_directed(&tree, &costs)?;
    let tree_cost_symmetric = tree_cost_symmetric(&tree, &costs)?;
    Ok(Inference {
        costs,
        tree,
        total_w,
        tree_cost_directed,
        tree_cost_symmetric,
    })
}

/// Geographic coordinate with estimated suprema at tolerance `eps`.
pub fn geo_coordinate(graph: GeoGraph, eps: f64) -> Result<GeoCoordinate> {
    GeoCoordinate::estimated(RandomWalk::new(graph)?, eps)
}

#[derive(Clone, Debug)]
pub struct RunOutput {
    pub newick: String,
    pub edges_tsv: String,
    pub report: Report,
}

impl RunOutput {
    pub fn report_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("serializable");
        s.push('\n');
        s
    }
}

pub fn run_pipeline(config: &RunConfig) -> Result<RunOutput> {
    let start = Instant::now();
    config.validate()?;
    let site = config.model.load(config.mu)?;
    let mut samples = io::parse_fasta(&config.fasta, &site.alphabet())?;
    if samples.len() < 2 {
        return Err(Error::parse(
            &config.fasta.display().to_string(),
            1,
            "need at least two records",
        ));
    }
    let geo = match (&config.locations, &config.geo_graph) {
        (Some(loc_path), Some(graph_path)) => {
            let graph = io::parse_geo_graph(graph_path)?;
            let locations = io::parse_locations(loc_path)?;
            io::attach_locations(
                &mut samples,
                &locations,
                graph.node_count(),
                &loc_path.display().to_string(),
            )?;
            Some(geo_coordinate(graph, config.eps)?)
        }
        _ => None,
    };
    let geo_report = geo.as_ref().map(|g| {
        let GeoBounds { a, b } = *g.bounds();
        GeoReport {
            nodes: g.node_count(),
            lambda: g.walk().spectral().lambda,
            r: g.walk().spectral().r,
            a,
            b,
            eps: *g.ladder().expect("estimated coordinate"),
        }
    });
    let model = CostModel::new(site, geo, config.mode);
    let result = infer(&samples, &model, config.root.as_deref())?;

    let output = RunOutput {
        newick: format!("{}\n", result.tree.to_newick()),
        edges_tsv: io::write_edges_tsv(&result.tree, &result.costs),
        report: Report {
            k: samples.len(),
            n: samples[0].sequence.len(),
            model: model.site().to_string(),
            mode: config.mode,
            log_base: "e",
            root: result.tree.ids()[result.tree.root()].clone(),
            total_w: result.total_w,
            tree_cost_directed: result.tree_cost_directed,
            tree_cost_symmetric: result.tree_cost_symmetric,
            geo: geo_report,
            wall_time_s: config.timing.then(|| start.elapsed().as_secs_f64()),
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION"),
        },
    };
    write_opt(config.out_newick.as_deref(), &output.newick)?;
    write_opt(config.out_edges.as_deref(), &output.edges_tsv)?;
    write_opt(config.out_report.as_deref(), &output.report_json())?;
    Ok(output)
}

fn write_opt(path: Option<&Path>, text: &str) -> Result<()> {
    if let Some(p) = path {
        std::fs::write(p, text)?;
    }
    Ok(())
}
