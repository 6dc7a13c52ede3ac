//! Node and edge costs of labeled trees and the complete terminal graph
//! handed to the spanning-tree step.
//!
//! A label is a sequence plus, when a location model is present, a node of
//! the location graph. Costs are natural-log:
//!
//! * `phi(v) = -log pi(v)`
//! * `phi(u, v) = -log sup_t P^t(u, v)`
//! * `w(u, v) = phi(u, v) - phi(v)`, symmetric for reversible models
//! * `w'(u, v) = (phi(u, v) + phi(v, u) - phi(u) - phi(v)) / 2`

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::exact_walk_sup_table;
use crate::geo_rw::{EpsLadder, GeoBounds, RandomWalk};
use crate::substitution::{CountMatrix, SiteModel};

/// Relative tail tolerance for the exact walk scan in shared-time mode.
const EXACT_TAIL_EPS: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sample {
    pub id: String,
    /// Symbol indices into the site model's alphabet.
    pub sequence: Vec<u8>,
    pub location: Option<usize>,
}

impl Sample {
    pub fn new(id: impl Into<String>, sequence: Vec<u8>, location: Option<usize>) -> Self {
        Sample {
            id: id.into(),
            sequence,
            location,
        }
    }
}

/// How the sequence and location coordinates share branch duration.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum CostMode {
    /// Sequence sites share one continuous duration; the location takes its
    /// own supremum over walk steps.
    #[default]
    Independent,
    /// One integer duration for the whole label.
    SharedT,
}

impl FromStr for CostMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" => Ok(CostMode::Independent),
            "shared-t" | "shared_t" => Ok(CostMode::SharedT),
            _ => Err(Error::domain(format!(
                "unknown mode `{s}` (expected independent or shared-t)"
            ))),
        }
    }
}

impl fmt::Display for CostMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CostMode::Independent => "independent",
            CostMode::SharedT => "shared-t",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum WalkSupMethod {
    Estimated(EpsLadder),
    Exact,
}

/// Location coordinate of the labels: a random walk plus a table of walk
/// suprema for every node pair.
#[derive(Clone, Debug)]
pub struct GeoCoordinate {
    walk: RandomWalk,
    bounds: GeoBounds,
    method: WalkSupMethod,
    sup: Vec<f64>,
}

impl GeoCoordinate {
    /// Estimated suprema driven by the end-to-end tolerance `eps`, with the
    /// bounds `A`, `B` derived from the graph.
    pub fn estimated(walk: RandomWalk, eps: f64) -> Result<Self> {
        let bounds = walk.derive_bounds()?;
        let ladder = EpsLadder::from_eps(eps, &bounds)?;
        Self::with_ladder(walk, bounds, ladder)
    }

    pub fn with_ladder(walk: RandomWalk, bounds: GeoBounds, ladder: EpsLadder) -> Result<Self> {
        let n = walk.graph().node_count();
        let eps1 = walk.spectral().min_pi() * ladder.eps2;
        let rows = (0..n)
            .into_par_iter()
            .map(|x| walk.additive_row(x, eps1))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeoCoordinate {
            walk,
            bounds,
            method: WalkSupMethod::Estimated(ladder),
            sup: rows.concat(),
        })
    }

    /// Suprema scanned until the mixing tail is below round-off.
    pub fn exact(walk: RandomWalk) -> Result<Self> {
        let bounds = walk.derive_bounds()?;
        let sup = exact_walk_sup_table(&walk);
        Ok(GeoCoordinate {
            walk,
            bounds,
            method: WalkSupMethod::Exact,
            sup,
        })
    }

    pub fn walk(&self) -> &RandomWalk {
        &self.walk
    }

    pub fn bounds(&self) -> &GeoBounds {
        &self.bounds
    }

    pub fn ladder(&self) -> Option<&EpsLadder> {
        match &self.method {
            WalkSupMethod::Estimated(l) => Some(l),
            WalkSupMethod::Exact => None,
        }
    }

    pub fn node_count(&self) -> usize {
        self.walk.graph().node_count()
    }

    /// Estimated (or exact) `sup_t P^t(x, y)`.
    pub fn supremum(&self, x: usize, y: usize) -> Result<f64> {
        self.walk.check_node(x)?;
        self.walk.check_node(y)?;
        Ok(self.sup[x * self.node_count() + y])
    }

    /// `-log pi(x)`.
    pub fn node_cost(&self, x: usize) -> Result<f64> {
        self.walk.check_node(x)?;
        Ok(-self.walk.pi()[x].ln())
    }

    /// `-log sup_t P^t(x, y)`; the estimated variant is `E3`.
    pub fn edge_cost(&self, x: usize, y: usize) -> Result<f64> {
        let s = self.supremum(x, y)?;
        if let WalkSupMethod::Estimated(_) = self.method {
            if s > self.bounds.b {
                return Err(Error::BoundsViolation {
                    x,
                    y,
                    estimate: s,
                    bound: self.bounds.b,
                });
            }
        }
        Ok(-s.ln())
    }

    fn shared_cutoff(&self, x: usize, y: usize) -> Result<u64> {
        let eps1 = match self.method {
            WalkSupMethod::Estimated(_) => self.walk.spectral().min_pi() * self.ladder().unwrap().eps2,
            WalkSupMethod::Exact => EXACT_TAIL_EPS,
        };
        self.walk.pair_cutoff(eps1, x, y)
    }
}

/// Cost structure of a label space: site model, optional location model
/// and the duration-sharing mode.
#[derive(Clone, Debug)]
pub struct CostModel {
    site: SiteModel,
    geo: Option<GeoCoordinate>,
    mode: CostMode,
}

/// Edge cost with diagnostics.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EdgeCost {
    /// `phi(u, v)`.
    pub phi: f64,
    /// Maximizing duration (`inf` for a stationary-limit supremum). In
    /// independent mode this is the sequence block's duration.
    pub t_star: f64,
    pub seq_cost: f64,
    pub geo_cost: f64,
}

impl CostModel {
    pub fn new(site: SiteModel, geo: Option<GeoCoordinate>, mode: CostMode) -> Self {
        CostModel { site, geo, mode }
    }

    pub fn sequence_only(site: SiteModel) -> Self {
        Self::new(site, None, CostMode::Independent)
    }

    pub fn site(&self) -> &SiteModel {
        &self.site
    }

    pub fn geo(&self) -> Option<&GeoCoordinate> {
        self.geo.as_ref()
    }

    pub fn mode(&self) -> CostMode {
        self.mode
    }

    fn location(&self, s: &Sample) -> Result<Option<usize>> {
        match (&self.geo, s.location) {
            (None, _) => Ok(None),
            (Some(_), None) => Err(Error::domain(format!(
                "sample `{}` has no location but a location model is in use",
                s.id
            ))),
            (Some(g), Some(x)) if x >= g.node_count() => Err(Error::domain(format!(
                "sample `{}` is at node {x}, outside the location graph",
                s.id
            ))),
            (Some(_), Some(x)) => Ok(Some(x)),
        }
    }

    /// `phi(v) = -sum_i log pi(v_i) - log pi_G(location)`.
    pub fn node_cost(&self, s: &Sample) -> Result<f64> {
        let seq = self.site.node_cost(&s.sequence)?;
        let geo = match (self.location(s)?, &self.geo) {
            (Some(x), Some(g)) => g.node_cost(x)?,
            _ => 0.0,
        };
        Ok(seq + geo)
    }

    /// `phi(u, v) = -log sup_t P^t(u, v)` under the configured mode.
    pub fn edge_cost(&self, u: &Sample, v: &Sample) -> Result<EdgeCost> {
        let counts = CountMatrix::from_sequences(&u.sequence, &v.sequence, self.site.alphabet_size())?;
        let locations = (self.location(u)?, self.location(v)?);
        let (geo, lu, lv) = match (&self.geo, locations) {
            (Some(g), (Some(a), Some(b))) => (g, a, b),
            _ => {
                let seq = self.sequence_sup(&counts)?;
                return Ok(EdgeCost {
                    phi: seq.0,
                    t_star: seq.1,
                    seq_cost: seq.0,
                    geo_cost: 0.0,
                });
            }
        };
        match self.mode {
            CostMode::Independent => {
                let (seq_cost, t_star) = self.sequence_sup(&counts)?;
                let geo_cost = geo.edge_cost(lu, lv)?;
                Ok(EdgeCost {
                    phi: seq_cost + geo_cost,
                    t_star,
                    seq_cost,
                    geo_cost,
                })
            }
            CostMode::SharedT => self.shared_edge_cost(geo, &counts, lu, lv),
        }
    }

    /// `(cost, t_star)` of the sequence block alone; empty sequences cost
    /// nothing.
    fn sequence_sup(&self, counts: &CountMatrix) -> Result<(f64, f64)> {
        if counts.total() == 0 {
            return Ok((0.0, 0.0));
        }
        let s = self.site.sup_seq_loglik(counts)?;
        Ok((s.cost, s.t_star))
    }

    fn sequence_loglik(&self, counts: &CountMatrix, t: f64) -> Result<f64> {
        if counts.total() == 0 {
            return Ok(0.0);
        }
        self.site.seq_loglik(counts, t)
    }

    /// `-log sup_{t >= 1} P_G^t(lu, lv) L(t)`: explicit scan below the
    /// cutoff, `pi_G(lv)` standing in for the walk beyond it.
    fn shared_edge_cost(
        &self,
        geo: &GeoCoordinate,
        counts: &CountMatrix,
        lu: usize,
        lv: usize,
    ) -> Result<EdgeCost> {
        let cutoff = geo.shared_cutoff(lu, lv)?;
        let walk = geo.walk.walk_values(lu, lv, cutoff - 1)?;
        let mut best = (f64::NEG_INFINITY, 1.0, 0.0);
        for (i, &p) in walk.iter().enumerate() {
            if p <= 0.0 {
                continue;
            }
            let t = (i + 1) as f64;
            let seq = self.sequence_loglik(counts, t)?;
            let total = p.ln() + seq;
            if total > best.0 {
                best = (total, t, p.ln());
            }
        }
        let (tail_seq, tail_t) = if counts.total() == 0 {
            (0.0, cutoff as f64)
        } else {
            self.site.sup_loglik_integer_from(counts, cutoff)?
        };
        let tail_geo = geo.walk.pi()[lv].ln();
        if tail_geo + tail_seq > best.0 {
            best = (tail_geo + tail_seq, tail_t, tail_geo);
        }
        let phi = -best.0;
        if !phi.is_finite() {
            return Err(Error::Numeric(format!("shared-time cost is {phi}")));
        }
        Ok(EdgeCost {
            phi,
            t_star: best.1,
            seq_cost: phi + best.2,
            geo_cost: -best.2,
        })
    }
}

/// Tree weight `w(u, v) = phi(u, v) - phi(v)`.
pub fn mst_weight(phi_uv: f64, phi_v: f64) -> f64 {
    phi_uv - phi_v
}

/// `w'(u, v) = (phi(u, v) + phi(v, u) - phi(u) - phi(v)) / 2`.
pub fn symmetric_weight(phi_uv: f64, phi_vu: f64, phi_u: f64, phi_v: f64) -> f64 {
    0.5 * (phi_uv + phi_vu - phi_u - phi_v)
}

/// Costs indexed by label position.
pub trait LabelCosts {
    fn label_count(&self) -> usize;
    fn node_cost(&self, v: usize) -> f64;
    /// Directed `phi(u, v)`.
    fn edge_cost(&self, u: usize, v: usize) -> f64;

    fn mst_weight(&self, u: usize, v: usize) -> f64 {
        mst_weight(self.edge_cost(u, v), self.node_cost(v))
    }

    fn symmetric_weight(&self, u: usize, v: usize) -> f64 {
        symmetric_weight(
            self.edge_cost(u, v),
            self.edge_cost(v, u),
            self.node_cost(u),
            self.node_cost(v),
        )
    }
}

/// Complete graph over `k` labels: node costs, directed `phi` and
/// diagnostics for every ordered pair.
#[derive(Clone, Debug)]
pub struct CostMatrix {
    ids: Vec<String>,
    node: Vec<f64>,
    phi: Vec<f64>,
    t_star: Vec<f64>,
    geo: Vec<f64>,
}

impl CostMatrix {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
    }

    pub fn node_costs(&self) -> &[f64] {
        &self.node
    }

    /// Directed `phi(u, v)`; zero on the diagonal.
    pub fn phi(&self, u: usize, v: usize) -> f64 {
        self.phi[u * self.len() + v]
    }

    /// `w(u, v)`; zero on the diagonal.
    pub fn weight(&self, u: usize, v: usize) -> f64 {
        if u == v {
            0.0
        } else {
            mst_weight(self.phi(u, v), self.node[v])
        }
    }

    pub fn t_star(&self, u: usize, v: usize) -> f64 {
        self.t_star[u * self.len() + v]
    }

    /// Location part of `phi(u, v)`.
    pub fn geo_cost(&self, u: usize, v: usize) -> f64 {
        self.geo[u * self.len() + v]
    }

    pub fn pair_count(&self) -> usize {
        self.len() * self.len().saturating_sub(1) / 2
    }
}

impl LabelCosts for CostMatrix {
    fn label_count(&self) -> usize {
        self.len()
    }

    fn node_cost(&self, v: usize) -> f64 {
        self.node[v]
    }

    fn edge_cost(&self, u: usize, v: usize) -> f64 {
        self.phi(u, v)
    }
}

fn check_samples(samples: &[Sample], min: usize, unique_ids: bool) -> Result<()> {
    if samples.len() < min {
        return Err(Error::domain(format!(
            "need at least {min} samples, got {}",
            samples.len()
        )));
    }
    if unique_ids {
        let mut seen = HashSet::new();
        for s in samples {
            if !seen.insert(s.id.as_str()) {
                return Err(Error::domain(format!("duplicate sample id `{}`", s.id)));
            }
        }
    }
    Ok(())
}

fn wrap_pair<'a>(u: &'a Sample, v: &'a Sample) -> impl Fn(Error) -> Error + 'a {
    move |e| Error::Pair {
        u: u.id.clone(),
        v: v.id.clone(),
        source: Box::new(e),
    }
}

struct Assembly<'a> {
    samples: &'a [Sample],
    node: Vec<f64>,
    geo_node: Vec<f64>,
}

impl Assembly<'_> {
    fn new<'a>(samples: &'a [Sample], model: &CostModel) -> Result<Assembly<'a>> {
        let node = samples
            .iter()
            .map(|s| {
                model
                    .node_cost(s)
                    .map_err(|e| Error::domain(format!("sample `{}`: {e}", s.id)))
            })
            .collect::<Result<Vec<_>>>()?;
        let geo_node = samples
            .iter()
            .map(|s| match (model.geo(), s.location) {
                (Some(g), Some(x)) => g.node_cost(x),
                _ => Ok(0.0),
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Assembly {
            samples,
            node,
            geo_node,
        })
    }

    fn finish(self, pairs: &[(usize, usize)], costs: Vec<EdgeCost>, mirror: bool) -> CostMatrix {
        let k = self.samples.len();
        let mut phi = vec![0.0; k * k];
        let mut t_star = vec![0.0; k * k];
        let mut geo = vec![0.0; k * k];
        for (&(u, v), c) in pairs.iter().zip(costs) {
            phi[u * k + v] = c.phi;
            t_star[u * k + v] = c.t_star;
            geo[u * k + v] = c.geo_cost;
            if mirror {
                // phi(v, u) = phi(u, v) + phi(u) - phi(v) by reversibility,
                // coordinate by coordinate.
                phi[v * k + u] = c.phi + self.node[u] - self.node[v];
                t_star[v * k + u] = c.t_star;
                geo[v * k + u] = c.geo_cost + self.geo_node[u] - self.geo_node[v];
            }
        }
        CostMatrix {
            ids: self.samples.iter().map(|s| s.id.clone()).collect(),
            node: self.node,
            phi,
            t_star,
            geo,
        }
    }
}

fn compute_pairs(
    samples: &[Sample],
    model: &CostModel,
    pairs: &[(usize, usize)],
) -> Result<Vec<EdgeCost>> {
    pairs
        .par_iter()
        .map(|&(u, v)| {
            model
                .edge_cost(&samples[u], &samples[v])
                .map_err(wrap_pair(&samples[u], &samples[v]))
        })
        .collect()
}

/// Tree input: node costs plus one computed orientation per pair,
/// mirrored through the reversibility identity.
pub fn build_cost_matrix(samples: &[Sample], model: &CostModel) -> Result<CostMatrix> {
    check_samples(samples, 2, true)?;
    let assembly = Assembly::new(samples, model)?;
    let k = samples.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|u| (u + 1..k).map(move |v| (u, v)))
        .collect();
    let costs = compute_pairs(samples, model, &pairs)?;
    Ok(assembly.finish(&pairs, costs, true))
}

/// Like [`build_cost_matrix`] but computes both orientations of every pair
/// and allows repeated labels; used to check the reversibility identities.
pub fn build_full_cost_matrix(samples: &[Sample], model: &CostModel) -> Result<CostMatrix> {
    check_samples(samples, 1, false)?;
    let assembly = Assembly::new(samples, model)?;
    let k = samples.len();
    let pairs: Vec<(usize, usize)> = (0..k)
        .flat_map(|u| (0..k).filter(move |&v| v != u).map(move |v| (u, v)))
        .collect();
    let costs = compute_pairs(samples, model, &pairs)?;
    Ok(assembly.finish(&pairs, costs, false))
}
