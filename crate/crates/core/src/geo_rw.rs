//! Random walk on a weighted location graph: stationary distribution,
//! spectral mixing bound, and the chain of estimators for
//! `zeta = sup_{t >= 1} P^t(x, y)` and `-log zeta`.
//!
//! Walk time is discrete and starts at one step; a sample that stays at
//! the same node still pays `-log sup_t P^t(x, x) > 0`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

/// Second eigenvalues this close to one are treated as a walk that never
/// converges.
const MIXING_TOL: f64 = 1e-12;

/// Upper bound on the derived `B`, which must stay below one.
const MAX_UPPER_BOUND: f64 = 1.0 - 1e-6;

/// Undirected weighted graph over nodes `0..L`. Self-loops are allowed and
/// count once toward their node's weighted degree.
#[derive(Clone, Debug)]
pub struct GeoGraph {
    adj: Vec<Vec<(usize, f64)>>,
    degree: Vec<f64>,
    edges: Vec<(usize, usize, f64)>,
}

impl GeoGraph {
    /// Builds a graph over `node_count` nodes. Duplicate edges, in either
    /// orientation, are merged by summing their weights.
    pub fn new(
        node_count: usize,
        edges: impl IntoIterator<Item = (usize, usize, f64)>,
    ) -> Result<Self> {
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        for (u, v, w) in edges {
            if u >= node_count || v >= node_count {
                return Err(Error::GeoParameter(format!(
                    "edge ({u}, {v}) references a node outside 0..{node_count}"
                )));
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::GeoParameter(format!(
                    "edge ({u}, {v}) has weight {w}; weights must be positive"
                )));
            }
            *merged.entry((u.min(v), u.max(v))).or_insert(0.0) += w;
        }
        let mut adj = vec![Vec::new(); node_count];
        let mut degree = vec![0.0; node_count];
        for (&(u, v), &w) in &merged {
            adj[u].push((v, w));
            degree[u] += w;
            if u != v {
                adj[v].push((u, w));
                degree[v] += w;
            }
        }
        Ok(GeoGraph {
            adj,
            degree,
            edges: merged.into_iter().map(|((u, v), w)| (u, v, w)).collect(),
        })
    }

    /// Node count is one more than the largest id mentioned.
    pub fn from_edges(edges: impl IntoIterator<Item = (usize, usize, f64)>) -> Result<Self> {
        let edges: Vec<_> = edges.into_iter().collect();
        let n = edges.iter().map(|&(u, v, _)| u.max(v) + 1).max().unwrap_or(0);
        Self::new(n, edges)
    }

    pub fn node_count(&self) -> usize {
        self.adj.len()
    }

    /// Merged edges `(u, v, w)` with `u <= v`, sorted.
    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> f64 {
        self.degree[v]
    }

    pub fn total_weight(&self) -> f64 {
        self.edges.iter().map(|e| e.2).sum()
    }

    /// First node not reachable from node 0, if any.
    pub fn unreachable_node(&self) -> Option<usize> {
        let n = self.node_count();
        if n == 0 {
            return None;
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(u) = stack.pop() {
            for &(v, _) in &self.adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        seen.iter().position(|s| !s)
    }

    fn check_walkable(&self) -> Result<()> {
        if self.node_count() == 0 {
            return Err(Error::GeoParameter("geo graph has no nodes".into()));
        }
        if let Some(v) = self.unreachable_node() {
            return Err(Error::Disconnected(v));
        }
        if self.degree[0] == 0.0 {
            return Err(Error::GeoParameter("geo graph has no edges".into()));
        }
        Ok(())
    }

    /// One walk step applied to a distribution over nodes.
    pub fn step(&self, dist: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|o| *o = 0.0);
        for (u, &mass) in dist.iter().enumerate() {
            if mass == 0.0 {
                continue;
            }
            let scale = mass / self.degree[u];
            for &(v, w) in &self.adj[u] {
                out[v] += scale * w;
            }
        }
    }

    /// Dense `P = D^{-1} W`.
    pub fn transition_matrix(&self) -> DMatrix<f64> {
        let n = self.node_count();
        let mut p = DMatrix::zeros(n, n);
        for u in 0..n {
            for &(v, w) in &self.adj[u] {
                p[(u, v)] = w / self.degree[u];
            }
        }
        p
    }
}

/// Stationary distribution `pi(v) = deg_w(v) / sum_u deg_w(u)`.
pub fn rw_stationary(graph: &GeoGraph) -> Result<Vec<f64>> {
    graph.check_walkable()?;
    let total: f64 = graph.degree.iter().sum();
    Ok(graph.degree.iter().map(|d| d / total).collect())
}

/// Spectral summary of the walk.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralInfo {
    pub pi: Vec<f64>,
    /// Largest absolute eigenvalue of `D^{-1/2} W D^{-1/2}` other than the
    /// top eigenvalue 1.
    pub lambda: f64,
    /// `sqrt(max_v pi(v) / min_u pi(u))`.
    pub r: f64,
}

/// Eigenvalues of the symmetric normalization `D^{-1/2} W D^{-1/2}`, which
/// is similar to `P`. Fails for walks with `lambda >= 1` (bipartite).
pub fn mixing_lambda(graph: &GeoGraph) -> Result<SpectralInfo> {
    let pi = rw_stationary(graph)?;
    let n = graph.node_count();
    let mut sym = DMatrix::<f64>::zeros(n, n);
    for u in 0..n {
        for &(v, w) in graph.neighbors(u) {
            sym[(u, v)] = w / (graph.degree(u) * graph.degree(v)).sqrt();
        }
    }
    let mut eig: Vec<f64> = SymmetricEigen::new(sym).eigenvalues.iter().copied().collect();
    eig.sort_by(|a, b| b.total_cmp(a));
    let lambda = eig[1..].iter().fold(0.0f64, |acc, l| acc.max(l.abs()));
    if lambda >= 1.0 - MIXING_TOL {
        return Err(Error::NotMixing(lambda));
    }
    let max = pi.iter().copied().fold(f64::MIN, f64::max);
    let min = pi.iter().copied().fold(f64::MAX, f64::min);
    Ok(SpectralInfo {
        r: (max / min).sqrt(),
        pi,
        lambda,
    })
}

impl SpectralInfo {
    pub fn min_pi(&self) -> f64 {
        self.pi.iter().copied().fold(f64::MAX, f64::min)
    }

    /// `R * lambda^t`, the distance bound `|P^t(a, b) - pi(b)|`.
    pub fn mixing_bound(&self, t: u64) -> f64 {
        self.r * self.lambda.powf(t as f64)
    }

    /// Smallest `t' >= 1` with `R lambda^t' <= eps1 * pi(b)`.
    pub fn cutoff_time(&self, eps1: f64, b: usize) -> Result<u64> {
        let mass = *self
            .pi
            .get(b)
            .ok_or_else(|| Error::GeoParameter(format!("node {b} is not in the graph")))?;
        self.cutoff_for_mass(eps1, mass)
    }

    pub(crate) fn cutoff_for_mass(&self, eps1: f64, mass: f64) -> Result<u64> {
        check_positive("eps1", eps1)?;
        let target = eps1 * mass;
        if self.lambda == 0.0 || self.r * self.lambda <= target {
            return Ok(1);
        }
        let guess = ((target / self.r).ln() / self.lambda.ln()).ceil().max(1.0);
        let mut t = guess as u64;
        while t > 1 && self.mixing_bound(t - 1) <= target {
            t -= 1;
        }
        while self.mixing_bound(t) > target {
            t += 1;
        }
        Ok(t)
    }
}

/// Constants with `A <= sup_t P^t(x, y) <= B` over all pairs.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GeoBounds {
    pub a: f64,
    pub b: f64,
}

/// Estimate of `zeta = sup_{t >= 1} P^t(x, y)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WalkSupremum {
    pub value: f64,
    /// Steps scanned explicitly are `1..cutoff`.
    pub cutoff: u64,
    /// Step attaining `value`, or `None` when `pi(y)` stood in for the tail.
    pub argmax: Option<u64>,
}

/// Accuracy parameters of the estimator chain, from the end-to-end
/// tolerance down to the additive walk error.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize)]
pub struct EpsLadder {
    pub eps: f64,
    pub eps3: f64,
    pub eps2: f64,
    pub eps1: f64,
}

impl EpsLadder {
    /// `eps3 = eps / 8` (capped at `-log B`), `eps2 = eps3 * (-log B) / 2`,
    /// `eps1 = A * eps2`.
    pub fn from_eps(eps: f64, bounds: &GeoBounds) -> Result<Self> {
        if !(eps > 0.0 && eps < 1.0) {
            return Err(Error::GeoParameter(format!("eps must lie in (0, 1), got {eps}")));
        }
        Self::from_eps3(eps, (eps / 8.0).min(-bounds.b.ln()), bounds)
    }

    fn from_eps3(eps: f64, eps3: f64, bounds: &GeoBounds) -> Result<Self> {
        check_positive("eps3", eps3)?;
        let log_b = -bounds.b.ln();
        if eps3 > log_b {
            return Err(Error::GeoParameter(format!(
                "eps3 = {eps3} exceeds -log B = {log_b}"
            )));
        }
        let eps2 = 0.5 * eps3 * log_b;
        Ok(EpsLadder {
            eps,
            eps3,
            eps2,
            eps1: bounds.a * eps2,
        })
    }
}

/// A mixing random walk: graph plus its spectral summary.
#[derive(Clone, Debug)]
pub struct RandomWalk {
    graph: GeoGraph,
    spectral: SpectralInfo,
}

impl RandomWalk {
    pub fn new(graph: GeoGraph) -> Result<Self> {
        let spectral = mixing_lambda(&graph)?;
        Ok(RandomWalk { graph, spectral })
    }

    pub fn graph(&self) -> &GeoGraph {
        &self.graph
    }

    pub fn spectral(&self) -> &SpectralInfo {
        &self.spectral
    }

    pub fn pi(&self) -> &[f64] {
        &self.spectral.pi
    }

    pub(crate) fn check_node(&self, v: usize) -> Result<()> {
        if v < self.graph.node_count() {
            Ok(())
        } else {
            Err(Error::GeoParameter(format!(
                "node {v} is not in the graph (0..{})",
                self.graph.node_count()
            )))
        }
    }

    /// Cutoff shared by both orientations of a pair, taken at the endpoint
    /// with the smaller stationary mass. Using the same scan length for
    /// `(x, y)` and `(y, x)` keeps `pi(x) E1(x, y) = pi(y) E1(y, x)`.
    pub(crate) fn pair_cutoff(&self, eps1: f64, x: usize, y: usize) -> Result<u64> {
        let mass = self.spectral.pi[x].min(self.spectral.pi[y]);
        self.spectral.cutoff_for_mass(eps1, mass)
    }

    /// `P^t(x, y)` for `t = 1..=t_max`, by repeated sparse steps from `e_x`.
    pub fn walk_values(&self, x: usize, y: usize, t_max: u64) -> Result<Vec<f64>> {
        self.check_node(x)?;
        self.check_node(y)?;
        let n = self.graph.node_count();
        let mut dist = vec![0.0; n];
        let mut next = vec![0.0; n];
        dist[x] = 1.0;
        let mut out = Vec::with_capacity(t_max as usize);
        for _ in 0..t_max {
            self.graph.step(&dist, &mut next);
            std::mem::swap(&mut dist, &mut next);
            out.push(dist[y]);
        }
        Ok(out)
    }

    /// Additive estimate `E1 = max(max_{1 <= t < t'} P^t(x, y), pi(y))`,
    /// within `eps1 * pi` below `zeta` and never above it.
    pub fn sup_rw_additive(&self, x: usize, y: usize, eps1: f64) -> Result<WalkSupremum> {
        self.check_node(x)?;
        self.check_node(y)?;
        let cutoff = self.pair_cutoff(eps1, x, y)?;
        let values = self.walk_values(x, y, cutoff - 1)?;
        let mut best = WalkSupremum {
            value: self.spectral.pi[y],
            cutoff,
            argmax: None,
        };
        for (i, &p) in values.iter().enumerate() {
            if p > best.value {
                best.value = p;
                best.argmax = Some(i as u64 + 1);
            }
        }
        Ok(best)
    }

    /// `E1(x, y)` for every target `y`, from one walk started at `x`.
    pub fn additive_row(&self, x: usize, eps1: f64) -> Result<Vec<f64>> {
        self.check_node(x)?;
        let n = self.graph.node_count();
        let cutoffs = (0..n)
            .map(|y| self.pair_cutoff(eps1, x, y))
            .collect::<Result<Vec<_>>>()?;
        let horizon = cutoffs.iter().copied().max().unwrap_or(1);
        let mut best = self.spectral.pi.clone();
        let mut dist = vec![0.0; n];
        let mut next = vec![0.0; n];
        dist[x] = 1.0;
        for t in 1..horizon {
            self.graph.step(&dist, &mut next);
            std::mem::swap(&mut dist, &mut next);
            for y in 0..n {
                if t < cutoffs[y] && dist[y] > best[y] {
                    best[y] = dist[y];
                }
            }
        }
        Ok(best)
    }

    /// Multiplicative estimate: `E1` with `eps1 = A * eps2`, `A = min pi`,
    /// so that `E2 = (1 +- eps2) zeta`.
    pub fn sup_rw_multiplicative(&self, x: usize, y: usize, eps2: f64) -> Result<WalkSupremum> {
        if !(eps2 > 0.0 && eps2 < 1.0) {
            return Err(Error::GeoParameter(format!("eps2 must lie in (0, 1), got {eps2}")));
        }
        self.sup_rw_additive(x, y, self.spectral.min_pi() * eps2)
    }

    /// `E3 = -log E2` with `eps2 = eps3 * (-log B) / 2`, so that
    /// `E3 = (1 +- eps3)(-log zeta)` whenever `zeta <= B`.
    pub fn neg_log_sup_rw(&self, x: usize, y: usize, eps3: f64, bounds: &GeoBounds) -> Result<f64> {
        check_positive("eps3", eps3)?;
        let log_b = -bounds.b.ln();
        if eps3 > log_b {
            return Err(Error::GeoParameter(format!(
                "eps3 = {eps3} exceeds -log B = {log_b}"
            )));
        }
        let est = self.sup_rw_multiplicative(x, y, 0.5 * eps3 * log_b)?;
        // E2 never exceeds zeta, so E2 > B proves zeta > B.
        if est.value > bounds.b {
            return Err(Error::BoundsViolation {
                x,
                y,
                estimate: est.value,
                bound: bounds.b,
            });
        }
        Ok(-est.value.ln())
    }

    /// `A = min pi` and `B` = largest additive estimate at `eps1 = A / 10`
    /// plus that slack, capped just below one.
    pub fn derive_bounds(&self) -> Result<GeoBounds> {
        let a = self.spectral.min_pi();
        let eps1 = a / 10.0;
        let mut top = 0.0f64;
        for x in 0..self.graph.node_count() {
            let row = self.additive_row(x, eps1)?;
            top = row.into_iter().fold(top, f64::max);
        }
        let b = (top + eps1).min(MAX_UPPER_BOUND).max(a);
        Ok(GeoBounds { a, b })
    }
}

fn check_positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::GeoParameter(format!("{name} must be positive, got {v}")))
    }
}
