//! Brute-force references for small instances: suprema over duration by
//! grid search, walk suprema by matrix powers, and the optimal Steiner tree
//! over the full label space.

use std::collections::HashMap;

use nalgebra::DMatrix;
use rayon::prelude::*;

use crate::cost::{build_full_cost_matrix, CostMatrix, CostModel, LabelCosts, Sample};
use crate::error::{Error, Result};
use crate::geo_rw::RandomWalk;

/// Most states an enumerated label space may hold.
pub const MAX_STATES: usize = 64;
/// Most terminals accepted by [`exact_steiner_cost`].
pub const MAX_TERMINALS: usize = 6;
/// Most Steiner-node subsets scanned.
pub const MAX_SUBSETS: u64 = 1 << 16;

/// Tail tolerance for the exact walk scan, relative to `min pi`.
const WALK_TAIL_EPS: f64 = 1e-13;

const GOLDEN_TOL: f64 = 1e-10;
const INV_PHI: f64 = 0.618_033_988_749_894_8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
    pub refinements: usize,
}

impl GridSpec {
    pub fn new(lo: f64, hi: f64, points: usize, refinements: usize) -> Self {
        GridSpec {
            lo,
            hi,
            points,
            refinements,
        }
    }

    /// `{0} + logspace(hi * 1e-9, hi)` when `lo = 0`, else `logspace(lo, hi)`.
    fn nodes(&self) -> Vec<f64> {
        let (start, lead_zero) = if self.lo == 0.0 {
            (self.hi * 1e-9, true)
        } else {
            (self.lo, false)
        };
        let m = self.points - usize::from(lead_zero);
        let (a, b) = (start.ln(), self.hi.ln());
        let mut out = Vec::with_capacity(self.points);
        if lead_zero {
            out.push(0.0);
        }
        for i in 0..m {
            let x = if i + 1 == m {
                self.hi
            } else if i == 0 {
                start
            } else {
                (a + (b - a) * i as f64 / (m - 1) as f64).exp()
            };
            out.push(x);
        }
        out
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSup {
    pub t_star: f64,
    pub value: f64,
    /// The best point is the top of the grid: the supremum may lie beyond.
    pub at_upper_end: bool,
}

/// Maximizes `f` over `[lo, hi]`: best grid point, then golden-section
/// refinement between its neighbors. `-inf` values are allowed (zero
/// likelihood); NaN and `+inf` are errors.
pub fn grid_sup_t(f: impl Fn(f64) -> f64, spec: GridSpec) -> Result<GridSup> {
    if !(spec.lo >= 0.0 && spec.lo < spec.hi && spec.hi.is_finite()) {
        return Err(Error::domain(format!(
            "grid needs 0 <= lo < hi < inf, got [{}, {}]",
            spec.lo, spec.hi
        )));
    }
    if spec.points < 50 {
        return Err(Error::domain(format!("grid needs at least 50 points, got {}", spec.points)));
    }
    let eval = |t: f64| -> Result<f64> {
        let v = f(t);
        if v.is_nan() || v == f64::INFINITY {
            Err(Error::Numeric(format!("objective is {v} at t = {t}")))
        } else {
            Ok(v)
        }
    };
    let nodes = spec.nodes();
    let values = nodes.iter().map(|&t| eval(t)).collect::<Result<Vec<_>>>()?;
    // First maximum, so a constant objective returns `lo`.
    let mut i = 0;
    for j in 1..values.len() {
        if values[j] > values[i] {
            i = j;
        }
    }
    let mut best = GridSup {
        t_star: nodes[i],
        value: values[i],
        at_upper_end: i + 1 == nodes.len(),
    };
    if values[i] == f64::NEG_INFINITY {
        return Ok(best);
    }
    let (mut a, mut b) = (nodes[i.saturating_sub(1)], nodes[(i + 1).min(nodes.len() - 1)]);
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (eval(c)?, eval(d)?);
    for _ in 0..spec.refinements {
        if (b - a) <= GOLDEN_TOL * b.abs().max(1e-300) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = eval(c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = eval(d)?;
        }
    }
    let (t, v) = if fc >= fd { (c, fc) } else { (d, fd) };
    if v > best.value {
        best.t_star = t;
        best.value = v;
        best.at_upper_end = false;
    }
    Ok(best)
}

/// `sup_{t >= 1} P^t(x, y)` for every ordered pair (row-major), scanning
/// until the mixing bound is below `1e-13 * min pi`.
pub fn exact_walk_sup_table(walk: &RandomWalk) -> Vec<f64> {
    let spectral = walk.spectral();
    let horizon = spectral
        .cutoff_for_mass(WALK_TAIL_EPS, spectral.min_pi())
        .expect("positive tolerance");
    let n = walk.graph().node_count();
    let p = walk.graph().transition_matrix();
    let mut power = p.clone();
    let mut best = vec![0.0; n * n];
    for x in 0..n {
        for y in 0..n {
            best[x * n + y] = walk.pi()[y];
        }
    }
    for t in 1..=horizon {
        for x in 0..n {
            for y in 0..n {
                let v = power[(x, y)];
                if v > best[x * n + y] {
                    best[x * n + y] = v;
                }
            }
        }
        if t < horizon {
            power = &power * &p;
        }
    }
    best
}

/// Scan of `P^t(x, y)` for `1 <= t <= t_max` by dense matrix powers.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BruteSup {
    pub scan_max: f64,
    pub argmax: u64,
    /// `pi(y) + R lambda^t_max`: no later term exceeds this.
    pub tail_bound: f64,
    pub pi_y: f64,
}

impl BruteSup {
    /// Certified lower bound on `sup_t P^t(x, y)`.
    pub fn lower(&self) -> f64 {
        self.scan_max.max(self.pi_y)
    }

    /// Certified upper bound on `sup_t P^t(x, y)`.
    pub fn upper(&self) -> f64 {
        self.scan_max.max(self.tail_bound)
    }
}

pub fn brute_force_sup_rw(walk: &RandomWalk, x: usize, y: usize, t_max: u64) -> Result<BruteSup> {
    let n = walk.graph().node_count();
    if x >= n || y >= n {
        return Err(Error::GeoParameter(format!("pair ({x}, {y}) outside 0..{n}")));
    }
    if t_max == 0 {
        return Err(Error::domain("t_max must be at least 1"));
    }
    let p = walk.graph().transition_matrix();
    let mut power: DMatrix<f64> = p.clone();
    let mut out = BruteSup {
        scan_max: power[(x, y)],
        argmax: 1,
        tail_bound: walk.pi()[y] + walk.spectral().mixing_bound(t_max),
        pi_y: walk.pi()[y],
    };
    for t in 2..=t_max {
        power = &power * &p;
        if power[(x, y)] > out.scan_max {
            out.scan_max = power[(x, y)];
            out.argmax = t;
        }
    }
    Ok(out)
}

/// [`brute_force_sup_rw`] for every ordered pair at once (row-major).
pub fn brute_force_sup_table(walk: &RandomWalk, t_max: u64) -> Result<Vec<BruteSup>> {
    if t_max == 0 {
        return Err(Error::domain("t_max must be at least 1"));
    }
    let n = walk.graph().node_count();
    let p = walk.graph().transition_matrix();
    let tail = walk.spectral().mixing_bound(t_max);
    let mut out: Vec<BruteSup> = (0..n * n)
        .map(|i| BruteSup {
            scan_max: p[(i / n, i % n)],
            argmax: 1,
            tail_bound: walk.pi()[i % n] + tail,
            pi_y: walk.pi()[i % n],
        })
        .collect();
    let mut power = p.clone();
    for t in 2..=t_max {
        power = &power * &p;
        for (i, b) in out.iter_mut().enumerate() {
            let v = power[(i / n, i % n)];
            if v > b.scan_max {
                b.scan_max = v;
                b.argmax = t;
            }
        }
    }
    Ok(out)
}

/// Every label of length `n` (times every location when a location model is
/// present), with the complete cost table between them.
#[derive(Clone, Debug)]
pub struct StateSpace {
    states: Vec<Sample>,
    costs: CostMatrix,
    index: HashMap<(Vec<u8>, Option<usize>), usize>,
}

impl StateSpace {
    pub fn enumerate(model: &CostModel, n: usize) -> Result<Self> {
        let m = model.site().alphabet_size();
        let locations = model.geo().map(|g| g.node_count());
        let size = (m as f64).powi(n as i32) * locations.unwrap_or(1) as f64;
        if size > MAX_STATES as f64 {
            return Err(Error::Size(format!(
                "label space has {size} states, cap is {MAX_STATES}"
            )));
        }
        let seq_count = m.pow(n as u32);
        let mut states = Vec::with_capacity(size as usize);
        for code in 0..seq_count {
            let mut seq = vec![0u8; n];
            let mut c = code;
            for site in (0..n).rev() {
                seq[site] = (c % m) as u8;
                c /= m;
            }
            match locations {
                None => states.push(Sample::new(format!("x{}", states.len()), seq, None)),
                Some(l) => {
                    for loc in 0..l {
                        states.push(Sample::new(format!("x{}", states.len()), seq.clone(), Some(loc)));
                    }
                }
            }
        }
        let costs = build_full_cost_matrix(&states, model)?;
        let index = states
            .iter()
            .enumerate()
            .map(|(i, s)| ((s.sequence.clone(), s.location), i))
            .collect();
        Ok(StateSpace {
            states,
            costs,
            index,
        })
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[Sample] {
        &self.states
    }

    pub fn costs(&self) -> &CostMatrix {
        &self.costs
    }

    /// State carrying the same label as `s`.
    pub fn index_of(&self, s: &Sample) -> Option<usize> {
        self.index.get(&(s.sequence.clone(), s.location)).copied()
    }
}

/// Optimal Steiner tree: node set and cost `sum w' + sum phi`.
#[derive(Clone, Debug, PartialEq)]
pub struct SteinerOpt {
    pub cost: f64,
    pub nodes: Vec<usize>,
}

/// Minimum over node sets `X` containing the terminals of the `w'`
/// spanning-tree cost of `X` plus `sum_{v in X} phi(v)`.
pub fn exact_steiner_cost(space: &StateSpace, terminals: &[Sample]) -> Result<SteinerOpt> {
    if terminals.is_empty() || terminals.len() > MAX_TERMINALS {
        return Err(Error::Size(format!(
            "need 1..={MAX_TERMINALS} terminals, got {}",
            terminals.len()
        )));
    }
    let mut term = Vec::with_capacity(terminals.len());
    for s in terminals {
        let i = space.index_of(s).ok_or_else(|| {
            Error::domain(format!("terminal `{}` is not a state of the label space", s.id))
        })?;
        if term.contains(&i) {
            return Err(Error::domain(format!("terminal `{}` repeats a label", s.id)));
        }
        term.push(i);
    }
    let optional: Vec<usize> = (0..space.len()).filter(|i| !term.contains(i)).collect();
    if optional.len() >= 64 || (1u64 << optional.len()) > MAX_SUBSETS {
        return Err(Error::Size(format!(
            "{} candidate Steiner nodes exceed the subset cap {MAX_SUBSETS}",
            optional.len()
        )));
    }
    let costs = space.costs();
    (0..1u64 << optional.len())
        .into_par_iter()
        .map(|mask| {
            let mut nodes = term.clone();
            nodes.extend(
                optional
                    .iter()
                    .enumerate()
                    .filter(|(b, _)| mask & (1 << b) != 0)
                    .map(|(_, &v)| v),
            );
            let cost = prim_symmetric(costs, &nodes) + nodes.iter().map(|&v| costs.node_cost(v)).sum::<f64>();
            SteinerOpt { cost, nodes }
        })
        .min_by(|a, b| a.cost.total_cmp(&b.cost).then(a.nodes.len().cmp(&b.nodes.len())))
        .ok_or_else(|| Error::Numeric("empty subset scan".into()))
}

/// Minimum spanning tree weight of `nodes` under `w'`.
fn prim_symmetric(costs: &impl LabelCosts, nodes: &[usize]) -> f64 {
    let k = nodes.len();
    let mut in_tree = vec![false; k];
    let mut dist = vec![f64::INFINITY; k];
    dist[0] = 0.0;
    let mut total = 0.0;
    for _ in 0..k {
        let mut u = usize::MAX;
        for i in 0..k {
            if !in_tree[i] && (u == usize::MAX || dist[i] < dist[u]) {
                u = i;
            }
        }
        in_tree[u] = true;
        total += dist[u];
        for i in 0..k {
            if !in_tree[i] {
                let w = costs.symmetric_weight(nodes[u], nodes[i]);
                if w < dist[i] {
                    dist[i] = w;
                }
            }
        }
    }
    total
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geo_rw::GeoGraph;
    use crate::substitution::{CountMatrix, SiteModel};
    use approx::assert_abs_diff_eq;

    fn spec() -> GridSpec {
        GridSpec::new(0.0, 50.0, 400, 200)
    }

    #[test]
    fn grid_matches_jc69_closed_form() {
        let jc = SiteModel::jc69(1.0).unwrap();
        let counts = CountMatrix::from_hamming(4, 4, 1);
        let g = grid_sup_t(|t| jc.seq_loglik(&counts, t).unwrap(), spec()).unwrap();
        let closed = jc.sup_seq_loglik(&counts).unwrap();
        assert_abs_diff_eq!(-g.value, closed.cost, epsilon = 1e-6);
        assert_abs_diff_eq!(g.t_star, closed.t_star, epsilon = 1e-4);
    }

    #[test]
    fn grid_boundaries() {
        let c = grid_sup_t(|_| 2.5, GridSpec::new(1.0, 10.0, 60, 50)).unwrap();
        assert_eq!((c.t_star, c.value), (1.0, 2.5));
        let up = grid_sup_t(|t| -1.0 / t, GridSpec::new(1.0, 10.0, 60, 50)).unwrap();
        assert!(up.at_upper_end);
        assert_eq!(up.t_star, 10.0);
        assert!(grid_sup_t(|_| f64::NAN, spec()).is_err());
        assert!(grid_sup_t(|_| 0.0, GridSpec::new(0.0, 1.0, 10, 5)).is_err());
        assert!(grid_sup_t(|_| 0.0, GridSpec::new(2.0, 1.0, 60, 5)).is_err());
    }

    #[test]
    fn brute_walk_examples() {
        let tri = RandomWalk::new(GeoGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()).unwrap();
        let b = brute_force_sup_rw(&tri, 0, 1, 60).unwrap();
        assert_abs_diff_eq!(b.scan_max, 0.5, epsilon = 1e-12);
        assert_eq!(b.argmax, 1);
        assert!(b.upper() - b.lower() < 1e-12);
        let mut e = Vec::new();
        for u in 0..4 {
            for v in u + 1..4 {
                e.push((u, v, 1.0));
            }
        }
        let k4 = RandomWalk::new(GeoGraph::from_edges(e).unwrap()).unwrap();
        assert_abs_diff_eq!(brute_force_sup_rw(&k4, 2, 3, 60).unwrap().lower(), 1.0 / 3.0, epsilon = 1e-12);
        let table = exact_walk_sup_table(&tri);
        assert_abs_diff_eq!(table[1], 0.5, epsilon = 1e-12);
        assert_abs_diff_eq!(table[0], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn star_with_loop_matches_additive_estimate() {
        let g = GeoGraph::from_edges([(0, 0, 1.0), (0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)]).unwrap();
        let walk = RandomWalk::new(g).unwrap();
        let eps1 = 1e-3;
        let e1 = walk.sup_rw_additive(0, 2, eps1).unwrap();
        let brute = brute_force_sup_rw(&walk, 0, 2, 10 * e1.cutoff.max(1)).unwrap();
        assert!(e1.value <= brute.upper() + 1e-12);
        assert!(brute.lower() - e1.value <= eps1 * walk.pi()[2] + 1e-12);
    }

    #[test]
    fn steiner_all_states_is_one_mst() {
        let model = CostModel::sequence_only(SiteModel::binary(1.0).unwrap());
        let space = StateSpace::enumerate(&model, 2).unwrap();
        assert_eq!(space.len(), 4);
        let all = space.states().to_vec();
        let opt = exact_steiner_cost(&space, &all).unwrap();
        let direct = prim_symmetric(space.costs(), &[0, 1, 2, 3]) + space.costs().node_costs().iter().sum::<f64>();
        assert_abs_diff_eq!(opt.cost, direct, epsilon = 1e-12);
    }

    #[test]
    fn steiner_pair_is_path() {
        let model = CostModel::sequence_only(SiteModel::binary(1.0).unwrap());
        let space = StateSpace::enumerate(&model, 2).unwrap();
        let s = space.states();
        let opt = exact_steiner_cost(&space, &[s[0].clone(), s[3].clone()]).unwrap();
        let c = space.costs();
        let direct = c.node_cost(0) + c.edge_cost(0, 3);
        assert!(opt.cost <= direct + 1e-12);
        assert!(StateSpace::enumerate(&model, 7).is_err());
        assert!(exact_steiner_cost(&space, &[s[0].clone(), s[0].clone()]).is_err());
    }
}
