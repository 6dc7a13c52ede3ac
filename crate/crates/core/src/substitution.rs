//! Reversible per-site substitution models and the supremum of a sequence
//! pair's likelihood over the branch duration.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::exact::{grid_sup_t, GridSpec};

/// Tolerance on the stationary vector summing to one.
const SIMPLEX_TOL: f64 = 1e-12;

/// GTR supremum search: upper end of the time grid in units of expected
/// substitutions per site, number of grid points and golden-section steps.
const GTR_GRID_SPAN: f64 = 1e3;
const GTR_GRID_POINTS: usize = 200;
const GTR_REFINEMENTS: usize = 200;

const DIGITS_AND_LETTERS: &[u8] = b"0123456789ABCDEFGHIJKLMNOPQRSTUVWXYZ";

/// Ordered set of symbols a site may take. Sequences are stored as indices
/// into this set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Alphabet {
    symbols: Vec<u8>,
}

impl Alphabet {
    pub fn binary() -> Self {
        Alphabet {
            symbols: b"01".to_vec(),
        }
    }

    pub fn dna() -> Self {
        Alphabet {
            symbols: b"ACGT".to_vec(),
        }
    }

    /// `01` for two states, `ACGT` for four, otherwise the first `m`
    /// characters of `0-9A-Z`.
    pub fn with_size(m: usize) -> Result<Self> {
        match m {
            2 => Ok(Self::binary()),
            4 => Ok(Self::dna()),
            3..=36 => Ok(Alphabet {
                symbols: DIGITS_AND_LETTERS[..m].to_vec(),
            }),
            _ => Err(Error::model(format!(
                "alphabet size {m} not supported (expected 2..=36)"
            ))),
        }
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    /// Index of a character, case-insensitive.
    pub fn encode(&self, c: u8) -> Option<u8> {
        let c = c.to_ascii_uppercase();
        self.symbols.iter().position(|&s| s == c).map(|i| i as u8)
    }

    pub fn decode(&self, index: u8) -> char {
        self.symbols[index as usize] as char
    }

    /// Encodes a whole string; on failure returns the offending position
    /// and character.
    pub fn encode_str(&self, s: &str) -> std::result::Result<Vec<u8>, (usize, char)> {
        s.bytes()
            .enumerate()
            .map(|(i, c)| self.encode(c).ok_or((i, c as char)))
            .collect()
    }

    pub fn decode_seq(&self, seq: &[u8]) -> String {
        seq.iter().map(|&i| self.decode(i)).collect()
    }
}

/// General time-reversible model with stationary vector `pi` and symmetric
/// exchangeabilities `S`; rate matrix `Q_ab = S_ab * pi_b`.
///
/// Transition probabilities come from the eigendecomposition of the
/// symmetric matrix `Pi^{1/2} Q Pi^{-1/2}`:
/// `P^t(a, b) = sqrt(pi_b / pi_a) * sum_k U_ak U_bk exp(lambda_k t)`.
#[derive(Clone, Debug)]
pub struct Gtr {
    pi: Vec<f64>,
    exchange: Vec<f64>,
    sqrt_pi: Vec<f64>,
    eigenvalues: Vec<f64>,
    eigenvectors: DMatrix<f64>,
    rate: f64,
}

impl Gtr {
    pub fn new(pi: Vec<f64>, exchange: Vec<Vec<f64>>) -> Result<Self> {
        let m = pi.len();
        if m < 2 {
            return Err(Error::model("GTR needs at least two states"));
        }
        if pi.iter().any(|p| !p.is_finite() || *p <= 0.0) {
            return Err(Error::model("stationary frequencies must be positive"));
        }
        let total: f64 = pi.iter().sum();
        if (total - 1.0).abs() > SIMPLEX_TOL {
            return Err(Error::model(format!(
                "stationary frequencies sum to {total}, expected 1"
            )));
        }
        if exchange.len() != m || exchange.iter().any(|row| row.len() != m) {
            return Err(Error::model(format!(
                "exchangeability matrix must be {m}x{m}"
            )));
        }
        let mut flat = vec![0.0; m * m];
        for a in 0..m {
            for b in 0..m {
                let s = exchange[a][b];
                if !s.is_finite() || s < 0.0 {
                    return Err(Error::model(format!(
                        "exchangeability S[{a}][{b}] = {s} must be finite and nonnegative"
                    )));
                }
                if a == b {
                    if s != 0.0 {
                        return Err(Error::model("exchangeability diagonal must be zero"));
                    }
                    continue;
                }
                let t = exchange[b][a];
                if (s - t).abs() > 1e-12 * s.abs().max(t.abs()).max(1.0) {
                    return Err(Error::model(format!(
                        "exchangeability matrix is not symmetric at ({a}, {b})"
                    )));
                }
                // Average so the stored matrix is exactly symmetric.
                flat[a * m + b] = 0.5 * (s + t);
            }
        }
        if !irreducible(m, &flat) {
            return Err(Error::model(
                "exchangeabilities do not connect all states (reducible chain)",
            ));
        }

        let sqrt_pi: Vec<f64> = pi.iter().map(|p| p.sqrt()).collect();
        let mut sym = DMatrix::<f64>::zeros(m, m);
        let mut rate = 0.0;
        for a in 0..m {
            let mut out = 0.0;
            for b in 0..m {
                if a != b {
                    let q = flat[a * m + b] * pi[b];
                    out += q;
                    sym[(a, b)] = flat[a * m + b] * sqrt_pi[a] * sqrt_pi[b];
                }
            }
            sym[(a, a)] = -out;
            rate += pi[a] * out;
        }
        let eig = SymmetricEigen::new(sym);
        // The top eigenvalue is zero in exact arithmetic.
        let eigenvalues = eig.eigenvalues.iter().map(|&l| l.min(0.0)).collect();
        Ok(Gtr {
            pi,
            exchange: flat,
            sqrt_pi,
            eigenvalues,
            eigenvectors: eig.eigenvectors,
            rate,
        })
    }

    pub fn size(&self) -> usize {
        self.pi.len()
    }

    pub fn pi(&self) -> &[f64] {
        &self.pi
    }

    pub fn exchangeability(&self, a: usize, b: usize) -> f64 {
        self.exchange[a * self.size() + b]
    }

    /// Expected substitutions per unit time at stationarity.
    pub fn mean_rate(&self) -> f64 {
        self.rate
    }

    /// Row-major rate matrix `Q`.
    pub fn rate_matrix(&self) -> Vec<f64> {
        let m = self.size();
        let mut q = vec![0.0; m * m];
        for a in 0..m {
            let mut out = 0.0;
            for b in 0..m {
                if a != b {
                    q[a * m + b] = self.exchangeability(a, b) * self.pi[b];
                    out += q[a * m + b];
                }
            }
            q[a * m + a] = -out;
        }
        q
    }

    /// `sum_k U_ak U_bk exp(lambda_k t)`, symmetric in `a` and `b`.
    fn kernel_entry(&self, a: usize, b: usize, decay: &[f64]) -> f64 {
        let u = &self.eigenvectors;
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        (0..self.size())
            .map(|k| u[(lo, k)] * u[(hi, k)] * decay[k])
            .sum()
    }

    fn decay(&self, t: f64) -> Vec<f64> {
        self.eigenvalues.iter().map(|l| (l * t).exp()).collect()
    }

    /// Symmetric kernel `Pi^{1/2} P^t Pi^{-1/2}` as a row-major matrix.
    fn symmetric_kernel(&self, t: f64) -> Vec<f64> {
        let m = self.size();
        let mut out = vec![0.0; m * m];
        if t == 0.0 {
            for a in 0..m {
                out[a * m + a] = 1.0;
            }
            return out;
        }
        if t == f64::INFINITY {
            for a in 0..m {
                for b in 0..m {
                    out[a * m + b] = self.sqrt_pi[a] * self.sqrt_pi[b];
                }
            }
            return out;
        }
        let decay = self.decay(t);
        for a in 0..m {
            for b in a..m {
                let v = self.kernel_entry(a, b, &decay);
                out[a * m + b] = v;
                out[b * m + a] = v;
            }
        }
        out
    }

    fn transition(&self, a: usize, b: usize, t: f64) -> f64 {
        let m = self.size();
        let kernel = self.symmetric_kernel(t)[a * m + b];
        (kernel * self.sqrt_pi[b] / self.sqrt_pi[a]).max(0.0)
    }

    /// `sum_ab C_ab log K_ab(t)` over the symmetric kernel. Equal for a
    /// count matrix and its transpose, bit for bit.
    fn symmetric_loglik(&self, counts: &CountMatrix, t: f64) -> f64 {
        let m = self.size();
        if t == 0.0 {
            return if counts.mismatches() == 0 {
                0.0
            } else {
                f64::NEG_INFINITY
            };
        }
        let kernel = self.symmetric_kernel(t);
        let mut acc = 0.0;
        for a in 0..m {
            for b in a..m {
                let c = if a == b {
                    counts.get(a, a)
                } else {
                    counts.get(a, b) + counts.get(b, a)
                };
                if c == 0 {
                    continue;
                }
                let k = kernel[a * m + b];
                if k <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                acc += c as f64 * k.ln();
            }
        }
        acc
    }

    /// `(1/2) sum_ab C_ab (log pi_b - log pi_a)`, the asymmetric part of
    /// the log-likelihood.
    fn orientation_shift(&self, counts: &CountMatrix) -> f64 {
        let m = self.size();
        let mut shift = 0.0;
        for a in 0..m {
            let col: u64 = (0..m).map(|b| counts.get(b, a)).sum();
            let row: u64 = (0..m).map(|b| counts.get(a, b)).sum();
            shift += (col as f64 - row as f64) * self.pi[a].ln();
        }
        0.5 * shift
    }
}

fn irreducible(m: usize, flat: &[f64]) -> bool {
    let mut seen = vec![false; m];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(a) = stack.pop() {
        for b in 0..m {
            if !seen[b] && flat[a * m + b] > 0.0 {
                seen[b] = true;
                stack.push(b);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Model file: `gtr m`, then the `m` stationary frequencies, then the upper
/// triangle of `S` row by row, with or without the zero diagonal.
impl FromStr for Gtr {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(i, l)| (i + 1, l.trim()))
            .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
        let bad = |line: usize, msg: &str| Error::parse("gtr model", line, msg);

        let (line_no, header) = lines.next().ok_or_else(|| bad(1, "empty model file"))?;
        let mut words = header.split_whitespace();
        if !words.next().is_some_and(|w| w.eq_ignore_ascii_case("gtr")) {
            return Err(bad(line_no, "expected header `gtr m`"));
        }
        let m: usize = words
            .next()
            .and_then(|w| w.parse().ok())
            .ok_or_else(|| bad(line_no, "expected header `gtr m`"))?;

        let mut values: Vec<(usize, f64)> = Vec::new();
        for (line_no, line) in lines {
            for word in line.split_whitespace() {
                let v: f64 = word
                    .parse()
                    .map_err(|_| bad(line_no, &format!("`{word}` is not a number")))?;
                values.push((line_no, v));
            }
        }
        if values.len() < m {
            return Err(bad(line_no, "missing stationary frequencies"));
        }
        let pi: Vec<f64> = values[..m].iter().map(|(_, v)| *v).collect();
        let rest: Vec<f64> = values[m..].iter().map(|(_, v)| *v).collect();
        let with_diagonal = rest.len() == m * (m + 1) / 2;
        if !with_diagonal && rest.len() != m * (m - 1) / 2 {
            let last = values.last().map_or(line_no, |(l, _)| *l);
            return Err(bad(
                last,
                &format!(
                    "expected {} (strict) or {} (with diagonal) exchangeabilities, found {}",
                    m * (m - 1) / 2,
                    m * (m + 1) / 2,
                    rest.len()
                ),
            ));
        }
        let mut exchange = vec![vec![0.0; m]; m];
        let mut it = rest.into_iter();
        for a in 0..m {
            let start = if with_diagonal { a } else { a + 1 };
            for b in start..m {
                let v = it.next().expect("length checked above");
                exchange[a][b] = v;
                exchange[b][a] = v;
            }
        }
        Gtr::new(pi, exchange)
    }
}

/// A reversible per-site substitution process.
#[derive(Clone, Debug)]
pub enum SiteModel {
    /// Two states, symmetric flips at rate `mu`.
    BinarySymmetric { mu: f64 },
    /// Jukes-Cantor: four states, uniform stationary, rate `mu`.
    Jc69 { mu: f64 },
    Gtr(Gtr),
}

impl SiteModel {
    pub fn binary(mu: f64) -> Result<Self> {
        check_rate(mu)?;
        Ok(SiteModel::BinarySymmetric { mu })
    }

    pub fn jc69(mu: f64) -> Result<Self> {
        check_rate(mu)?;
        Ok(SiteModel::Jc69 { mu })
    }

    pub fn gtr(pi: Vec<f64>, exchange: Vec<Vec<f64>>) -> Result<Self> {
        Gtr::new(pi, exchange).map(SiteModel::Gtr)
    }

    pub fn alphabet_size(&self) -> usize {
        match self {
            SiteModel::BinarySymmetric { .. } => 2,
            SiteModel::Jc69 { .. } => 4,
            SiteModel::Gtr(g) => g.size(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            SiteModel::BinarySymmetric { .. } => Alphabet::binary(),
            SiteModel::Jc69 { .. } => Alphabet::dna(),
            SiteModel::Gtr(g) => Alphabet::with_size(g.size()).expect("validated size"),
        }
    }

    pub fn stationary(&self) -> Vec<f64> {
        match self {
            SiteModel::BinarySymmetric { .. } => vec![0.5; 2],
            SiteModel::Jc69 { .. } => vec![0.25; 4],
            SiteModel::Gtr(g) => g.pi.clone(),
        }
    }

    /// `P^t(a, b)`. `t = +inf` gives the stationary limit.
    pub fn transition_prob(&self, a: usize, b: usize, t: f64) -> Result<f64> {
        let m = self.alphabet_size();
        if a >= m || b >= m {
            return Err(Error::domain(format!(
                "symbol index out of range for a {m}-state model: ({a}, {b})"
            )));
        }
        check_time(t)?;
        Ok(match self {
            SiteModel::BinarySymmetric { mu } => {
                let z = (-2.0 * mu * t).exp();
                if a == b {
                    0.5 + 0.5 * z
                } else {
                    0.5 - 0.5 * z
                }
            }
            SiteModel::Jc69 { mu } => {
                let z = (-mu * t).exp();
                if a == b {
                    0.25 + 0.75 * z
                } else {
                    0.25 - 0.25 * z
                }
            }
            SiteModel::Gtr(g) => g.transition(a, b, t),
        })
    }

    /// Row-major `P^t`.
    pub fn transition_matrix(&self, t: f64) -> Result<Vec<f64>> {
        check_time(t)?;
        let m = self.alphabet_size();
        if let SiteModel::Gtr(g) = self {
            let kernel = g.symmetric_kernel(t);
            return Ok((0..m * m)
                .map(|i| {
                    let (a, b) = (i / m, i % m);
                    (kernel[i] * g.sqrt_pi[b] / g.sqrt_pi[a]).max(0.0)
                })
                .collect());
        }
        (0..m * m)
            .map(|i| self.transition_prob(i / m, i % m, t))
            .collect()
    }

    /// `sum_ab C_ab log P^t(a, b)`, with `0 log 0 = 0`.
    pub fn seq_loglik(&self, counts: &CountMatrix, t: f64) -> Result<f64> {
        self.check_counts(counts)?;
        check_time(t)?;
        Ok(match self {
            SiteModel::Gtr(g) => g.symmetric_loglik(counts, t) + g.orientation_shift(counts),
            _ => {
                let d = counts.mismatches() as f64;
                let same = counts.total() as f64 - d;
                let p_same = self.transition_prob(0, 0, t)?;
                let p_diff = self.transition_prob(0, 1, t)?;
                xlogy(same, p_same) + xlogy(d, p_diff)
            }
        })
    }

    /// Supremum over `t >= 0` of the pair likelihood, returned as a cost
    /// `-log sup`. When the supremum is only approached as `t -> inf` the
    /// returned `t_star` is `f64::INFINITY`.
    pub fn sup_seq_loglik(&self, counts: &CountMatrix) -> Result<SeqSupremum> {
        self.check_counts(counts)?;
        let n = counts.total() as f64;
        let d = counts.mismatches() as f64;
        if d == 0.0 {
            return Ok(SeqSupremum {
                t_star: 0.0,
                cost: 0.0,
            });
        }
        match self {
            SiteModel::Jc69 { mu } => {
                // Stationary point of (n-d) log(1/4 + 3z/4) + d log(1/4 - z/4)
                // in z = exp(-mu t): z* = 1 - 4d / (3n).
                let z = 1.0 - 4.0 * d / (3.0 * n);
                if z <= 0.0 {
                    return Ok(SeqSupremum {
                        t_star: f64::INFINITY,
                        cost: n * 4f64.ln(),
                    });
                }
                let cost = -(xlogy(n - d, 0.25 + 0.75 * z) + xlogy(d, 0.25 - 0.25 * z));
                Ok(SeqSupremum {
                    t_star: -z.ln() / mu,
                    cost,
                })
            }
            SiteModel::BinarySymmetric { mu } => {
                let p = d / n;
                if p >= 0.5 {
                    return Ok(SeqSupremum {
                        t_star: f64::INFINITY,
                        cost: n * 2f64.ln(),
                    });
                }
                let cost = -(xlogy(n - d, 1.0 - p) + xlogy(d, p));
                Ok(SeqSupremum {
                    t_star: -(1.0 - 2.0 * p).ln() / (2.0 * mu),
                    cost,
                })
            }
            SiteModel::Gtr(g) => {
                let span = GTR_GRID_SPAN / g.rate;
                let grid = grid_sup_t(
                    |t| g.symmetric_loglik(counts, t),
                    GridSpec::new(0.0, span, GTR_GRID_POINTS, GTR_REFINEMENTS),
                )?;
                let limit = g.symmetric_loglik(counts, f64::INFINITY);
                let (t_star, best) = if limit >= grid.value {
                    (f64::INFINITY, limit)
                } else {
                    (grid.t_star, grid.value)
                };
                let cost = -(best + g.orientation_shift(counts));
                if !cost.is_finite() {
                    return Err(Error::Numeric(format!(
                        "GTR supremum is not finite (cost {cost})"
                    )));
                }
                Ok(SeqSupremum {
                    t_star,
                    cost: cost.max(0.0),
                })
            }
        }
    }

    /// Largest log-likelihood over integer durations `t >= t0` (including
    /// the `t -> inf` limit), with the maximizing duration.
    pub fn sup_loglik_integer_from(&self, counts: &CountMatrix, t0: u64) -> Result<(f64, f64)> {
        let t0f = t0 as f64;
        let continuous = match self {
            SiteModel::Gtr(g) => {
                let span = GTR_GRID_SPAN / g.rate;
                let grid = grid_sup_t(
                    |t| g.symmetric_loglik(counts, t),
                    GridSpec::new(t0f, t0f + span, GTR_GRID_POINTS, GTR_REFINEMENTS),
                )?;
                grid.t_star
            }
            // Closed-form models are unimodal in t.
            _ => self.sup_seq_loglik(counts)?.t_star,
        };
        let mut candidates = vec![t0f, f64::INFINITY];
        if continuous.is_finite() && continuous > t0f {
            candidates.push(continuous.floor().max(t0f));
            candidates.push(continuous.ceil());
        }
        let mut best = (f64::NEG_INFINITY, t0f);
        for t in candidates {
            let ll = self.seq_loglik(counts, t)?;
            if ll > best.0 {
                best = (ll, t);
            }
        }
        Ok(best)
    }

    /// `-sum_i log pi(x_i)`.
    pub fn node_cost(&self, seq: &[u8]) -> Result<f64> {
        let m = self.alphabet_size();
        let pi = self.stationary();
        let logs: Vec<f64> = pi.iter().map(|p| p.ln()).collect();
        let mut counts = vec![0u64; m];
        for &s in seq {
            if s as usize >= m {
                return Err(Error::domain(format!(
                    "symbol index {s} out of range for a {m}-state model"
                )));
            }
            counts[s as usize] += 1;
        }
        Ok(-counts
            .iter()
            .zip(&logs)
            .map(|(&c, l)| c as f64 * l)
            .sum::<f64>())
    }

    fn check_counts(&self, counts: &CountMatrix) -> Result<()> {
        if counts.size() != self.alphabet_size() {
            return Err(Error::domain(format!(
                "count matrix is {0}x{0} but the model has {1} states",
                counts.size(),
                self.alphabet_size()
            )));
        }
        if counts.total() == 0 {
            return Err(Error::domain("empty count matrix"));
        }
        Ok(())
    }
}

impl fmt::Display for SiteModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SiteModel::BinarySymmetric { mu } => write!(f, "binary(mu={mu})"),
            SiteModel::Jc69 { mu } => write!(f, "jc69(mu={mu})"),
            SiteModel::Gtr(g) => write!(f, "gtr(m={})", g.size()),
        }
    }
}

fn check_rate(mu: f64) -> Result<()> {
    if mu.is_finite() && mu > 0.0 {
        Ok(())
    } else {
        Err(Error::model(format!("rate must be positive, got {mu}")))
    }
}

fn check_time(t: f64) -> Result<()> {
    if t.is_nan() || t < 0.0 {
        Err(Error::domain(format!("duration must be >= 0, got {t}")))
    } else {
        Ok(())
    }
}

fn xlogy(x: f64, y: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x * y.ln()
    }
}

/// Site-pattern counts of an aligned sequence pair: entry `(a, b)` is the
/// number of sites showing `a` in the first sequence and `b` in the second.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CountMatrix {
    m: usize,
    counts: Vec<u64>,
}

impl CountMatrix {
    pub fn zeros(m: usize) -> Self {
        CountMatrix {
            m,
            counts: vec![0; m * m],
        }
    }

    pub fn from_sequences(x: &[u8], y: &[u8], m: usize) -> Result<Self> {
        if x.len() != y.len() {
            return Err(Error::domain(format!(
                "sequence lengths differ: {} vs {}",
                x.len(),
                y.len()
            )));
        }
        let mut out = Self::zeros(m);
        for (&a, &b) in x.iter().zip(y) {
            if a as usize >= m || b as usize >= m {
                return Err(Error::domain(format!(
                    "symbol out of range for a {m}-state model"
                )));
            }
            out.counts[a as usize * m + b as usize] += 1;
        }
        Ok(out)
    }

    /// Counts with `d` mismatches out of `n` sites for symmetric models
    /// where only `(n, d)` matters; mismatches are placed at `(0, 1)`.
    pub fn from_hamming(m: usize, n: u64, d: u64) -> Self {
        assert!(d <= n && m >= 2);
        let mut out = Self::zeros(m);
        out.counts[0] = n - d;
        out.counts[1] = d;
        out
    }

    pub fn size(&self) -> usize {
        self.m
    }

    pub fn get(&self, a: usize, b: usize) -> u64 {
        self.counts[a * self.m + b]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Off-diagonal total, the Hamming distance.
    pub fn mismatches(&self) -> u64 {
        self.total() - (0..self.m).map(|a| self.get(a, a)).sum::<u64>()
    }

    pub fn transpose(&self) -> Self {
        let m = self.m;
        CountMatrix {
            m,
            counts: (0..m * m).map(|i| self.get(i % m, i / m)).collect(),
        }
    }
}

/// Supremum of a pair likelihood over the branch duration.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SeqSupremum {
    /// Maximizing duration; `f64::INFINITY` when the supremum is the
    /// stationary limit.
    pub t_star: f64,
    /// `-log sup_t P^t`, natural log.
    pub cost: f64,
}
