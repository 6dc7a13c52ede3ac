#![allow(dead_code)]

use nalgebra::DMatrix;
use phylogeo_core::geo_rw::RandomWalk;
use phylogeo_core::{GeoGraph, Sample, SiteModel};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn triangle() -> GeoGraph {
    GeoGraph::from_edges([(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)]).unwrap()
}

/// Connected graph on 3..=max_nodes nodes, every node of degree >= 2,
/// weights in [1, 2], rejected until the walk mixes.
pub fn random_graph(r: &mut ChaCha8Rng, max_nodes: usize) -> RandomWalk {
    loop {
        let n = r.gen_range(3..=max_nodes);
        let mut order: Vec<usize> = (0..n).collect();
        order.shuffle(r);
        let mut edges = Vec::new();
        let mut seen = std::collections::BTreeSet::new();
        let mut add = |u: usize, v: usize, edges: &mut Vec<(usize, usize, f64)>, r: &mut ChaCha8Rng| {
            if u != v && seen.insert((u.min(v), u.max(v))) {
                edges.push((u, v, r.gen_range(1.0..=2.0)));
            }
        };
        for i in 1..n {
            let j = r.gen_range(0..i);
            add(order[i], order[j], &mut edges, r);
        }
        for _ in 0..r.gen_range(0..=n) {
            let (u, v) = (r.gen_range(0..n), r.gen_range(0..n));
            add(u, v, &mut edges, r);
        }
        // Distinct-neighbor degree >= 2 keeps every one-step probability
        // below one.
        for u in 0..n {
            while edges.iter().filter(|e| e.0 == u || e.1 == u).count() < 2 {
                let v = r.gen_range(0..n);
                add(u, v, &mut edges, r);
            }
        }
        if let Ok(w) = RandomWalk::new(GeoGraph::new(n, edges).unwrap()) {
            return w;
        }
    }
}

/// GTR model on 4 states with random frequencies and exchangeabilities.
pub fn random_gtr(r: &mut ChaCha8Rng) -> SiteModel {
    let raw: Vec<f64> = (0..4).map(|_| r.gen_range(0.2..1.0)).collect();
    let total: f64 = raw.iter().sum();
    let mut pi: Vec<f64> = raw.iter().map(|x| x / total).collect();
    let head: f64 = pi[..3].iter().sum();
    pi[3] = 1.0 - head;
    let mut s = vec![vec![0.0; 4]; 4];
    for a in 0..4 {
        for b in a + 1..4 {
            let x = r.gen_range(0.1..3.0);
            s[a][b] = x;
            s[b][a] = x;
        }
    }
    SiteModel::gtr(pi, s).unwrap()
}

pub fn random_seq(r: &mut ChaCha8Rng, m: usize, n: usize) -> Vec<u8> {
    (0..n).map(|_| r.gen_range(0..m) as u8).collect()
}

/// Mutates a copy of `seq` at each site with probability `p`.
pub fn mutate(r: &mut ChaCha8Rng, seq: &[u8], m: usize, p: f64) -> Vec<u8> {
    seq.iter()
        .map(|&a| if r.gen_bool(p) { r.gen_range(0..m) as u8 } else { a })
        .collect()
}

/// Labels clustered around a few centers so that small distances occur.
pub fn random_samples(
    r: &mut ChaCha8Rng,
    k: usize,
    m: usize,
    n: usize,
    locations: Option<usize>,
) -> Vec<Sample> {
    let base = random_seq(r, m, n);
    (0..k)
        .map(|i| {
            let p = r.gen_range(0.0..0.8);
            let seq = mutate(r, &base, m, p);
            let loc = locations.map(|l| r.gen_range(0..l));
            Sample::new(format!("s{i:02}"), seq, loc)
        })
        .collect()
}

/// Random parent map on `k` nodes: node `i > 0` hangs below a random
/// earlier node, then labels are permuted.
pub fn random_parents(r: &mut ChaCha8Rng, k: usize) -> Vec<Option<usize>> {
    let mut perm: Vec<usize> = (0..k).collect();
    perm.shuffle(r);
    let mut parent = vec![None; k];
    for i in 1..k {
        let j = r.gen_range(0..i);
        parent[perm[i]] = Some(perm[j]);
    }
    parent
}

/// `exp(Q t)` by nalgebra's matrix exponential.
pub fn expm(q: &[f64], m: usize, t: f64) -> DMatrix<f64> {
    DMatrix::from_row_slice(m, m, q).scale(t).exp()
}
