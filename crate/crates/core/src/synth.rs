//! Instances generated from a known tree: random binary topology, sequences
//! evolved site by site, locations moved by random-walk steps.

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::cost::Sample;
use crate::error::{Error, Result};
use crate::geo_rw::RandomWalk;
use crate::substitution::SiteModel;

const TOPOLOGY_STREAM: u64 = 0;
const DURATION_STREAM: u64 = 1;
const SEQUENCE_STREAM: u64 = 2;
const LOCATION_STREAM: u64 = 3;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruthNode {
    pub id: String,
    pub parent: Option<usize>,
    /// Duration of the edge from the parent; zero at the root.
    pub duration: f64,
    /// Walk steps taken along that edge, `ceil(duration)`.
    pub steps: u64,
    pub sequence: String,
    pub location: Option<usize>,
}

/// Generating tree. Node 0..k are the leaves, the root is last.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TruthTree {
    pub model: String,
    pub seed: u64,
    pub root: usize,
    pub nodes: Vec<TruthNode>,
}

impl TruthTree {
    pub fn leaf_count(&self) -> usize {
        self.nodes.len().div_ceil(2)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }
}

#[derive(Clone, Debug)]
pub struct Simulation {
    pub truth: TruthTree,
    /// Labels of every node, leaves first.
    pub labels: Vec<Sample>,
}

impl Simulation {
    pub fn leaves(&self) -> &[Sample] {
        &self.labels[..self.truth.leaf_count()]
    }
}

fn stream(seed: u64, id: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(id);
    rng
}

fn leaf_id(i: usize, k: usize) -> String {
    let width = k.to_string().len().max(2);
    format!("t{:0width$}", i + 1)
}

/// Simulates `k` leaves with sequences of length `n`. Edge durations are
/// uniform on `durations`; the root label is drawn from the stationary
/// distributions.
pub fn simulate(
    k: usize,
    n: usize,
    model: &SiteModel,
    geo: Option<&RandomWalk>,
    durations: (f64, f64),
    seed: u64,
) -> Result<Simulation> {
    if k < 2 || n < 1 {
        return Err(Error::domain(format!("need k >= 2 and n >= 1, got k = {k}, n = {n}")));
    }
    let (lo, hi) = durations;
    if !(lo >= 0.0 && lo <= hi && hi.is_finite()) {
        return Err(Error::domain(format!("invalid duration range [{lo}, {hi}]")));
    }

    // Coalescent-style merging of uniformly chosen pairs.
    let total = 2 * k - 1;
    let mut parent = vec![None; total];
    let mut active: Vec<usize> = (0..k).collect();
    let mut rng = stream(seed, TOPOLOGY_STREAM);
    for next in k..total {
        let a = active.swap_remove(rng.gen_range(0..active.len()));
        let b = active.swap_remove(rng.gen_range(0..active.len()));
        parent[a] = Some(next);
        parent[b] = Some(next);
        active.push(next);
    }
    let root = total - 1;

    let mut rng = stream(seed, DURATION_STREAM);
    let duration: Vec<f64> = (0..total)
        .map(|v| {
            if v == root {
                0.0
            } else if lo == hi {
                lo
            } else {
                rng.gen_range(lo..hi)
            }
        })
        .collect();

    // Parents always have larger indices, so a descending sweep visits
    // every parent before its children.
    let m = model.alphabet_size();
    let mut seqs = vec![Vec::new(); total];
    let mut rng = stream(seed, SEQUENCE_STREAM);
    let root_dist = weighted(&model.stationary())?;
    seqs[root] = (0..n).map(|_| root_dist.sample(&mut rng) as u8).collect();
    for v in (0..root).rev() {
        let p = parent[v].expect("non-root has a parent");
        let kernel = model.transition_matrix(duration[v])?;
        let rows = (0..m)
            .map(|a| weighted(&kernel[a * m..(a + 1) * m]))
            .collect::<Result<Vec<_>>>()?;
        let child: Vec<u8> = seqs[p]
            .iter()
            .map(|&a| rows[a as usize].sample(&mut rng) as u8)
            .collect();
        seqs[v] = child;
    }

    let steps: Vec<u64> = duration.iter().map(|t| t.ceil() as u64).collect();
    let mut locs = vec![None; total];
    if let Some(walk) = geo {
        let mut rng = stream(seed, LOCATION_STREAM);
        let graph = walk.graph();
        let moves = (0..graph.node_count())
            .map(|u| {
                let w: Vec<f64> = graph.neighbors(u).iter().map(|e| e.1).collect();
                weighted(&w)
            })
            .collect::<Result<Vec<_>>>()?;
        locs[root] = Some(weighted(walk.pi())?.sample(&mut rng));
        for v in (0..root).rev() {
            let mut x = locs[parent[v].unwrap()].unwrap();
            for _ in 0..steps[v] {
                x = graph.neighbors(x)[moves[x].sample(&mut rng)].0;
            }
            locs[v] = Some(x);
        }
    }

    let alphabet = model.alphabet();
    let ids: Vec<String> = (0..total)
        .map(|v| if v < k { leaf_id(v, k) } else { format!("a{}", v - k + 1) })
        .collect();
    let nodes = (0..total)
        .map(|v| TruthNode {
            id: ids[v].clone(),
            parent: parent[v],
            duration: duration[v],
            steps: if v == root { 0 } else { steps[v] },
            sequence: alphabet.decode_seq(&seqs[v]),
            location: locs[v],
        })
        .collect();
    let labels = (0..total)
        .map(|v| Sample::new(ids[v].clone(), seqs[v].clone(), locs[v]))
        .collect();
    Ok(Simulation {
        truth: TruthTree {
            model: model.to_string(),
            seed,
            root,
            nodes,
        },
        labels,
    })
}

fn weighted(w: &[f64]) -> Result<WeightedIndex<f64>> {
    // Round-off can leave tiny negative kernel entries.
    let clean: Vec<f64> = w.iter().map(|&x| x.max(0.0)).collect();
    WeightedIndex::new(clean).map_err(|e| Error::Numeric(format!("sampling weights: {e}")))
}
