//! Likelihood-derived costs for time-reversible Markov evolution models and
//! minimum-spanning-tree inference of ancestral maximum-likelihood and
//! phylogeography trees.
//!
//! The pipeline is:
//!
//! 1. per-site models ([`substitution`]) and an optional random-walk
//!    location model ([`geo_rw`]) give node costs `-log pi(v)` and edge costs
//!    `-log sup_t P^t(u, v)`;
//! 2. [`cost`] assembles these into the complete terminal graph with
//!    weights `w(u, v) = phi(u, v) - phi(v)`;
//! 3. [`mst`] runs Kruskal on that graph, roots the tree and evaluates it.
//!
//! [`exact`] holds brute-force references (grid suprema, exact Steiner
//! optimum over the full label space, walk suprema by matrix powers) for
//! checking all of the above on small instances, and [`synth`] generates
//! instances from a known tree.

pub mod cost;
pub mod error;
pub mod exact;
pub mod geo_rw;
pub mod io;
pub mod mst;
pub mod pipeline;
pub mod substitution;
pub mod synth;

pub use cost::{build_cost_matrix, CostMatrix, CostMode, CostModel, EdgeCost, GeoCoordinate, LabelCosts, Sample};
pub use error::{Error, Result};
pub use geo_rw::{GeoBounds, GeoGraph, RandomWalk, SpectralInfo};
pub use mst::{kruskal_mst, root_tree, tree_cost_directed, tree_cost_symmetric, PhyloTree, SpanningTree};
pub use substitution::{Alphabet, CountMatrix, SeqSupremum, SiteModel};
