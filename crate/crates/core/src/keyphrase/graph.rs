//! Candidate graph construction, positional weight adjustment, and the
//! damped random-walk ranking.

use std::collections::BTreeMap;

use super::{Candidate, TopicCluster};

/// Damping factor of the random walk.
pub const DAMPING_DEFAULT: f64 = 0.85;
/// Convergence threshold on the max per-node score delta.
pub const CONVERGENCE_TOL: f64 = 1e-6;
/// Hard cap on power iterations.
pub const MAX_ITERATIONS: usize = 100;

/// Directed weighted graph over candidates. Complete multipartite by
/// construction: edges connect candidates of different topic clusters only.
#[derive(Debug, Clone, PartialEq)]
pub struct CandidateGraph {
    cluster_of: Vec<usize>,
    /// `out[i][j]` = weight of the directed edge i → j.
    out: Vec<BTreeMap<usize, f64>>,
}

impl CandidateGraph {
    pub fn node_count(&self) -> usize {
        self.out.len()
    }

    pub fn cluster_of(&self, node: usize) -> usize {
        self.cluster_of[node]
    }

    /// Weight of i → j; absent edges read as 0.
    pub fn weight(&self, i: usize, j: usize) -> f64 {
        self.out[i].get(&j).copied().unwrap_or(0.0)
    }

    pub fn out_weight_sum(&self, i: usize) -> f64 {
        self.out[i].values().sum()
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.out
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(&j, &w)| (i, j, w)))
    }

    /// No edge may connect two members of the same cluster.
    pub fn is_multipartite(&self) -> bool {
        self.edges().all(|(i, j, _)| self.cluster_of[i] != self.cluster_of[j])
    }

    fn add_weight(&mut self, i: usize, j: usize, w: f64) {
        *self.out[i].entry(j).or_insert(0.0) += w;
    }
}

/// Connect every pair of candidates from different clusters with reciprocal
/// edges weighted by the summed reciprocal distance of their occurrences:
/// w(i, j) = Σ over position pairs (p, q) of 1 / |p − q|.
///
/// Panics if two distinct candidates claim the same token offset; spans
/// never overlap, so equal positions mean the caller fed a broken partition.
pub fn build_graph(clusters: &[TopicCluster], candidates: &[Candidate]) -> CandidateGraph {
    let mut cluster_of = vec![usize::MAX; candidates.len()];
    for (ci, cluster) in clusters.iter().enumerate() {
        for &m in &cluster.members {
            assert!(cluster_of[m] == usize::MAX, "candidate {m} in two clusters");
            cluster_of[m] = ci;
        }
    }
    assert!(
        cluster_of.iter().all(|&c| c != usize::MAX),
        "clusters do not cover all candidates"
    );

    let mut graph = CandidateGraph { cluster_of, out: vec![BTreeMap::new(); candidates.len()] };
    for i in 0..candidates.len() {
        for j in (i + 1)..candidates.len() {
            if graph.cluster_of[i] == graph.cluster_of[j] {
                continue;
            }
            let mut w = 0.0;
            for &p in &candidates[i].positions {
                for &q in &candidates[j].positions {
                    assert_ne!(p, q, "distinct candidates share token offset {p}");
                    w += 1.0 / (p.abs_diff(q) as f64);
                }
            }
            graph.add_weight(i, j, w);
            graph.add_weight(j, i, w);
        }
    }
    graph
}

/// Positional promotion: within each multi-member cluster, the
/// first-occurring candidate c collects an incoming boost from every outside
/// node j of `alpha · e^(1/(1+offset(c))) · Σ_k w(k → j)`, where k ranges
/// over the other members of c's cluster and offset(c) is c's 0-based first
/// token position. Boosts are computed from the input graph (not the
/// partially adjusted one), so the result is order-independent.
pub fn adjust_weights(
    graph: &CandidateGraph,
    clusters: &[TopicCluster],
    candidates: &[Candidate],
    alpha: f64,
) -> CandidateGraph {
    let mut adjusted = graph.clone();
    if alpha == 0.0 {
        return adjusted;
    }
    for cluster in clusters {
        if cluster.members.len() < 2 {
            continue;
        }
        let &first = cluster
            .members
            .iter()
            .min_by_key(|&&m| (candidates[m].positions[0], m))
            .expect("non-empty cluster");
        let offset = candidates[first].positions[0];
        let factor = alpha * (1.0 / (1.0 + offset as f64)).exp();
        for j in 0..graph.node_count() {
            if cluster.members.contains(&j) {
                continue;
            }
            let booster: f64 = cluster
                .members
                .iter()
                .filter(|&&k| k != first)
                .map(|&k| graph.weight(k, j))
                .sum();
            if booster > 0.0 {
                adjusted.add_weight(j, first, factor * booster);
            }
        }
    }
    adjusted
}

/// Stationary scores of the damped random walk (weighted PageRank). Mass
/// from dangling nodes is redistributed uniformly, so the score vector sums
/// to 1. Runs until the max per-node delta drops below [`CONVERGENCE_TOL`]
/// or [`MAX_ITERATIONS`] is hit.
pub fn rank_scores(graph: &CandidateGraph, damping: f64) -> Vec<f64> {
    let n = graph.node_count();
    if n == 0 {
        return Vec::new();
    }
    let uniform = 1.0 / n as f64;
    let out_sums: Vec<f64> = (0..n).map(|i| graph.out_weight_sum(i)).collect();
    let mut scores = vec![uniform; n];

    for _ in 0..MAX_ITERATIONS {
        let mut next = vec![0.0; n];
        let mut dangling = 0.0;
        for i in 0..n {
            if out_sums[i] == 0.0 {
                dangling += scores[i];
                continue;
            }
            let share = scores[i] / out_sums[i];
            for (&j, &w) in &graph.out[i] {
                next[j] += share * w;
            }
        }
        let base = (1.0 - damping) * uniform + damping * dangling * uniform;
        let mut delta: f64 = 0.0;
        for j in 0..n {
            next[j] = base + damping * next[j];
            delta = delta.max((next[j] - scores[j]).abs());
        }
        scores = next;
        if delta < CONVERGENCE_TOL {
            break;
        }
    }
    scores
}
