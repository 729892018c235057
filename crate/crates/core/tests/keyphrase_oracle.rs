//! Randomized cross-check of the graph ranking against an independent
//! reference implementation.
//!
//! The production code accumulates scores sparsely with explicit dangling
//! mass bookkeeping; the oracle here builds the dense row-stochastic
//! transition matrix (dangling rows replaced by the uniform row) and power-
//! iterates it to near machine precision. The production iteration stops
//! when the max per-node step delta drops below 1e-6; for damping d the
//! distance to the fixed point at that moment is at most delta·d/(1−d) ≈
//! 5.7e-6, so the two must agree within 1e-5.

use rand::prelude::*;
use rand_chacha::ChaCha8Rng;

use counterfact::keyphrase::{
    adjust_weights, build_graph, rank_scores, Candidate, CandidateGraph, TopicCluster,
    DAMPING_DEFAULT,
};
use counterfact::backends::PosTag;

/// Dense reference PageRank, deliberately written in the most literal way.
fn oracle_scores(graph: &CandidateGraph, damping: f64) -> Vec<f64> {
    let n = graph.node_count();
    let uniform = 1.0 / n as f64;
    let mut transition = vec![vec![0.0f64; n]; n];
    for i in 0..n {
        let row_sum: f64 = (0..n).map(|j| graph.weight(i, j)).sum();
        if row_sum == 0.0 {
            for j in 0..n {
                transition[i][j] = uniform;
            }
        } else {
            for j in 0..n {
                transition[i][j] = graph.weight(i, j) / row_sum;
            }
        }
    }
    let mut scores = vec![uniform; n];
    for _ in 0..200_000 {
        let mut next = vec![(1.0 - damping) * uniform; n];
        for i in 0..n {
            for j in 0..n {
                next[j] += damping * scores[i] * transition[i][j];
            }
        }
        let delta = scores
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        scores = next;
        if delta < 1e-15 {
            break;
        }
    }
    scores
}

/// Random candidate set: distinct positions, random single-occurrence
/// candidates, random partition into clusters.
fn random_problem(rng: &mut ChaCha8Rng) -> (Vec<TopicCluster>, Vec<Candidate>) {
    let n = rng.random_range(2..=5usize);
    let mut positions: Vec<usize> = rand::seq::index::sample(rng, 60, n).into_iter().collect();
    positions.sort_unstable();
    let candidates: Vec<Candidate> = positions
        .iter()
        .enumerate()
        .map(|(i, &p)| Candidate {
            surface: format!("cand{i}"),
            stems: vec![format!("stem{i}")],
            positions: vec![p],
            pos_tags: vec![PosTag::Noun],
        })
        .collect();

    let cluster_count = rng.random_range(1..=n);
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); cluster_count];
    for i in 0..n {
        // every cluster gets at least one member by seeding round-robin first
        if i < cluster_count {
            members[i].push(i);
        } else {
            members[rng.random_range(0..cluster_count)].push(i);
        }
    }
    let clusters = members
        .into_iter()
        .map(|m| {
            let first_offset = m.iter().map(|&i| candidates[i].positions[0]).min().unwrap();
            TopicCluster { members: m, first_offset }
        })
        .collect();
    (clusters, candidates)
}

#[test]
fn rank_scores_match_dense_oracle_on_random_graphs() {
    let mut rng = ChaCha8Rng::seed_from_u64(0xC0FFEE);
    for trial in 0..100 {
        let (clusters, candidates) = random_problem(&mut rng);
        let graph = build_graph(&clusters, &candidates);
        let alpha = [0.0, 0.5, 1.0, 1.3][trial % 4];
        let adjusted = adjust_weights(&graph, &clusters, &candidates, alpha);

        let got = rank_scores(&adjusted, DAMPING_DEFAULT);
        let want = oracle_scores(&adjusted, DAMPING_DEFAULT);
        assert_eq!(got.len(), want.len());
        for (i, (g, w)) in got.iter().zip(&want).enumerate() {
            assert!(
                (g - w).abs() <= 1e-5,
                "trial {trial} node {i}: got {g}, oracle {w} (graph {graph:?})"
            );
        }

        let sum: f64 = got.iter().sum();
        assert!((sum - 1.0).abs() < 1e-9, "trial {trial}: scores sum to {sum}");
    }
}

#[test]
fn built_graphs_stay_multipartite_after_adjustment() {
    let mut rng = ChaCha8Rng::seed_from_u64(42);
    for _ in 0..100 {
        let (clusters, candidates) = random_problem(&mut rng);
        let graph = build_graph(&clusters, &candidates);
        assert!(graph.is_multipartite());
        let adjusted = adjust_weights(&graph, &clusters, &candidates, 1.0);
        assert!(adjusted.is_multipartite(), "boost must never create intra-cluster edges");
        // adjustment only ever adds weight
        for (i, j, w) in graph.edges() {
            assert!(adjusted.weight(i, j) >= w - 1e-15);
        }
    }
}

#[test]
fn dangling_graphs_rank_uniformly() {
    // a single cluster yields no edges at all: every node is dangling and
    // must receive the same score
    let candidates: Vec<Candidate> = (0..4)
        .map(|i| Candidate {
            surface: format!("c{i}"),
            stems: vec!["shared".to_string()],
            positions: vec![i * 3],
            pos_tags: vec![PosTag::Noun],
        })
        .collect();
    let clusters = vec![TopicCluster { members: vec![0, 1, 2, 3], first_offset: 0 }];
    let graph = build_graph(&clusters, &candidates);
    assert_eq!(graph.edges().count(), 0);
    let scores = rank_scores(&graph, DAMPING_DEFAULT);
    for s in &scores {
        assert!((s - 0.25).abs() < 1e-12);
    }
}
