//! Graph-based keyword extraction from a claim.
//!
//! Pipeline: POS-whitelisted candidate spans → topic clustering on stem-set
//! overlap → complete multipartite candidate graph weighted by reciprocal
//! token distance → positional boost of each cluster's first occurrence →
//! damped random-walk ranking. At most ten keywords come out, ordered by
//! score.

mod graph;

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

pub use graph::{
    adjust_weights, build_graph, rank_scores, CandidateGraph, CONVERGENCE_TOL, DAMPING_DEFAULT,
    MAX_ITERATIONS,
};

use crate::backends::{Annotation, PosTag};
use crate::stem::stem;

/// A candidate keyphrase: a maximal span of whitelisted tokens, possibly
/// occurring several times (occurrences merged by stemmed form).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Candidate {
    /// Surface form of the first occurrence.
    pub surface: String,
    /// Per-token stems, in span order.
    pub stems: Vec<String>,
    /// Token offset of each occurrence's first token, ascending.
    pub positions: Vec<usize>,
    /// POS tags of the first occurrence.
    pub pos_tags: Vec<PosTag>,
}

impl Candidate {
    fn stem_set(&self) -> BTreeSet<&str> {
        self.stems.iter().map(String::as_str).collect()
    }
}

/// One topic: candidate indices grouped by stem-set similarity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopicCluster {
    /// Candidate indices, ascending.
    pub members: Vec<usize>,
    /// Earliest first-token offset over the members.
    pub first_offset: usize,
}

/// Tunables, all exposed in config files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct KeyphraseConfig {
    pub pos_whitelist: BTreeSet<PosTag>,
    pub alpha: f64,
    pub threshold: f64,
    pub limit: usize,
    pub damping: f64,
}

impl Default for KeyphraseConfig {
    fn default() -> Self {
        KeyphraseConfig {
            pos_whitelist: [PosTag::Propn, PosTag::Noun, PosTag::Adj, PosTag::Det, PosTag::Num, PosTag::Adv]
                .into_iter()
                .collect(),
            alpha: 1.0,
            threshold: 0.75,
            limit: 10,
            damping: DAMPING_DEFAULT,
        }
    }
}

/// Select maximal contiguous spans whose POS tags all lie in the whitelist.
/// Spans never cross sentence boundaries. Occurrences with identical stem
/// sequences are merged into one candidate with accumulated positions.
pub fn extract_candidates(annotation: &Annotation, whitelist: &BTreeSet<PosTag>) -> Vec<Candidate> {
    let mut out: Vec<Candidate> = Vec::new();
    let mut by_stems: BTreeMap<Vec<String>, usize> = BTreeMap::new();
    let mut offset = 0usize;

    for sentence in &annotation.sentences {
        let toks = &sentence.tokens;
        let mut i = 0;
        while i < toks.len() {
            if !whitelist.contains(&toks[i].pos) {
                i += 1;
                continue;
            }
            let start = i;
            while i < toks.len() && whitelist.contains(&toks[i].pos) {
                i += 1;
            }
            let span = &toks[start..i];
            let stems: Vec<String> = span.iter().map(|t| stem(&t.text)).collect();
            let position = offset + start;
            match by_stems.get(&stems) {
                Some(&idx) => out[idx].positions.push(position),
                None => {
                    by_stems.insert(stems.clone(), out.len());
                    out.push(Candidate {
                        surface: span.iter().map(|t| t.text.as_str()).collect::<Vec<_>>().join(" "),
                        stems,
                        positions: vec![position],
                        pos_tags: span.iter().map(|t| t.pos).collect(),
                    });
                }
            }
        }
        offset += toks.len();
    }
    out
}

fn jaccard(a: &BTreeSet<&str>, b: &BTreeSet<&str>) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 1.0;
    }
    let inter = a.intersection(b).count() as f64;
    let union = a.union(b).count() as f64;
    inter / union
}

/// Hierarchical agglomerative clustering with average linkage over stem-set
/// Jaccard similarity. Pairs keep merging while the best average
/// inter-cluster similarity stays at or above `threshold`. The result is a
/// partition ordered by first offset.
pub fn cluster_topics(candidates: &[Candidate], threshold: f64) -> Vec<TopicCluster> {
    let n = candidates.len();
    let sets: Vec<BTreeSet<&str>> = candidates.iter().map(Candidate::stem_set).collect();
    let mut sim = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in (i + 1)..n {
            let s = jaccard(&sets[i], &sets[j]);
            sim[i][j] = s;
            sim[j][i] = s;
        }
    }

    let mut clusters: Vec<Vec<usize>> = (0..n).map(|i| vec![i]).collect();
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for a in 0..clusters.len() {
            for b in (a + 1)..clusters.len() {
                let mut total = 0.0;
                for &x in &clusters[a] {
                    for &y in &clusters[b] {
                        total += sim[x][y];
                    }
                }
                let avg = total / (clusters[a].len() * clusters[b].len()) as f64;
                if best.map_or(true, |(s, _, _)| avg > s) {
                    best = Some((avg, a, b));
                }
            }
        }
        match best {
            Some((score, a, b)) if score >= threshold => {
                let absorbed = clusters.remove(b);
                clusters[a].extend(absorbed);
            }
            _ => break,
        }
    }

    let mut out: Vec<TopicCluster> = clusters
        .into_iter()
        .map(|mut members| {
            members.sort_unstable();
            let first_offset =
                members.iter().map(|&m| candidates[m].positions[0]).min().expect("non-empty");
            TopicCluster { members, first_offset }
        })
        .collect();
    out.sort_by_key(|c| (c.first_offset, c.members[0]));
    out
}

/// Top keywords by random-walk score. Ties break on earlier first offset,
/// then lexicographic surface.
pub fn rank_keywords(
    graph: &CandidateGraph,
    candidates: &[Candidate],
    limit: usize,
    damping: f64,
) -> Vec<String> {
    let scores = rank_scores(graph, damping);
    let mut order: Vec<usize> = (0..candidates.len()).collect();
    order.sort_by(|&a, &b| {
        scores[b]
            .partial_cmp(&scores[a])
            .expect("finite scores")
            .then_with(|| candidates[a].positions[0].cmp(&candidates[b].positions[0]))
            .then_with(|| candidates[a].surface.cmp(&candidates[b].surface))
    });
    order.into_iter().take(limit).map(|i| candidates[i].surface.clone()).collect()
}

/// The full extraction pipeline for one annotated claim.
pub fn extract_keywords(annotation: &Annotation, config: &KeyphraseConfig) -> Vec<String> {
    let candidates = extract_candidates(annotation, &config.pos_whitelist);
    let clusters = cluster_topics(&candidates, config.threshold);
    let graph = build_graph(&clusters, &candidates);
    let adjusted = adjust_weights(&graph, &clusters, &candidates, config.alpha);
    rank_keywords(&adjusted, &candidates, config.limit, config.damping)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::{SentenceAnnotation, TokenAnnotation};

    fn tok(text: &str, pos: PosTag) -> TokenAnnotation {
        TokenAnnotation {
            text: text.to_string(),
            pos,
            lemma: text.to_lowercase(),
            dep: "dep".into(),
            head_index: 0,
            is_sent_root: false,
        }
    }

    fn sentence(toks: Vec<TokenAnnotation>) -> Annotation {
        let mut toks = toks;
        if let Some(first) = toks.first_mut() {
            first.is_sent_root = true;
        }
        Annotation { sentences: vec![SentenceAnnotation { tokens: toks }], entities: vec![] }
    }

    fn whitelist() -> BTreeSet<PosTag> {
        KeyphraseConfig::default().pos_whitelist
    }

    #[test]
    fn extracts_maximal_whitelisted_spans() {
        // Black/PROPN Panther/PROPN is/AUX exclusively/ADV a/DET comic/NOUN book/NOUN ./PUNCT
        let ann = sentence(vec![
            tok("Black", PosTag::Propn),
            tok("Panther", PosTag::Propn),
            tok("is", PosTag::Aux),
            tok("exclusively", PosTag::Adv),
            tok("a", PosTag::Det),
            tok("comic", PosTag::Noun),
            tok("book", PosTag::Noun),
            tok(".", PosTag::Punct),
        ]);
        let cands = extract_candidates(&ann, &whitelist());
        let surfaces: Vec<&str> = cands.iter().map(|c| c.surface.as_str()).collect();
        assert_eq!(surfaces, vec!["Black Panther", "exclusively a comic book"]);
        assert_eq!(cands[0].positions, vec![0]);
        assert_eq!(cands[1].positions, vec![3]);
        assert_eq!(cands[1].pos_tags, vec![PosTag::Adv, PosTag::Det, PosTag::Noun, PosTag::Noun]);
    }

    #[test]
    fn verbs_only_yield_no_candidates() {
        let ann = sentence(vec![tok("Stop", PosTag::Verb), tok("running", PosTag::Verb)]);
        assert!(extract_candidates(&ann, &whitelist()).is_empty());
    }

    #[test]
    fn particles_break_spans() {
        // LGBT/PROPN is/AUX not/PART an/DET acronym/NOUN containing/VERB the/DET word/NOUN lesbian/NOUN ./PUNCT
        let ann = sentence(vec![
            tok("LGBT", PosTag::Propn),
            tok("is", PosTag::Aux),
            tok("not", PosTag::Part),
            tok("an", PosTag::Det),
            tok("acronym", PosTag::Noun),
            tok("containing", PosTag::Verb),
            tok("the", PosTag::Det),
            tok("word", PosTag::Noun),
            tok("lesbian", PosTag::Noun),
            tok(".", PosTag::Punct),
        ]);
        let surfaces: Vec<String> =
            extract_candidates(&ann, &whitelist()).into_iter().map(|c| c.surface).collect();
        assert_eq!(surfaces, vec!["LGBT", "an acronym", "the word lesbian"]);
    }

    #[test]
    fn repeated_span_merges_by_stems() {
        let ann = sentence(vec![
            tok("films", PosTag::Noun),
            tok("beat", PosTag::Verb),
            tok("film", PosTag::Noun),
        ]);
        let cands = extract_candidates(&ann, &whitelist());
        assert_eq!(cands.len(), 1);
        assert_eq!(cands[0].surface, "films");
        assert_eq!(cands[0].positions, vec![0, 2]);
    }

    #[test]
    fn empty_annotation_no_candidates() {
        assert!(extract_candidates(&Annotation::empty(), &whitelist()).is_empty());
    }

    fn plain_cand(words: &str, pos: usize) -> Candidate {
        Candidate {
            surface: words.to_string(),
            stems: words.split(' ').map(stem).collect(),
            positions: vec![pos],
            pos_tags: vec![PosTag::Noun; words.split(' ').count()],
        }
    }

    #[test]
    fn identical_stem_sets_cluster_together() {
        let cands = vec![plain_cand("comic book", 0), plain_cand("comic books", 5)];
        let clusters = cluster_topics(&cands, 0.75);
        assert_eq!(clusters.len(), 1);
        assert_eq!(clusters[0].members, vec![0, 1]);
        assert_eq!(clusters[0].first_offset, 0);
    }

    #[test]
    fn disjoint_stems_stay_singletons() {
        let cands = vec![plain_cand("alpha", 0), plain_cand("beta", 2), plain_cand("gamma", 4)];
        let clusters = cluster_topics(&cands, 0.75);
        assert_eq!(clusters.len(), 3);
        assert!(clusters.iter().all(|c| c.members.len() == 1));
    }

    #[test]
    fn mixed_fixture_partitions() {
        let cands =
            vec![plain_cand("comic book", 0), plain_cand("comic books", 4), plain_cand("film", 8)];
        let clusters = cluster_topics(&cands, 0.75);
        assert_eq!(clusters.len(), 2);
        assert_eq!(clusters[0].members, vec![0, 1]);
        assert_eq!(clusters[1].members, vec![2]);
        // partition: every candidate in exactly one cluster
        let mut seen: Vec<usize> = clusters.iter().flat_map(|c| c.members.clone()).collect();
        seen.sort_unstable();
        assert_eq!(seen, vec![0, 1, 2]);
    }

    #[test]
    fn below_threshold_pairs_do_not_merge() {
        // one shared stem out of three total: jaccard = 1/3 < 0.75
        let cands = vec![plain_cand("comic book", 0), plain_cand("comic film", 4)];
        let clusters = cluster_topics(&cands, 0.75);
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn rank_caps_at_limit() {
        let cands: Vec<Candidate> =
            (0..12).map(|i| plain_cand(&format!("word{i}"), i * 2)).collect();
        let clusters = cluster_topics(&cands, 0.75);
        let graph = build_graph(&clusters, &cands);
        let keywords = rank_keywords(&graph, &cands, 10, DAMPING_DEFAULT);
        assert_eq!(keywords.len(), 10);
    }

    #[test]
    fn rank_breaks_ties_by_offset() {
        let cands = vec![plain_cand("later", 4), plain_cand("early", 0)];
        let clusters = cluster_topics(&cands, 0.75);
        let graph = build_graph(&clusters, &cands);
        let keywords = rank_keywords(&graph, &cands, 10, DAMPING_DEFAULT);
        assert_eq!(keywords, vec!["early", "later"]);
    }

    #[test]
    fn full_extraction_is_deterministic() {
        let ann = sentence(vec![
            tok("Black", PosTag::Propn),
            tok("Panther", PosTag::Propn),
            tok("is", PosTag::Aux),
            tok("exclusively", PosTag::Adv),
            tok("a", PosTag::Det),
            tok("comic", PosTag::Noun),
            tok("book", PosTag::Noun),
            tok(".", PosTag::Punct),
        ]);
        let config = KeyphraseConfig::default();
        let a = extract_keywords(&ann, &config);
        let b = extract_keywords(&ann, &config);
        assert_eq!(a, b);
        assert_eq!(a.len(), 2);
        assert!(a.contains(&"Black Panther".to_string()));
    }

    #[test]
    fn config_defaults_match_documented_values() {
        let c = KeyphraseConfig::default();
        assert_eq!(c.alpha, 1.0);
        assert_eq!(c.threshold, 0.75);
        assert_eq!(c.limit, 10);
        assert_eq!(c.damping, 0.85);
        assert_eq!(c.pos_whitelist.len(), 6);
        assert!(!c.pos_whitelist.contains(&PosTag::Verb));
    }
}
