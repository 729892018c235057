//! Overlap reduction between a target sentence and a reference sentence.
//!
//! Rendering puts two sentences side by side (the claim and its evidence-based
//! correction); repeating the part they share verbatim makes the output
//! clumsy. [`reduce_overlap`] trims from the *front* of the target the longest
//! prefix whose words are all "covered" by the reference, where a word counts
//! as covered when it appears in a shared word bigram or inside a named-entity
//! surface that both sentences contain. Cutting happens at a character offset
//! in the original string, so interior spacing and punctuation survive intact.

use std::collections::HashSet;

use crate::backends::{Annotation, Backend, PosTag};
use crate::diag::{Diagnostic, Stage};
use crate::text::{strip_trailing_period, token_core};

/// A target sentence with its covered prefix removed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SmallestChange {
    /// Remainder of the target (trailing period stripped).
    pub text: String,
    /// The prefix that was dropped, empty when nothing was covered.
    pub removed_prefix: String,
}

/// One word of the target/reference with its byte offset in the original text.
#[derive(Debug, Clone)]
struct Word {
    lower: String,
    start: usize,
}

/// Extract words (non-punctuation tokens) with byte offsets, plus the spans of
/// named entities expressed as word-index ranges.
struct WordView {
    words: Vec<Word>,
    /// (lowercased entity surface, word index range)
    entities: Vec<(String, std::ops::Range<usize>)>,
}

impl WordView {
    fn bigrams(&self) -> HashSet<(&str, &str)> {
        self.words
            .windows(2)
            .map(|w| (w[0].lower.as_str(), w[1].lower.as_str()))
            .collect()
    }

    fn entity_surfaces(&self) -> HashSet<&str> {
        self.entities.iter().map(|(s, _)| s.as_str()).collect()
    }
}

/// Build a [`WordView`] by locating each annotated token in the original text
/// sequentially. Returns `None` when a token cannot be found (inconsistent
/// annotation), in which case the caller falls back to whitespace splitting.
fn view_from_annotation(text: &str, annotation: &Annotation) -> Option<WordView> {
    let mut words = Vec::new();
    // flat token index -> word index (None for punctuation)
    let mut flat_to_word = Vec::new();
    let mut cursor = 0usize;
    for sentence in &annotation.sentences {
        for token in &sentence.tokens {
            let at = text[cursor..].find(&token.text)? + cursor;
            if token.pos == PosTag::Punct {
                flat_to_word.push(None);
            } else {
                words.push(Word { lower: token.text.to_lowercase(), start: at });
                flat_to_word.push(Some(words.len() - 1));
            }
            cursor = at + token.text.len();
        }
    }

    let mut sentence_offsets = Vec::with_capacity(annotation.sentences.len());
    let mut total = 0usize;
    for sentence in &annotation.sentences {
        sentence_offsets.push(total);
        total += sentence.tokens.len();
    }

    let mut entities = Vec::new();
    for entity in &annotation.entities {
        let base = sentence_offsets[entity.sentence];
        let covered: Vec<usize> = (entity.start..entity.end)
            .filter_map(|ti| flat_to_word.get(base + ti).copied().flatten())
            .collect();
        if let (Some(&first), Some(&last)) = (covered.first(), covered.last()) {
            entities.push((entity.text.to_lowercase(), first..last + 1));
        }
    }

    Some(WordView { words, entities })
}

/// Whitespace fallback used when no annotation is available: every token is a
/// word (keyed by its punctuation-trimmed core) and there are no entities.
fn view_from_whitespace(text: &str) -> WordView {
    let mut words = Vec::new();
    let mut cursor = 0usize;
    for tok in text.split_whitespace() {
        let at = text[cursor..].find(tok).expect("token from same text") + cursor;
        let core = token_core(tok);
        let key = if core.is_empty() { tok } else { core };
        words.push(Word { lower: key.to_lowercase(), start: at });
        cursor = at + tok.len();
    }
    WordView { words, entities: Vec::new() }
}

fn view(
    text: &str,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> WordView {
    match annotator.annotate(text) {
        Ok(annotation) => match view_from_annotation(text, &annotation) {
            Some(v) => v,
            None => {
                diagnostics.push(Diagnostic::warning(
                    Stage::Render,
                    "annotation tokens do not match text; using whitespace words".to_string(),
                ));
                view_from_whitespace(text)
            }
        },
        Err(e) => {
            diagnostics.push(Diagnostic::warning(
                Stage::Render,
                format!("annotation failed during overlap reduction ({e}); using whitespace words"),
            ));
            view_from_whitespace(text)
        }
    }
}

/// Remove from the front of `target` the longest prefix of words covered by
/// `reference`, cutting at the first uncovered word's character offset.
///
/// When every word of the target is covered the target is returned unchanged
/// (with a warning): an empty remainder would make the downstream templates
/// vacuous.
pub fn reduce_overlap(
    target: &str,
    reference: &str,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> SmallestChange {
    let tgt = view(target, annotator, diagnostics);
    let rf = view(reference, annotator, diagnostics);

    let shared_bigrams: HashSet<(&str, &str)> =
        tgt.bigrams().intersection(&rf.bigrams()).copied().collect();
    let shared_entities: HashSet<&str> = {
        let refs = rf.entity_surfaces();
        tgt.entity_surfaces().intersection(&refs).copied().collect()
    };

    let n = tgt.words.len();
    let mut covered = vec![false; n];
    for i in 0..n.saturating_sub(1) {
        if shared_bigrams.contains(&(tgt.words[i].lower.as_str(), tgt.words[i + 1].lower.as_str()))
        {
            covered[i] = true;
            covered[i + 1] = true;
        }
    }
    for (surface, range) in &tgt.entities {
        if shared_entities.contains(surface.as_str()) {
            for slot in &mut covered[range.clone()] {
                *slot = true;
            }
        }
    }

    let mut prefix_len = covered.iter().take_while(|&&c| c).count();
    if prefix_len == n && n > 0 {
        diagnostics.push(Diagnostic::warning(
            Stage::Render,
            "target fully covered by reference; keeping it unmodified".to_string(),
        ));
        prefix_len = 0;
    }

    if prefix_len == 0 {
        return SmallestChange {
            text: strip_trailing_period(target.trim()).to_string(),
            removed_prefix: String::new(),
        };
    }

    let cut = tgt.words[prefix_len].start;
    let removed_prefix = target[..cut].trim().to_string();
    let rest = target[cut..].trim();
    SmallestChange { text: strip_trailing_period(rest).to_string(), removed_prefix }
}
