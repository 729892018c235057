//! Contradiction-based answer selection.
//!
//! Every generated answer is packed with the claim and scored by the NLI
//! backend; the answer with the highest raw contradiction logit wins. Raw
//! logits are compared rather than softmax probabilities — argmax is the
//! same either way and storing logits avoids implying calibration.

use thiserror::Error;

use crate::backends::{Backend, NliLogits};
use crate::diag::{Diagnostic, Stage};
use crate::qagen::QAPair;

/// One answer with its NLI logits against the claim.
#[derive(Debug, Clone, PartialEq)]
pub struct ScoredAnswer {
    pub qa: QAPair,
    pub logits: NliLogits,
}

/// The selected answer. `index` points into the scored list (which keeps
/// claim answer-set order).
#[derive(Debug, Clone, PartialEq)]
pub struct BestAnswer {
    pub index: usize,
    pub qa: QAPair,
    pub logits: NliLogits,
}

/// Selection outcome: the winner plus every scored answer, retained for
/// audit.
#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub best: BestAnswer,
    pub scored: Vec<ScoredAnswer>,
}

#[derive(Debug, Error)]
pub enum EntailmentError {
    #[error("claim is empty")]
    EmptyClaim,
    #[error("answer is empty")]
    EmptyAnswer,
    #[error("no answers to score")]
    NoAnswers,
    #[error("no answers survived NLI scoring ({failed} failed)")]
    AllScoringFailed { failed: usize },
}

/// NLI packing: `{claim}</s></s>{answer}` — claim first, no added spaces.
pub fn make_nli_input(claim: &str, answer: &str) -> Result<String, EntailmentError> {
    if claim.trim().is_empty() {
        return Err(EntailmentError::EmptyClaim);
    }
    if answer.trim().is_empty() {
        return Err(EntailmentError::EmptyAnswer);
    }
    Ok(format!("{claim}</s></s>{answer}"))
}

/// Argmax over the contradiction channel; ties break to the lowest index.
/// Returns `None` only for an empty slice.
pub fn argmax_contradiction(scored: &[ScoredAnswer]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, s) in scored.iter().enumerate() {
        match best {
            None => best = Some(i),
            Some(b) if s.logits.contradiction > scored[b].logits.contradiction => best = Some(i),
            _ => {}
        }
    }
    best
}

/// Score every pair and pick the most contradictory answer. Pairs whose
/// scoring call fails are excluded with a warning; losing every pair is a
/// stage error.
pub fn select_best_answer(
    claim: &str,
    qa_pairs: &[QAPair],
    backend: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Selection, EntailmentError> {
    if qa_pairs.is_empty() {
        return Err(EntailmentError::NoAnswers);
    }
    let mut scored: Vec<ScoredAnswer> = Vec::new();
    let mut failed = 0usize;
    for qa in qa_pairs {
        let packed = make_nli_input(claim, &qa.answer)?;
        match backend.nli_logits(&packed) {
            Ok(logits) => scored.push(ScoredAnswer { qa: qa.clone(), logits }),
            Err(e) => {
                failed += 1;
                diagnostics.push(Diagnostic::warning(
                    Stage::Entailment,
                    format!("answer {:?} excluded from scoring: {e}", qa.answer),
                ));
            }
        }
    }
    let index = argmax_contradiction(&scored)
        .ok_or(EntailmentError::AllScoringFailed { failed })?;
    let winner = &scored[index];
    Ok(Selection {
        best: BestAnswer { index, qa: winner.qa.clone(), logits: winner.logits },
        scored,
    })
}
