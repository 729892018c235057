//! End-to-end explanation pipeline and the three counterfactual templates.
//!
//! [`Pipeline::explain_claim`] drives one refuted claim through keyword
//! extraction, question generation, answering, and answer selection, turns
//! the winning question/answer pair into a declarative sentence, and renders
//! the requested subset of the three templates:
//!
//! * **CF-A** — "If we were to say '{S}' instead of '{F}', …": substitute the
//!   correction `S` for the faulty fragment `F` of the claim.
//! * **CF-N** — "If we were to say not '{C}' but instead '{S}', …": plain
//!   side-by-side contrast of the whole claim `C` and the correction.
//! * **CF-M** — "If we were to say '{NC} {but|and} {F}', …": the negated
//!   claim `NC` joined with the non-redundant part of the correction.
//!
//! The pipeline never panics on a bad record and never returns early with a
//! bare error: every outcome is an [`ExplanationBundle`] whose `status` and
//! `diagnostics` say how far it got, so batch runs can keep going and still
//! report per-record failures faithfully.

mod negate;
mod overlap;

pub use negate::{has_negative_word, negate_claim, NegatedClaim, NegationRule};
pub use overlap::{reduce_overlap, SmallestChange};

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::backends::{Backend, BackendError, BackendSet, GenerationRequest, Task};
use crate::corpus::{ClaimId, ClaimRecord, Verdict};
use crate::diag::{Diagnostic, Stage};
use crate::entailment::{select_best_answer, Selection};
use crate::keyphrase::{extract_keywords, KeyphraseConfig};
use crate::qagen::{generate_answers, generate_questions, GeneratedQuestion, QAPair,
    MAX_GENERATION_LENGTH};
use crate::text::{capitalize_first, strip_trailing_period};

/// One of the three counterfactual templates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Form {
    #[serde(rename = "cf-a")]
    CfA,
    #[serde(rename = "cf-n")]
    CfN,
    #[serde(rename = "cf-m")]
    CfM,
}

impl Form {
    pub const ALL: [Form; 3] = [Form::CfA, Form::CfN, Form::CfM];

    pub fn as_str(self) -> &'static str {
        match self {
            Form::CfA => "cf-a",
            Form::CfN => "cf-n",
            Form::CfM => "cf-m",
        }
    }

    /// The full set of templates.
    pub fn all() -> FormSet {
        Form::ALL.into_iter().collect()
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Form {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().replace('_', "-").as_str() {
            "cf-a" | "cfa" | "a" => Ok(Form::CfA),
            "cf-n" | "cfn" | "n" => Ok(Form::CfN),
            "cf-m" | "cfm" | "m" => Ok(Form::CfM),
            other => Err(format!("unknown counterfactual form {other:?} (expected cf-a, cf-n, or cf-m)")),
        }
    }
}

/// Which templates to render.
pub type FormSet = BTreeSet<Form>;

/// Where the declarative sentence came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DeclarativeSource {
    /// Rewritten from the question/answer pair by the generation backend.
    #[serde(rename = "qa2claim")]
    Qa2Claim,
    /// The answer already was a complete sentence and is used verbatim.
    #[serde(rename = "answer_as_is")]
    AnswerAsIs,
}

impl DeclarativeSource {
    pub fn as_str(self) -> &'static str {
        match self {
            DeclarativeSource::Qa2Claim => "qa2claim",
            DeclarativeSource::AnswerAsIs => "answer_as_is",
        }
    }
}

/// The corrected statement `S` that the templates quote.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DeclarativeSentence {
    pub text: String,
    pub source: DeclarativeSource,
}

/// Terminal state of one pipeline run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BundleStatus {
    Ok,
    Error { stage: Stage },
}

impl BundleStatus {
    pub fn is_ok(self) -> bool {
        matches!(self, BundleStatus::Ok)
    }
}

/// Everything produced while explaining one claim, including partial results
/// of runs that failed midway.
#[derive(Debug, Clone)]
pub struct ExplanationBundle {
    pub claim_id: ClaimId,
    pub claim: String,
    pub keywords: Vec<String>,
    pub questions: Vec<GeneratedQuestion>,
    pub answers: Vec<QAPair>,
    pub selection: Option<Selection>,
    pub declarative: Option<DeclarativeSentence>,
    pub cf_a: Option<String>,
    pub cf_n: Option<String>,
    pub cf_m: Option<String>,
    pub status: BundleStatus,
    pub diagnostics: Vec<Diagnostic>,
}

impl ExplanationBundle {
    fn empty(record: &ClaimRecord) -> Self {
        ExplanationBundle {
            claim_id: record.claim_id.clone(),
            claim: record.claim.clone(),
            keywords: Vec::new(),
            questions: Vec::new(),
            answers: Vec::new(),
            selection: None,
            declarative: None,
            cf_a: None,
            cf_n: None,
            cf_m: None,
            status: BundleStatus::Ok,
            diagnostics: Vec::new(),
        }
    }

    /// Flatten into the serializable output record.
    pub fn to_record(&self) -> ExplanationRecord {
        let nli_logits = self
            .answers
            .iter()
            .map(|qa| {
                self.selection.as_ref().and_then(|sel| {
                    sel.scored
                        .iter()
                        .find(|scored| scored.qa.index == qa.index)
                        .map(|scored| scored.logits.as_array())
                })
            })
            .collect();
        ExplanationRecord {
            claim_id: self.claim_id.clone(),
            claim: self.claim.clone(),
            keywords: self.keywords.clone(),
            questions: self.questions.iter().map(|q| q.question.clone()).collect(),
            answers: self.answers.iter().map(|qa| qa.answer.clone()).collect(),
            nli_logits,
            best_index: self.selection.as_ref().map(|sel| sel.best.qa.index),
            declarative: self.declarative.as_ref().map(|d| d.text.clone()),
            declarative_source: self.declarative.as_ref().map(|d| d.source),
            cf_a: self.cf_a.clone(),
            cf_n: self.cf_n.clone(),
            cf_m: self.cf_m.clone(),
            status: match self.status {
                BundleStatus::Ok => "ok".to_string(),
                BundleStatus::Error { stage } => format!("error:{}", stage.as_str()),
            },
            diagnostics: self.diagnostics.clone(),
        }
    }
}

/// Wire/file form of an explanation, one JSON object per claim.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExplanationRecord {
    pub claim_id: ClaimId,
    pub claim: String,
    pub keywords: Vec<String>,
    pub questions: Vec<String>,
    pub answers: Vec<String>,
    /// Per answer: `[contradiction, neutral, entailment]`, or null when the
    /// answer was not scored.
    pub nli_logits: Vec<Option<[f64; 3]>>,
    pub best_index: Option<usize>,
    pub declarative: Option<String>,
    pub declarative_source: Option<DeclarativeSource>,
    pub cf_a: Option<String>,
    pub cf_n: Option<String>,
    pub cf_m: Option<String>,
    pub status: String,
    pub diagnostics: Vec<Diagnostic>,
}

#[derive(Debug, thiserror::Error)]
pub enum ExplainError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("declarative rewrite returned empty output")]
    EmptyDeclarative,
}

/// Is `answer` already a standalone declarative sentence? True when the first
/// sentence's dependency root is verbal and has a nominal subject attached.
/// Annotation failures count as "no" (with a warning): the safe path is to
/// rewrite.
pub fn is_complete_sentence(
    answer: &str,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> bool {
    if answer.trim().is_empty() {
        return false;
    }
    let annotation = match annotator.annotate(answer) {
        Ok(a) => a,
        Err(e) => {
            diagnostics.push(Diagnostic::warning(
                Stage::Declarative,
                format!("annotation failed during completeness check ({e}); assuming fragment"),
            ));
            return false;
        }
    };
    let Some(sentence) = annotation.sentences.iter().find(|s| !s.tokens.is_empty()) else {
        return false;
    };
    let Some(root_index) = sentence.tokens.iter().position(|t| t.is_sent_root) else {
        return false;
    };
    if !sentence.tokens[root_index].pos.is_verbal() {
        return false;
    }
    sentence.tokens.iter().enumerate().any(|(i, t)| {
        i != root_index && t.head_index == root_index && t.dep.starts_with("nsubj")
    })
}

/// Rewrite a question/answer pair into a declarative sentence with the
/// generation backend. Input format: `{question} [SEP] {answer}`.
pub fn qa_to_claim(
    question: &str,
    answer: &str,
    backend: &dyn Backend,
) -> Result<DeclarativeSentence, ExplainError> {
    let prompt = format!("{question} [SEP] {answer}");
    let raw = backend.generate(&GenerationRequest::greedy(prompt, MAX_GENERATION_LENGTH)?)?;
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(ExplainError::EmptyDeclarative);
    }
    Ok(DeclarativeSentence {
        text: capitalize_first(trimmed),
        source: DeclarativeSource::Qa2Claim,
    })
}

/// CF-A: swap the corrected statement in for the claim's faulty fragment.
pub fn render_cf_a(
    claim: &str,
    declarative: &DeclarativeSentence,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> String {
    let s = strip_trailing_period(declarative.text.trim());
    let f = reduce_overlap(claim, s, annotator, diagnostics).text;
    format!("If we were to say '{s}' instead of '{f}', the claim would be correct.")
}

/// CF-N: contrast the whole claim with the corrected statement.
pub fn render_cf_n(
    claim: &str,
    declarative: &DeclarativeSentence,
    diagnostics: &mut Vec<Diagnostic>,
) -> String {
    let c = strip_trailing_period(claim.trim());
    let s = strip_trailing_period(declarative.text.trim());
    if c == s {
        diagnostics.push(Diagnostic::warning(
            Stage::Render,
            "claim and correction are identical; contrastive template is vacuous".to_string(),
        ));
    }
    format!("If we were to say not '{c}' but instead '{s}', the claim would be correct.")
}

/// CF-M: negate the claim and append the non-redundant part of the corrected
/// statement. The connector is "but" when the negated claim still carries a
/// negative word, "and" otherwise.
pub fn render_cf_m(
    claim: &str,
    declarative: &DeclarativeSentence,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> String {
    let negated = negate_claim(claim, annotator, diagnostics);
    let nc = strip_trailing_period(negated.text.trim()).to_string();
    let connector = if has_negative_word(&negated.text) { "but" } else { "and" };
    let f = reduce_overlap(&declarative.text, claim, annotator, diagnostics).text;
    format!("If we were to say '{nc} {connector} {f}', the claim would be correct.")
}

/// The full explanation pipeline: a set of backends plus keyword-extraction
/// settings.
#[derive(Debug, Clone)]
pub struct Pipeline {
    backends: BackendSet,
    keyphrase: KeyphraseConfig,
}

impl Pipeline {
    pub fn new(backends: BackendSet) -> Self {
        Pipeline { backends, keyphrase: KeyphraseConfig::default() }
    }

    pub fn with_keyphrase(mut self, config: KeyphraseConfig) -> Self {
        self.keyphrase = config;
        self
    }

    pub fn backends(&self) -> &BackendSet {
        &self.backends
    }

    /// Explain one refuted claim, rendering the requested templates. Always
    /// returns a bundle; failures are recorded in its status and diagnostics.
    pub fn explain_claim(&self, record: &ClaimRecord, forms: &FormSet) -> ExplanationBundle {
        let mut bundle = ExplanationBundle::empty(record);
        if let Err((stage, message)) = self.run(record, forms, &mut bundle) {
            bundle.diagnostics.push(Diagnostic::error(stage, message.clone()));
            bundle.status = BundleStatus::Error { stage };
        }
        bundle
    }

    fn run(
        &self,
        record: &ClaimRecord,
        forms: &FormSet,
        bundle: &mut ExplanationBundle,
    ) -> Result<(), (Stage, String)> {
        if record.label != Verdict::Refuted {
            return Err((
                Stage::Corpus,
                format!("claim {} is labeled {}, expected REFUTED", record.claim_id, record.label),
            ));
        }
        if record.claim.trim().is_empty() {
            return Err((Stage::Corpus, format!("claim {} has empty text", record.claim_id)));
        }
        if record.evidence_text.trim().is_empty() {
            return Err((Stage::Corpus, format!("claim {} has empty evidence", record.claim_id)));
        }

        let claim_annotation = self
            .backends
            .annotate(&record.claim)
            .map_err(|e| (Stage::Keyphrase, format!("claim annotation failed: {e}")))?;
        bundle.keywords = extract_keywords(&claim_annotation, &self.keyphrase);

        let generator = self
            .backends
            .for_task(Task::Generate)
            .map_err(|e| (Stage::QuestionGen, e.to_string()))?;
        bundle.questions =
            generate_questions(&record.claim, &bundle.keywords, generator, &mut bundle.diagnostics)
                .map_err(|e| (Stage::QuestionGen, e.to_string()))?;
        bundle.answers = generate_answers(
            &bundle.questions,
            &record.evidence_text,
            generator,
            &mut bundle.diagnostics,
        )
        .map_err(|e| (Stage::AnswerGen, e.to_string()))?;

        let nli = self
            .backends
            .for_task(Task::Nli)
            .map_err(|e| (Stage::Entailment, e.to_string()))?;
        let selection =
            select_best_answer(&record.claim, &bundle.answers, nli, &mut bundle.diagnostics)
                .map_err(|e| (Stage::Entailment, e.to_string()))?;
        let best = selection.best.clone();
        bundle.selection = Some(selection);

        let annotator = self
            .backends
            .for_task(Task::Annotate)
            .map_err(|e| (Stage::Declarative, e.to_string()))?;
        let declarative =
            if is_complete_sentence(&best.qa.answer, annotator, &mut bundle.diagnostics) {
                DeclarativeSentence {
                    text: best.qa.answer.clone(),
                    source: DeclarativeSource::AnswerAsIs,
                }
            } else {
                qa_to_claim(&best.qa.question, &best.qa.answer, generator)
                    .map_err(|e| (Stage::Declarative, e.to_string()))?
            };
        bundle.declarative = Some(declarative.clone());

        if forms.contains(&Form::CfA) {
            bundle.cf_a =
                Some(render_cf_a(&record.claim, &declarative, annotator, &mut bundle.diagnostics));
        }
        if forms.contains(&Form::CfN) {
            bundle.cf_n = Some(render_cf_n(&record.claim, &declarative, &mut bundle.diagnostics));
        }
        if forms.contains(&Form::CfM) {
            bundle.cf_m =
                Some(render_cf_m(&record.claim, &declarative, annotator, &mut bundle.diagnostics));
        }
        Ok(())
    }
}
