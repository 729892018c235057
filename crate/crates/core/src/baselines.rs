//! Summarization baselines: explain a refuted claim by summarizing its
//! evidence instead of constructing a counterfactual.
//!
//! Two variants mirror the systems the counterfactual pipeline is compared
//! against in human evaluation:
//!
//! * **EXT** — extractive: the backend returns the most salient evidence
//!   sentence verbatim. The output must be a substring of the evidence; a
//!   violation is an error, not a warning, because "extractive" is the one
//!   property this baseline promises.
//! * **ABS** — abstractive: the backend writes a one-sentence summary. The
//!   output is trimmed, capitalized, and truncated to its first sentence.

use serde::{Deserialize, Serialize};

use crate::backends::{Backend, BackendError};
use crate::text::{capitalize_first, first_sentence};

/// Which summarization baseline produced an explanation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BaselineMethod {
    Ext,
    Abs,
}

impl BaselineMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            BaselineMethod::Ext => "ext",
            BaselineMethod::Abs => "abs",
        }
    }
}

impl std::fmt::Display for BaselineMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BaselineMethod {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ext" | "extractive" => Ok(BaselineMethod::Ext),
            "abs" | "abstractive" => Ok(BaselineMethod::Abs),
            other => Err(format!("unknown baseline method {other:?} (expected ext or abs)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BaselineExplanation {
    pub method: BaselineMethod,
    pub text: String,
}

#[derive(Debug, thiserror::Error)]
pub enum BaselineError {
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("evidence is empty")]
    EmptyEvidence,
    #[error("summarizer returned empty output")]
    EmptySummary,
    #[error("extractive summary is not contained in the evidence: {summary:?}")]
    ExtractiveViolation { summary: String },
}

/// Pick the most salient evidence sentence. The trimmed output must occur
/// verbatim in the evidence.
pub fn extractive_explain(
    evidence: &str,
    backend: &dyn Backend,
) -> Result<BaselineExplanation, BaselineError> {
    if evidence.trim().is_empty() {
        return Err(BaselineError::EmptyEvidence);
    }
    let raw = backend.summarize_extractive(evidence)?;
    let text = raw.trim();
    if text.is_empty() {
        return Err(BaselineError::EmptySummary);
    }
    if !evidence.contains(text) {
        return Err(BaselineError::ExtractiveViolation { summary: text.to_string() });
    }
    Ok(BaselineExplanation { method: BaselineMethod::Ext, text: text.to_string() })
}

/// Write a one-sentence abstractive summary of the evidence.
pub fn abstractive_explain(
    evidence: &str,
    backend: &dyn Backend,
) -> Result<BaselineExplanation, BaselineError> {
    if evidence.trim().is_empty() {
        return Err(BaselineError::EmptyEvidence);
    }
    let raw = backend.summarize_abstractive(evidence)?;
    let trimmed = raw.trim();
    if trimmed.is_empty() {
        return Err(BaselineError::EmptySummary);
    }
    let text = capitalize_first(first_sentence(trimmed));
    Ok(BaselineExplanation { method: BaselineMethod::Abs, text })
}
