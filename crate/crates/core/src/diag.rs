//! Per-record diagnostics.
//!
//! The pipeline degrades gracefully in a lot of places (a keyword that fails
//! question generation is skipped, an annotator outage falls back to a cruder
//! rule, ...). Every such event is recorded as a [`Diagnostic`] on the record
//! being processed instead of being printed or silently dropped, so batch runs
//! stay auditable.

use serde::{Deserialize, Serialize};

/// Pipeline stage a diagnostic originates from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Corpus,
    Backend,
    Keyphrase,
    QuestionGen,
    AnswerGen,
    Entailment,
    Declarative,
    Render,
    Baseline,
}

impl Stage {
    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Corpus => "corpus",
            Stage::Backend => "backend",
            Stage::Keyphrase => "keyphrase",
            Stage::QuestionGen => "question_gen",
            Stage::AnswerGen => "answer_gen",
            Stage::Entailment => "entailment",
            Stage::Declarative => "declarative",
            Stage::Render => "render",
            Stage::Baseline => "baseline",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    Warning,
    Error,
}

/// One recorded event. `message` is free text aimed at a human reading the
/// output file, not at programmatic matching.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Diagnostic {
    pub stage: Stage,
    pub severity: Severity,
    pub message: String,
}

impl Diagnostic {
    pub fn warning(stage: Stage, message: impl Into<String>) -> Self {
        Diagnostic { stage, severity: Severity::Warning, message: message.into() }
    }

    pub fn error(stage: Stage, message: impl Into<String>) -> Self {
        Diagnostic { stage, severity: Severity::Error, message: message.into() }
    }
}
