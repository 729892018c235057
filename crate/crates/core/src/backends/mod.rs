//! Pluggable model backends.
//!
//! Every neural model the pipeline depends on — question generator, answer
//! generator, QA-to-claim converter, NLI classifier, linguistic annotator,
//! and the two summarizers — sits behind the [`Backend`] trait. The repo
//! ships no weights: [`MockBackend`] replays deterministic fixture tables for
//! tests, [`RemoteBackend`] talks JSON-over-HTTP to an inference server.
//!
//! A [`BackendSet`] routes each [`Task`] to one configured backend and
//! enforces the capability invariant: a call never reaches a backend that
//! does not declare support for its task.

mod annotation;
mod mock;
mod remote;

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use annotation::{
    annotation_from_wire, annotation_to_wire, Annotation, EntitySpan, PosTag, SentenceAnnotation,
    TokenAnnotation, WireToken,
};
pub use mock::{FixtureTables, MockBackend, MockBuilder};
pub use remote::{call_remote, RemoteBackend, RemoteOptions, WireRequest, WireResponse};

/// Environment variable consulted for a default remote endpoint.
pub const ENDPOINT_ENV: &str = "COUNTERFACT_ENDPOINT";

/// The five model tasks a backend can serve. Doubles as the capability flag
/// and as the `task` discriminator on the wire.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Task {
    Generate,
    Nli,
    Annotate,
    SummarizeExt,
    SummarizeAbs,
}

impl Task {
    pub const ALL: [Task; 5] =
        [Task::Generate, Task::Nli, Task::Annotate, Task::SummarizeExt, Task::SummarizeAbs];

    pub fn as_str(self) -> &'static str {
        match self {
            Task::Generate => "generate",
            Task::Nli => "nli",
            Task::Annotate => "annotate",
            Task::SummarizeExt => "summarize_ext",
            Task::SummarizeAbs => "summarize_abs",
        }
    }
}

impl std::fmt::Display for Task {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// What a backend instance can do and whether it may be shared across
/// threads without external locking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BackendCapabilities {
    pub supports: BTreeSet<Task>,
    pub thread_safe: bool,
}

impl BackendCapabilities {
    pub fn all(thread_safe: bool) -> Self {
        BackendCapabilities { supports: Task::ALL.into_iter().collect(), thread_safe }
    }

    pub fn supports(&self, task: Task) -> bool {
        self.supports.contains(&task)
    }
}

/// Decoding strategy for text generation. Only greedy decoding is in use;
/// the enum leaves room for future variants.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
#[non_exhaustive]
pub enum Decoding {
    #[default]
    Greedy,
}

/// A fully formatted generation call: the caller has already assembled the
/// prompt string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenerationRequest {
    pub prompt: String,
    pub max_length: usize,
    pub decoding: Decoding,
}

impl GenerationRequest {
    pub fn greedy(prompt: impl Into<String>, max_length: usize) -> Result<Self, BackendError> {
        if max_length == 0 {
            return Err(BackendError::InvalidRequest("max_length must be at least 1".into()));
        }
        Ok(GenerationRequest { prompt: prompt.into(), max_length, decoding: Decoding::Greedy })
    }
}

/// Raw NLI logits in fixed label order (contradiction, neutral, entailment).
/// Logits, not probabilities: no normalization is implied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(into = "[f64; 3]", try_from = "[f64; 3]")]
pub struct NliLogits {
    pub contradiction: f64,
    pub neutral: f64,
    pub entailment: f64,
}

impl NliLogits {
    pub fn new(contradiction: f64, neutral: f64, entailment: f64) -> Result<Self, BackendError> {
        let l = NliLogits { contradiction, neutral, entailment };
        if l.as_array().iter().all(|v| v.is_finite()) {
            Ok(l)
        } else {
            Err(BackendError::InvalidLogits(l.as_array()))
        }
    }

    pub fn as_array(&self) -> [f64; 3] {
        [self.contradiction, self.neutral, self.entailment]
    }
}

impl From<NliLogits> for [f64; 3] {
    fn from(l: NliLogits) -> Self {
        l.as_array()
    }
}

impl TryFrom<[f64; 3]> for NliLogits {
    type Error = String;
    fn try_from(a: [f64; 3]) -> Result<Self, String> {
        NliLogits::new(a[0], a[1], a[2]).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend does not support task {0}")]
    Unsupported(Task),
    #[error("no backend configured for task {0}")]
    NotConfigured(Task),
    #[error("no fixture entry for task {task}, input: {input:?}")]
    FixtureMiss { task: Task, input: String },
    #[error("invalid fixture: {0}")]
    Fixture(String),
    #[error("invalid request: {0}")]
    InvalidRequest(String),
    #[error("non-finite logits {0:?}")]
    InvalidLogits([f64; 3]),
    #[error("transport failure after {attempts} attempt(s): {message}")]
    Transport { attempts: u32, message: String },
    #[error("endpoint returned status {status} after {attempts} attempt(s); body: {body}")]
    Status { status: u16, attempts: u32, body: String },
    #[error("schema-invalid response ({message}); body: {body}")]
    Schema { message: String, body: String },
    #[error("invalid annotation: {0}")]
    Annotation(String),
}

/// One model provider. Implementations must check their own capability set
/// and reject tasks they do not serve.
pub trait Backend: Send + Sync {
    fn capabilities(&self) -> &BackendCapabilities;

    fn generate(&self, request: &GenerationRequest) -> Result<String, BackendError>;

    fn nli_logits(&self, packed_input: &str) -> Result<NliLogits, BackendError>;

    fn annotate(&self, text: &str) -> Result<Annotation, BackendError>;

    fn summarize_extractive(&self, input: &str) -> Result<String, BackendError>;

    fn summarize_abstractive(&self, input: &str) -> Result<String, BackendError>;
}

/// Task-to-backend routing table. Several tasks may share one backend
/// instance (via `Arc`), or each may go to a different one.
#[derive(Clone, Default)]
pub struct BackendSet {
    slots: std::collections::BTreeMap<Task, Arc<dyn Backend>>,
}

impl BackendSet {
    pub fn new() -> Self {
        BackendSet::default()
    }

    /// Route every task to the same backend.
    pub fn single(backend: Arc<dyn Backend>) -> Self {
        let mut set = BackendSet::new();
        for task in Task::ALL {
            set.slots.insert(task, Arc::clone(&backend));
        }
        set
    }

    pub fn with(mut self, task: Task, backend: Arc<dyn Backend>) -> Self {
        self.slots.insert(task, backend);
        self
    }

    pub fn is_configured(&self, task: Task) -> bool {
        self.slots.contains_key(&task)
    }

    /// Fetch the backend for `task`, enforcing the capability invariant
    /// before the backend is ever invoked.
    pub fn for_task(&self, task: Task) -> Result<&dyn Backend, BackendError> {
        let backend = self.slots.get(&task).ok_or(BackendError::NotConfigured(task))?;
        if !backend.capabilities().supports(task) {
            return Err(BackendError::Unsupported(task));
        }
        Ok(backend.as_ref())
    }

    pub fn generate(&self, request: &GenerationRequest) -> Result<String, BackendError> {
        self.for_task(Task::Generate)?.generate(request)
    }

    pub fn nli_logits(&self, packed_input: &str) -> Result<NliLogits, BackendError> {
        self.for_task(Task::Nli)?.nli_logits(packed_input)
    }

    pub fn annotate(&self, text: &str) -> Result<Annotation, BackendError> {
        self.for_task(Task::Annotate)?.annotate(text)
    }

    pub fn summarize_extractive(&self, input: &str) -> Result<String, BackendError> {
        self.for_task(Task::SummarizeExt)?.summarize_extractive(input)
    }

    pub fn summarize_abstractive(&self, input: &str) -> Result<String, BackendError> {
        self.for_task(Task::SummarizeAbs)?.summarize_abstractive(input)
    }
}

impl std::fmt::Debug for BackendSet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_map().entries(self.slots.keys().map(|t| (t, "<backend>"))).finish()
    }
}
