//! Table-driven mock backend.
//!
//! Fixtures are plain JSON with one section per task; every section maps an
//! exact input string to its canned output. Lookups that miss are hard
//! errors naming the input, never silent fallbacks — golden tests are not
//! allowed to drift.
//!
//! ```json
//! {
//!   "generate": {"context: C answer: K </s>": "Which claim?"},
//!   "nli": {"C</s></s>A": [3.0, -1.0, -2.0]},
//!   "annotate": {"C": [{"text": "C", "pos": "NOUN", "root": true}]},
//!   "summarize_ext": {"evidence...": "One sentence."},
//!   "summarize_abs": {"evidence...": "One sentence."}
//! }
//! ```
//!
//! The declared capability set is exactly the set of sections present in the
//! fixture. Mock backends are immutable after load and therefore
//! thread-safe.

use std::collections::HashMap;
use std::path::Path;

use serde::Deserialize;

use super::annotation::{annotation_from_wire, Annotation, WireToken};
use super::{
    Backend, BackendCapabilities, BackendError, GenerationRequest, NliLogits, Task,
};

/// On-disk fixture schema. Absent sections mean the capability is not
/// served.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureTables {
    #[serde(default)]
    pub generate: Option<HashMap<String, String>>,
    #[serde(default)]
    pub nli: Option<HashMap<String, [f64; 3]>>,
    #[serde(default)]
    pub annotate: Option<HashMap<String, Vec<WireToken>>>,
    #[serde(default)]
    pub summarize_ext: Option<HashMap<String, String>>,
    #[serde(default)]
    pub summarize_abs: Option<HashMap<String, String>>,
}

pub struct MockBackend {
    caps: BackendCapabilities,
    generate: Option<HashMap<String, String>>,
    nli: Option<HashMap<String, NliLogits>>,
    annotate: Option<HashMap<String, Annotation>>,
    summarize_ext: Option<HashMap<String, String>>,
    summarize_abs: Option<HashMap<String, String>>,
}

impl MockBackend {
    pub fn from_path(path: &Path) -> Result<Self, BackendError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BackendError::Fixture(format!("{}: {e}", path.display())))?;
        let tables: FixtureTables = serde_json::from_str(&text)
            .map_err(|e| BackendError::Fixture(format!("{}: {e}", path.display())))?;
        MockBackend::from_tables(tables)
    }

    /// Validate and index the fixture tables: logits must be finite,
    /// annotations must pass structural validation up front so a broken
    /// fixture fails at load, not mid-pipeline.
    pub fn from_tables(tables: FixtureTables) -> Result<Self, BackendError> {
        let nli = tables
            .nli
            .map(|t| {
                t.into_iter()
                    .map(|(k, v)| {
                        let logits = NliLogits::new(v[0], v[1], v[2]).map_err(|_| {
                            BackendError::Fixture(format!("non-finite logits for input {k:?}"))
                        })?;
                        Ok((k, logits))
                    })
                    .collect::<Result<HashMap<_, _>, BackendError>>()
            })
            .transpose()?;
        let annotate = tables
            .annotate
            .map(|t| {
                t.into_iter()
                    .map(|(k, v)| {
                        let ann = annotation_from_wire(v).map_err(|e| {
                            BackendError::Fixture(format!("annotation for {k:?}: {e}"))
                        })?;
                        Ok((k, ann))
                    })
                    .collect::<Result<HashMap<_, _>, BackendError>>()
            })
            .transpose()?;

        let mut supports = std::collections::BTreeSet::new();
        if tables.generate.is_some() {
            supports.insert(Task::Generate);
        }
        if nli.is_some() {
            supports.insert(Task::Nli);
        }
        if annotate.is_some() {
            supports.insert(Task::Annotate);
        }
        if tables.summarize_ext.is_some() {
            supports.insert(Task::SummarizeExt);
        }
        if tables.summarize_abs.is_some() {
            supports.insert(Task::SummarizeAbs);
        }

        Ok(MockBackend {
            caps: BackendCapabilities { supports, thread_safe: true },
            generate: tables.generate,
            nli,
            annotate,
            summarize_ext: tables.summarize_ext,
            summarize_abs: tables.summarize_abs,
        })
    }

    pub fn builder() -> MockBuilder {
        MockBuilder::default()
    }

    fn lookup<'a, V>(
        table: &'a Option<HashMap<String, V>>,
        task: Task,
        input: &str,
    ) -> Result<&'a V, BackendError> {
        let table = table.as_ref().ok_or(BackendError::Unsupported(task))?;
        table
            .get(input)
            .ok_or_else(|| BackendError::FixtureMiss { task, input: input.to_string() })
    }
}

impl Backend for MockBackend {
    fn capabilities(&self) -> &BackendCapabilities {
        &self.caps
    }

    fn generate(&self, request: &GenerationRequest) -> Result<String, BackendError> {
        Self::lookup(&self.generate, Task::Generate, &request.prompt).cloned()
    }

    fn nli_logits(&self, packed_input: &str) -> Result<NliLogits, BackendError> {
        Self::lookup(&self.nli, Task::Nli, packed_input).copied()
    }

    fn annotate(&self, text: &str) -> Result<Annotation, BackendError> {
        if text.trim().is_empty() {
            // annotating nothing yields nothing; no fixture entry required
            self.annotate.as_ref().ok_or(BackendError::Unsupported(Task::Annotate))?;
            return Ok(Annotation::empty());
        }
        Self::lookup(&self.annotate, Task::Annotate, text).cloned()
    }

    fn summarize_extractive(&self, input: &str) -> Result<String, BackendError> {
        Self::lookup(&self.summarize_ext, Task::SummarizeExt, input).cloned()
    }

    fn summarize_abstractive(&self, input: &str) -> Result<String, BackendError> {
        Self::lookup(&self.summarize_abs, Task::SummarizeAbs, input).cloned()
    }
}

/// In-code fixture assembly for tests.
#[derive(Default)]
pub struct MockBuilder {
    generate: HashMap<String, String>,
    nli: HashMap<String, [f64; 3]>,
    annotate: HashMap<String, Annotation>,
    summarize_ext: HashMap<String, String>,
    summarize_abs: HashMap<String, String>,
    enabled: std::collections::BTreeSet<Task>,
}

impl MockBuilder {
    /// Enable a task with an empty table (useful for miss/error tests).
    pub fn enable(mut self, task: Task) -> Self {
        self.enabled.insert(task);
        self
    }

    pub fn generate(mut self, prompt: impl Into<String>, output: impl Into<String>) -> Self {
        self.generate.insert(prompt.into(), output.into());
        self.enabled.insert(Task::Generate);
        self
    }

    pub fn nli(mut self, input: impl Into<String>, logits: [f64; 3]) -> Self {
        self.nli.insert(input.into(), logits);
        self.enabled.insert(Task::Nli);
        self
    }

    pub fn annotate(mut self, text: impl Into<String>, ann: Annotation) -> Self {
        self.annotate.insert(text.into(), ann);
        self.enabled.insert(Task::Annotate);
        self
    }

    pub fn summarize_ext(mut self, input: impl Into<String>, output: impl Into<String>) -> Self {
        self.summarize_ext.insert(input.into(), output.into());
        self.enabled.insert(Task::SummarizeExt);
        self
    }

    pub fn summarize_abs(mut self, input: impl Into<String>, output: impl Into<String>) -> Self {
        self.summarize_abs.insert(input.into(), output.into());
        self.enabled.insert(Task::SummarizeAbs);
        self
    }

    pub fn build(self) -> MockBackend {
        let pick =
            |on: bool, map: HashMap<String, String>| if on { Some(map) } else { None };
        let nli = if self.enabled.contains(&Task::Nli) {
            Some(
                self.nli
                    .into_iter()
                    .map(|(k, v)| (k, NliLogits::new(v[0], v[1], v[2]).expect("finite logits")))
                    .collect(),
            )
        } else {
            None
        };
        MockBackend {
            caps: BackendCapabilities { supports: self.enabled.clone(), thread_safe: true },
            generate: pick(self.enabled.contains(&Task::Generate), self.generate),
            nli,
            annotate: if self.enabled.contains(&Task::Annotate) { Some(self.annotate) } else { None },
            summarize_ext: pick(self.enabled.contains(&Task::SummarizeExt), self.summarize_ext),
            summarize_abs: pick(self.enabled.contains(&Task::SummarizeAbs), self.summarize_abs),
        }
    }
}
