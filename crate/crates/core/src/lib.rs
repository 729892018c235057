//! Counterfactual explanations for refuted claims.
//!
//! Given a claim that is contradicted by evidence, the pipeline in this crate
//! produces short natural-language explanations of the form "if the claim had
//! said X instead of Y, it would be correct". The stages are:
//!
//! 1. [`keyphrase`] — rank candidate keywords of the claim with a
//!    multipartite graph centrality measure.
//! 2. [`qagen`] — generate one question per keyword and answer each question
//!    from the evidence.
//! 3. [`entailment`] — score every answer against the claim with an NLI model
//!    and keep the most contradictory one.
//! 4. [`explain`] — turn the winning question/answer pair into a declarative
//!    sentence and render up to three counterfactual templates (affirmative,
//!    negative, and mixed).
//!
//! Model calls go through the [`backends::Backend`] trait, so the whole
//! pipeline runs either against live HTTP endpoints or against deterministic
//! fixture tables ([`backends::MockBackend`]) for tests. [`baselines`] holds
//! two summarization baselines, and [`evaluate`] the error-annotation and
//! survey statistics used to compare systems.

pub mod backends;
pub mod baselines;
pub mod corpus;
pub mod diag;
pub mod entailment;
pub mod evaluate;
pub mod explain;
pub mod keyphrase;
pub mod qagen;
pub mod stem;
pub mod text;

pub use backends::{Backend, BackendError, BackendSet, MockBackend, RemoteBackend, Task};
pub use corpus::{ClaimId, ClaimRecord, CorpusStats, Verdict};
pub use explain::{ExplanationBundle, ExplanationRecord, Form, FormSet, Pipeline};
