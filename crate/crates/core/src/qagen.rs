//! Question generation and answering.
//!
//! One question per keyword, generated from a fixed prompt format, then
//! deduplicated; each surviving question is answered from the evidence.
//! Individual keyword/question failures degrade to warnings so partial
//! pipelines still emit explanations; only a fully empty result is a stage
//! error.

use thiserror::Error;

use crate::backends::{Backend, BackendError, GenerationRequest};
use crate::diag::{Diagnostic, Stage};
use crate::text::{capitalize_first, normalize_ws};

/// Token budget for every generation call.
pub const MAX_GENERATION_LENGTH: usize = 256;

/// A question tied to the keyword that seeded it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GeneratedQuestion {
    pub keyword: String,
    pub question: String,
}

/// A question, its answer, and the keyword that seeded it. `index` is the
/// position within the claim's answer set.
#[derive(Debug, Clone, PartialEq)]
pub struct QAPair {
    pub keyword: String,
    pub question: String,
    pub answer: String,
    pub index: usize,
}

#[derive(Debug, Error)]
pub enum QagenError {
    #[error("keyword is empty")]
    EmptyKeyword,
    #[error("question is empty")]
    EmptyQuestion,
    #[error("evidence is empty")]
    EmptyEvidence,
    #[error("no keywords to generate questions from")]
    NoKeywords,
    #[error("no questions survived generation ({failed} failed)")]
    NoQuestions { failed: usize },
    #[error("no answers survived generation ({failed} failed or empty)")]
    NoAnswers { failed: usize },
}

/// Question-generation prompt: `context: {claim} answer: {keyword} </s>`.
pub fn make_qg_prompt(claim: &str, keyword: &str) -> Result<String, QagenError> {
    if keyword.trim().is_empty() {
        return Err(QagenError::EmptyKeyword);
    }
    Ok(format!("context: {claim} answer: {keyword} </s>"))
}

/// Question-answering prompt: `question: {question} <s> context: {evidence} </s>`.
pub fn make_qa_prompt(question: &str, evidence: &str) -> Result<String, QagenError> {
    if question.trim().is_empty() {
        return Err(QagenError::EmptyQuestion);
    }
    if evidence.trim().is_empty() {
        return Err(QagenError::EmptyEvidence);
    }
    Ok(format!("question: {question} <s> context: {evidence} </s>"))
}

/// Generate one question per keyword, in rank order, then drop duplicates
/// (case-insensitive, whitespace-collapsed exact match, first occurrence
/// kept). Per-keyword backend failures are recorded and skipped; zero
/// surviving questions is an error.
pub fn generate_questions(
    claim: &str,
    keywords: &[String],
    backend: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<GeneratedQuestion>, QagenError> {
    if keywords.is_empty() {
        return Err(QagenError::NoKeywords);
    }
    let mut out: Vec<GeneratedQuestion> = Vec::new();
    let mut seen = std::collections::HashSet::new();
    let mut failed = 0usize;
    for keyword in keywords {
        let question = match question_for_keyword(claim, keyword, backend) {
            Ok(q) => q,
            Err(e) => {
                failed += 1;
                diagnostics.push(Diagnostic::warning(
                    Stage::QuestionGen,
                    format!("keyword {keyword:?} skipped: {e}"),
                ));
                continue;
            }
        };
        if seen.insert(normalize_ws(&question).to_lowercase()) {
            out.push(GeneratedQuestion { keyword: keyword.clone(), question });
        }
    }
    if out.is_empty() {
        return Err(QagenError::NoQuestions { failed });
    }
    Ok(out)
}

fn question_for_keyword(
    claim: &str,
    keyword: &str,
    backend: &dyn Backend,
) -> Result<String, QuestionFailure> {
    let prompt = make_qg_prompt(claim, keyword)?;
    let request =
        GenerationRequest::greedy(prompt, MAX_GENERATION_LENGTH).expect("positive budget");
    let raw = backend.generate(&request)?;
    let question = raw.trim().to_string();
    if question.is_empty() {
        return Err(QuestionFailure::Empty);
    }
    Ok(question)
}

#[derive(Debug, Error)]
enum QuestionFailure {
    #[error(transparent)]
    Prompt(#[from] QagenError),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("model returned an empty question")]
    Empty,
}

/// Answer every question from the evidence. Answers are trimmed, then the
/// first character is upper-cased; empty answers and per-question backend
/// failures are dropped with a warning. Zero surviving answers is an error.
pub fn generate_answers(
    questions: &[GeneratedQuestion],
    evidence: &str,
    backend: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> Result<Vec<QAPair>, QagenError> {
    let mut out: Vec<QAPair> = Vec::new();
    let mut failed = 0usize;
    for gq in questions {
        let prompt = make_qa_prompt(&gq.question, evidence)?;
        let request =
            GenerationRequest::greedy(prompt, MAX_GENERATION_LENGTH).expect("positive budget");
        let raw = match backend.generate(&request) {
            Ok(r) => r,
            Err(e) => {
                failed += 1;
                diagnostics.push(Diagnostic::warning(
                    Stage::AnswerGen,
                    format!("question {:?} failed: {e}", gq.question),
                ));
                continue;
            }
        };
        let trimmed = raw.trim();
        if trimmed.is_empty() {
            failed += 1;
            diagnostics.push(Diagnostic::warning(
                Stage::AnswerGen,
                format!("question {:?} produced an empty answer; dropped", gq.question),
            ));
            continue;
        }
        out.push(QAPair {
            keyword: gq.keyword.clone(),
            question: gq.question.clone(),
            answer: capitalize_first(trimmed),
            index: out.len(),
        });
    }
    if out.is_empty() {
        return Err(QagenError::NoAnswers { failed });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::backends::MockBackend;

    #[test]
    fn qg_prompt_is_byte_exact() {
        let p = make_qg_prompt("Black Panther is exclusively a comic book.", "exclusively").unwrap();
        assert_eq!(p, "context: Black Panther is exclusively a comic book. answer: exclusively </s>");
    }

    #[test]
    fn qg_prompt_keyword_equal_to_claim_is_fine() {
        let p = make_qg_prompt("Short claim.", "Short claim.").unwrap();
        assert_eq!(p, "context: Short claim. answer: Short claim. </s>");
    }

    #[test]
    fn qg_prompt_contains_inputs_verbatim() {
        let claim = "A strange   claim with  spacing.";
        let keyword = "strange   claim";
        let p = make_qg_prompt(claim, keyword).unwrap();
        assert!(p.contains(claim));
        assert!(p.contains(keyword));
        assert!(make_qg_prompt(claim, "  ").is_err());
    }

    #[test]
    fn qa_prompt_is_byte_exact() {
        let p = make_qa_prompt("Where is Stranger Things set?", "The evidence.").unwrap();
        assert_eq!(p, "question: Where is Stranger Things set? <s> context: The evidence. </s>");
    }

    #[test]
    fn qa_prompt_preserves_newlines() {
        let evidence = "Line one.\nLine two.";
        let p = make_qa_prompt("Q?", evidence).unwrap();
        assert!(p.contains(evidence));
        assert!(make_qa_prompt("Q?", " \n ").is_err());
        assert!(make_qa_prompt("", "E.").is_err());
    }

    #[test]
    fn questions_generated_in_rank_order_and_deduped() {
        let claim = "C.";
        let mock = MockBackend::builder()
            .generate("context: C. answer: k1 </s>", "What is it?")
            .generate("context: C. answer: k2 </s>", "  what   is it? ")
            .generate("context: C. answer: k3 </s>", "Where is it?")
            .build();
        let mut diags = Vec::new();
        let qs = generate_questions(
            claim,
            &["k1".into(), "k2".into(), "k3".into()],
            &mock,
            &mut diags,
        )
        .unwrap();
        // k2's question is a case/whitespace duplicate of k1's
        assert_eq!(qs.len(), 2);
        assert_eq!(qs[0].keyword, "k1");
        assert_eq!(qs[0].question, "What is it?");
        assert_eq!(qs[1].question, "Where is it?");
        assert!(diags.is_empty());
    }

    #[test]
    fn failed_keyword_skipped_with_warning() {
        let mock = MockBackend::builder()
            .generate("context: C. answer: good </s>", "A question?")
            .build();
        let mut diags = Vec::new();
        let qs = generate_questions(
            "C.",
            &["missing".into(), "good".into()],
            &mock,
            &mut diags,
        )
        .unwrap();
        assert_eq!(qs.len(), 1);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].stage, Stage::QuestionGen);
        assert!(diags[0].message.contains("missing"));
    }

    #[test]
    fn no_keywords_is_stage_error() {
        let mock = MockBackend::builder().enable(crate::backends::Task::Generate).build();
        let mut diags = Vec::new();
        assert!(matches!(
            generate_questions("C.", &[], &mock, &mut diags),
            Err(QagenError::NoKeywords)
        ));
    }

    #[test]
    fn all_keywords_failing_is_stage_error() {
        let mock = MockBackend::builder().enable(crate::backends::Task::Generate).build();
        let mut diags = Vec::new();
        let err = generate_questions("C.", &["a".into(), "b".into()], &mock, &mut diags);
        assert!(matches!(err, Err(QagenError::NoQuestions { failed: 2 })));
        assert_eq!(diags.len(), 2);
    }

    #[test]
    fn answers_trimmed_and_capitalized() {
        let q = GeneratedQuestion { keyword: "k".into(), question: "Q?".into() };
        let mock = MockBackend::builder()
            .generate("question: Q? <s> context: E. </s>", "  hawkins, Indiana. ")
            .build();
        let mut diags = Vec::new();
        let answers = generate_answers(&[q], "E.", &mock, &mut diags).unwrap();
        assert_eq!(answers.len(), 1);
        assert_eq!(answers[0].answer, "Hawkins, Indiana.");
        assert_eq!(answers[0].index, 0);
    }

    #[test]
    fn already_capitalized_answer_untouched() {
        let q = GeneratedQuestion { keyword: "k".into(), question: "Q?".into() };
        let mock = MockBackend::builder()
            .generate("question: Q? <s> context: E. </s>", "Tenfold")
            .build();
        let mut diags = Vec::new();
        let answers = generate_answers(&[q], "E.", &mock, &mut diags).unwrap();
        assert_eq!(answers[0].answer, "Tenfold");
    }

    #[test]
    fn blank_answer_dropped_with_warning() {
        let qs = vec![
            GeneratedQuestion { keyword: "k1".into(), question: "Q1?".into() },
            GeneratedQuestion { keyword: "k2".into(), question: "Q2?".into() },
        ];
        let mock = MockBackend::builder()
            .generate("question: Q1? <s> context: E. </s>", "   ")
            .generate("question: Q2? <s> context: E. </s>", "real answer")
            .build();
        let mut diags = Vec::new();
        let answers = generate_answers(&qs, "E.", &mock, &mut diags).unwrap();
        assert_eq!(answers.len(), 1);
        assert_eq!(answers[0].answer, "Real answer");
        assert_eq!(answers[0].index, 0);
        assert_eq!(diags.len(), 1);
        assert_eq!(diags[0].stage, Stage::AnswerGen);
    }

    #[test]
    fn all_answers_failing_is_stage_error() {
        let qs = vec![GeneratedQuestion { keyword: "k".into(), question: "Q?".into() }];
        let mock = MockBackend::builder().enable(crate::backends::Task::Generate).build();
        let mut diags = Vec::new();
        assert!(matches!(
            generate_answers(&qs, "E.", &mock, &mut diags),
            Err(QagenError::NoAnswers { failed: 1 })
        ));
    }

    #[test]
    fn dedup_is_idempotent() {
        let claim = "C.";
        let mock = MockBackend::builder()
            .generate("context: C. answer: k1 </s>", "One?")
            .generate("context: C. answer: k2 </s>", "one?")
            .generate("context: C. answer: One? </s>", "One?")
            .generate("context: C. answer: one? </s>", "one?")
            .build();
        let mut diags = Vec::new();
        let first =
            generate_questions(claim, &["k1".into(), "k2".into()], &mock, &mut diags).unwrap();
        let again_keywords: Vec<String> = first.iter().map(|q| q.question.clone()).collect();
        let second = generate_questions(claim, &again_keywords, &mock, &mut diags).unwrap();
        assert_eq!(second.len(), first.len());
    }
}
