//! Regenerates the committed demo fixtures under `fixtures/`:
//!
//! - `fixtures/demo/mock.json` — fixture tables for every backend task,
//!   covering two refuted claims end to end (keywords → questions → answers
//!   → NLI → declarative → renders) plus both summarization baselines;
//! - `fixtures/demo/corpus.jsonl` — the matching two-claim corpus;
//! - `fixtures/stats/annotations.csv` — a 500-record error-annotation batch
//!   (350 valid, 150 categorized errors);
//! - `fixtures/stats/survey.csv` — a deterministic synthetic selection
//!   survey over the three counterfactual forms, including two rows that
//!   must be excluded (best == worst).
//!
//! Run from anywhere inside the workspace:
//!
//! ```text
//! cargo run -p counterfact --example gen_demo_fixtures
//! ```
//!
//! Output is deterministic (sorted keys, no timestamps), so reruns are
//! byte-stable and `git diff` shows real changes only.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use counterfact::backends::{
    annotation_to_wire, Annotation, EntitySpan, PosTag, SentenceAnnotation, TokenAnnotation,
    WireToken,
};
use counterfact::corpus::{write_corpus, ClaimId, ClaimRecord, Verdict};

const CLAIM_1: &str = "Black Panther is exclusively a comic book.";
const EVIDENCE_1: &str = "Black Panther is an upcoming American superhero film based on the \
                          Marvel Comics character of the same name. Black Panther is set to be \
                          released in the United States on February 16, 2018, in IMAX.";
const DECLARATIVE_1: &str = "Black panther is an upcoming American superhero film based on the \
                             marvel comics character of the same name.";

const CLAIM_2: &str = "LGBT is not an acronym containing the word lesbian.";
const EVIDENCE_2: &str = "LGBT is an initialism that stands for lesbian, gay, bisexual, and \
                          transgender. The initialism, LGBT, is intended to emphasize a \
                          diversity of sexuality and gender identity-based cultures.";
const DECLARATIVE_2: &str = "LGBT is an initialism that stands for lesbian, gay, bisexual, and \
                             transgender.";

const ANSWER_1_BEST: &str =
    "An upcoming American superhero film based on the marvel comics character of the same name.";
const ANSWER_2_BEST: &str =
    "An initialism that stands for lesbian, gay, bisexual, and transgender.";

const EXT_1: &str =
    "Black Panther is set to be released in the United States on February 16, 2018, in IMAX.";
const ABS_1: &str = "Black Panther is an upcoming American superhero film based on the Marvel \
                     Comics character of the same name.";
const EXT_2: &str = "The initialism, LGBT, is intended to emphasize a diversity of sexuality \
                     and gender identity-based cultures.";
const ABS_2: &str = "It is an adaptation of the initialism LGB, which was used to replace the \
                     term gay in reference to the LGBT community.";

/// Build a one-sentence annotation; mirrors the golden test helper.
fn ann(
    spec: &[(&str, PosTag)],
    root: usize,
    nsubj: Option<usize>,
    entities: &[(&str, usize, usize)],
) -> Annotation {
    let tokens = spec
        .iter()
        .enumerate()
        .map(|(i, (text, pos))| TokenAnnotation {
            text: text.to_string(),
            pos: *pos,
            lemma: text.to_lowercase(),
            dep: if i == root {
                "ROOT".to_string()
            } else if Some(i) == nsubj {
                "nsubj".to_string()
            } else {
                "dep".to_string()
            },
            head_index: root,
            is_sent_root: i == root,
        })
        .collect();
    Annotation {
        sentences: vec![SentenceAnnotation { tokens }],
        entities: entities
            .iter()
            .map(|(text, start, end)| EntitySpan {
                text: text.to_string(),
                sentence: 0,
                start: *start,
                end: *end,
            })
            .collect(),
    }
}

use PosTag::{Adj, Adp, Adv, Aux, Cconj, Det, Noun, Part, Pron, Propn, Punct, Verb};

fn claim_1_annotation() -> Annotation {
    ann(
        &[
            ("Black", Propn),
            ("Panther", Propn),
            ("is", Aux),
            ("exclusively", Adv),
            ("a", Det),
            ("comic", Adj),
            ("book", Noun),
            (".", Punct),
        ],
        6,
        Some(1),
        &[("Black Panther", 0, 2)],
    )
}

fn statement_1_tokens() -> Vec<(&'static str, PosTag)> {
    vec![
        ("Black", Propn),
        ("panther", Propn),
        ("is", Aux),
        ("an", Det),
        ("upcoming", Adj),
        ("American", Adj),
        ("superhero", Noun),
        ("film", Noun),
        ("based", Verb),
        ("on", Adp),
        ("the", Det),
        ("marvel", Propn),
        ("comics", Propn),
        ("character", Noun),
        ("of", Adp),
        ("the", Det),
        ("same", Adj),
        ("name", Noun),
    ]
}

fn claim_2_annotation() -> Annotation {
    ann(
        &[
            ("LGBT", Propn),
            ("is", Aux),
            ("not", Part),
            ("an", Det),
            ("acronym", Noun),
            ("containing", Verb),
            ("the", Det),
            ("word", Noun),
            ("lesbian", Noun),
            (".", Punct),
        ],
        4,
        Some(0),
        &[("LGBT", 0, 1)],
    )
}

fn statement_2_tokens() -> Vec<(&'static str, PosTag)> {
    vec![
        ("LGBT", Propn),
        ("is", Aux),
        ("an", Det),
        ("initialism", Noun),
        ("that", Pron),
        ("stands", Verb),
        ("for", Adp),
        ("lesbian", Noun),
        (",", Punct),
        ("gay", Adj),
        (",", Punct),
        ("bisexual", Adj),
        (",", Punct),
        ("and", Cconj),
        ("transgender", Noun),
    ]
}

fn with_period(mut tokens: Vec<(&'static str, PosTag)>) -> Vec<(&'static str, PosTag)> {
    tokens.push((".", Punct));
    tokens
}

fn answer_1_annotation() -> Annotation {
    let mut tokens = with_period(statement_1_tokens()[3..].to_vec());
    tokens[0] = ("An", Det);
    ann(&tokens, 4, None, &[])
}

fn answer_2_annotation() -> Annotation {
    let mut tokens = with_period(statement_2_tokens()[2..].to_vec());
    tokens[0] = ("An", Det);
    ann(&tokens, 1, None, &[])
}

#[derive(Default, serde::Serialize)]
struct Tables {
    generate: BTreeMap<String, String>,
    nli: BTreeMap<String, [f64; 3]>,
    annotate: BTreeMap<String, Vec<WireToken>>,
    summarize_ext: BTreeMap<String, String>,
    summarize_abs: BTreeMap<String, String>,
}

fn build_tables() -> Tables {
    let q1a = "What is set to be released in the United States on February 16, 2018?";
    let q1b = "What is Black Panther?";
    let q2a = "What is LGBT?";
    let q2b = "What does LGBT stand for?";
    let q2c = "What does the L in LGBT refer to?";
    let declarative_1_stripped = &DECLARATIVE_1[..DECLARATIVE_1.len() - 1];
    let declarative_2_stripped = &DECLARATIVE_2[..DECLARATIVE_2.len() - 1];

    let mut t = Tables::default();
    let mut annotate = |text: &str, a: Annotation| {
        t.annotate.insert(text.to_string(), annotation_to_wire(&a));
    };
    annotate(CLAIM_1, claim_1_annotation());
    annotate(CLAIM_2, claim_2_annotation());
    annotate(
        declarative_1_stripped,
        ann(&statement_1_tokens(), 7, Some(1), &[("Black panther", 0, 2)]),
    );
    annotate(
        DECLARATIVE_1,
        ann(&with_period(statement_1_tokens()), 7, Some(1), &[("Black panther", 0, 2)]),
    );
    annotate(
        declarative_2_stripped,
        ann(&statement_2_tokens(), 3, Some(0), &[("LGBT", 0, 1)]),
    );
    annotate(
        DECLARATIVE_2,
        ann(&with_period(statement_2_tokens()), 3, Some(0), &[("LGBT", 0, 1)]),
    );
    annotate(ANSWER_1_BEST, answer_1_annotation());
    annotate(ANSWER_2_BEST, answer_2_annotation());

    let gen: [(String, &str); 12] = [
        (format!("context: {CLAIM_1} answer: Black Panther </s>"), q1a),
        (format!("context: {CLAIM_1} answer: exclusively a comic book </s>"), q1b),
        (format!("context: {CLAIM_2} answer: LGBT </s>"), q2b),
        (format!("context: {CLAIM_2} answer: an acronym </s>"), q2a),
        (format!("context: {CLAIM_2} answer: the word lesbian </s>"), q2c),
        (format!("question: {q1a} <s> context: {EVIDENCE_1} </s>"), "Black Panther."),
        (format!("question: {q1b} <s> context: {EVIDENCE_1} </s>"), ANSWER_1_BEST),
        (format!("question: {q2a} <s> context: {EVIDENCE_2} </s>"), "An initialism."),
        (format!("question: {q2b} <s> context: {EVIDENCE_2} </s>"), ANSWER_2_BEST),
        (format!("question: {q2c} <s> context: {EVIDENCE_2} </s>"), "Lesbian."),
        (
            format!("{q1b} [SEP] {ANSWER_1_BEST}"),
            "black panther is an upcoming American superhero film based on the marvel \
             comics character of the same name.",
        ),
        (format!("{q2b} [SEP] {ANSWER_2_BEST}"), DECLARATIVE_2),
    ];
    for (prompt, output) in gen {
        t.generate.insert(prompt, output.to_string());
    }

    let nli: [(String, [f64; 3]); 5] = [
        (format!("{CLAIM_1}</s></s>Black Panther."), [0.2, 1.1, 2.5]),
        (format!("{CLAIM_1}</s></s>{ANSWER_1_BEST}"), [4.8, 0.3, 0.4]),
        (format!("{CLAIM_2}</s></s>An initialism."), [2.0, 1.0, 0.5]),
        (format!("{CLAIM_2}</s></s>{ANSWER_2_BEST}"), [5.1, 0.2, 0.3]),
        (format!("{CLAIM_2}</s></s>Lesbian."), [0.1, 2.2, 0.9]),
    ];
    for (input, logits) in nli {
        t.nli.insert(input, logits);
    }

    t.summarize_ext.insert(EVIDENCE_1.to_string(), EXT_1.to_string());
    t.summarize_ext.insert(EVIDENCE_2.to_string(), EXT_2.to_string());
    t.summarize_abs.insert(EVIDENCE_1.to_string(), ABS_1.to_string());
    t.summarize_abs.insert(EVIDENCE_2.to_string(), ABS_2.to_string());
    t
}

fn demo_corpus() -> Vec<ClaimRecord> {
    vec![
        ClaimRecord {
            claim_id: ClaimId("75397".to_string()),
            claim: CLAIM_1.to_string(),
            label: Verdict::Refuted,
            evidence_text: EVIDENCE_1.to_string(),
            evidence_count: 2,
        },
        ClaimRecord {
            claim_id: ClaimId("229349".to_string()),
            claim: CLAIM_2.to_string(),
            label: Verdict::Refuted,
            evidence_text: EVIDENCE_2.to_string(),
            evidence_count: 2,
        },
    ]
}

/// 500 annotation rows: 350 valid, then the five error categories.
fn annotations_csv() -> String {
    let mut out = String::from("claim_id,verdict,category\n");
    let mut id = 0usize;
    let mut push = |out: &mut String, verdict: &str, category: &str, n: usize| {
        for _ in 0..n {
            id += 1;
            writeln!(out, "c{id:03},{verdict},{category}").expect("write to string");
        }
    };
    push(&mut out, "valid", "", 350);
    push(&mut out, "error", "ANSWER_NOT_PICKED", 25);
    push(&mut out, "error", "WRONG_GRAMMAR", 9);
    push(&mut out, "error", "WRONG_QA", 74);
    push(&mut out, "error", "WRONG_CLAIM_LABEL", 6);
    push(&mut out, "error", "INSUFFICIENT_EVIDENCE", 36);
    out
}

/// Deterministic synthetic survey: 60 usable rows over the three forms plus
/// two rows that name the same option as best and worst (excluded on load).
fn survey_csv() -> String {
    let options = ["CF-A", "CF-N", "CF-M"];
    let perceived = ["true", "false", "unsure"];
    let mut out = String::from("participant_id,claim_id,familiar,perceived,best,worst\n");
    for i in 0..60usize {
        let best = if i < 30 {
            "CF-A"
        } else if i < 48 {
            "CF-N"
        } else {
            "CF-M"
        };
        // worst: the later-cycling of the two remaining options
        let worst = options
            .iter()
            .copied()
            .filter(|&o| o != best)
            .nth(i % 2)
            .expect("two non-best options");
        writeln!(
            out,
            "p{:02},q{:02},{},{},{best},{worst}",
            i / 3,
            i % 10,
            i % 2 == 0,
            perceived[i % 3],
        )
        .expect("write to string");
    }
    // self-contradictory rows: excluded (best == worst)
    out.push_str("p90,q00,true,true,CF-A,CF-A\n");
    out.push_str("p91,q01,false,unsure,CF-N,CF-N\n");
    out
}

fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .parent()
        .and_then(Path::parent)
        .expect("crates/core has a workspace root")
        .to_path_buf()
}

fn write(path: &Path, bytes: &[u8]) {
    std::fs::create_dir_all(path.parent().expect("fixture paths have parents"))
        .expect("create fixture dir");
    std::fs::write(path, bytes).expect("write fixture");
    println!("wrote {}", path.display());
}

fn main() {
    let root = workspace_root();

    let mut mock = serde_json::to_string_pretty(&build_tables()).expect("serialize tables");
    mock.push('\n');
    write(&root.join("fixtures/demo/mock.json"), mock.as_bytes());

    let mut corpus = Vec::new();
    write_corpus(&mut corpus, &demo_corpus()).expect("serialize corpus");
    write(&root.join("fixtures/demo/corpus.jsonl"), &corpus);

    write(&root.join("fixtures/stats/annotations.csv"), annotations_csv().as_bytes());
    write(&root.join("fixtures/stats/survey.csv"), survey_csv().as_bytes());
}
