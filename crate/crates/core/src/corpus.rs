//! FEVER-style corpus ingestion and reproducible sampling.
//!
//! The on-disk format is JSON lines, one claim per line. Evidence is expected
//! pre-resolved to text: either a single `evidence_text` string or an
//! `evidence` list of sentence strings, which the loader joins with single
//! spaces in file order. Lines whose evidence is empty or missing are counted
//! as incomplete and dropped; structurally broken lines are collected as
//! per-line errors without aborting the load.

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, Write};
use std::path::Path;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Claim identifier. FEVER uses integers, other sources use strings; both are
/// carried as strings and compared verbatim.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
#[serde(transparent)]
pub struct ClaimId(pub String);

impl fmt::Display for ClaimId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for ClaimId {
    fn from(s: &str) -> Self {
        ClaimId(s.to_string())
    }
}

impl From<String> for ClaimId {
    fn from(s: String) -> Self {
        ClaimId(s)
    }
}

impl<'de> Deserialize<'de> for ClaimId {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct IdVisitor;
        impl Visitor<'_> for IdVisitor {
            type Value = ClaimId;
            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a string or integer id")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ClaimId, E> {
                Ok(ClaimId(v.to_string()))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<ClaimId, E> {
                Ok(ClaimId(v.to_string()))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<ClaimId, E> {
                Ok(ClaimId(v.to_string()))
            }
        }
        deserializer.deserialize_any(IdVisitor)
    }
}

/// Fact-check verdict attached to a claim.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "SUPPORTED", alias = "SUPPORTS")]
    Supported,
    #[serde(rename = "REFUTED", alias = "REFUTES")]
    Refuted,
    #[serde(rename = "NOTENOUGHINFO", alias = "NOT ENOUGH INFO", alias = "NOT_ENOUGH_INFO")]
    NotEnoughInfo,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::Supported => "SUPPORTED",
            Verdict::Refuted => "REFUTED",
            Verdict::NotEnoughInfo => "NOTENOUGHINFO",
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Verdict {
    type Err = CorpusError;

    /// Case-insensitive; accepts both FEVER spellings (`REFUTES`) and the
    /// canonical ones (`REFUTED`), with or without separators in
    /// "not enough info".
    fn from_str(s: &str) -> Result<Self, CorpusError> {
        let norm: String = s
            .chars()
            .filter(|c| !c.is_whitespace() && *c != '_' && *c != '-')
            .collect::<String>()
            .to_uppercase();
        match norm.as_str() {
            "SUPPORTED" | "SUPPORTS" => Ok(Verdict::Supported),
            "REFUTED" | "REFUTES" => Ok(Verdict::Refuted),
            "NOTENOUGHINFO" | "NEI" => Ok(Verdict::NotEnoughInfo),
            _ => Err(CorpusError::UnknownLabel(s.to_string())),
        }
    }
}

/// One claim with its verdict and resolved evidence.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClaimRecord {
    #[serde(rename = "id")]
    pub claim_id: ClaimId,
    pub claim: String,
    pub label: Verdict,
    pub evidence_text: String,
    #[serde(default = "default_evidence_count")]
    pub evidence_count: usize,
}

fn default_evidence_count() -> usize {
    1
}

/// Counters reported by [`load_corpus`]. `refuted` counts refuted records
/// actually emitted (i.e. after the incomplete-evidence drop).
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CorpusStats {
    pub total_read: usize,
    pub refuted: usize,
    pub dropped_incomplete: usize,
}

/// A structurally broken input line: bad JSON, unknown label, empty claim.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LineError {
    /// 1-based line number in the input file.
    pub line: usize,
    pub message: String,
}

/// Result of [`load_corpus`].
#[derive(Debug, Clone, Default)]
pub struct CorpusLoad {
    pub records: Vec<ClaimRecord>,
    pub stats: CorpusStats,
    pub line_errors: Vec<LineError>,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("cannot read corpus: {0}")]
    Io(#[from] std::io::Error),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("sample size {n} exceeds corpus size {len}")]
    SampleTooLarge { n: usize, len: usize },
    #[error("record {claim_id} is labeled {label}, expected REFUTED")]
    NotRefuted { claim_id: ClaimId, label: Verdict },
}

/// Loose per-line schema; `label` is parsed leniently afterwards.
#[derive(Deserialize)]
struct RawRecord {
    id: Option<ClaimId>,
    claim: String,
    label: String,
    #[serde(default)]
    evidence_text: Option<String>,
    #[serde(default)]
    evidence: Option<Vec<String>>,
    #[serde(default)]
    evidence_count: Option<usize>,
}

/// Load a JSON-lines corpus. `label_filter` keeps only records with that
/// verdict; completeness is judged after the filter, so `dropped_incomplete`
/// counts only filter-matching lines. Blank lines and lines starting with `#`
/// are skipped. Fails only when the file itself cannot be read; broken lines
/// are reported in `line_errors` and loading continues.
pub fn load_corpus(path: &Path, label_filter: Option<Verdict>) -> Result<CorpusLoad, CorpusError> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut out = CorpusLoad::default();

    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let raw: RawRecord = match serde_json::from_str(trimmed) {
            Ok(r) => r,
            Err(e) => {
                out.line_errors.push(LineError { line: lineno, message: format!("malformed JSON: {e}") });
                continue;
            }
        };
        let label = match raw.label.parse::<Verdict>() {
            Ok(l) => l,
            Err(_) => {
                out.line_errors
                    .push(LineError { line: lineno, message: format!("unknown label {:?}", raw.label) });
                continue;
            }
        };
        if raw.claim.trim().is_empty() {
            out.line_errors.push(LineError { line: lineno, message: "empty claim".to_string() });
            continue;
        }
        out.stats.total_read += 1;
        if let Some(filter) = label_filter {
            if label != filter {
                continue;
            }
        }
        let resolved = resolve_evidence(&raw);
        let Some((evidence_text, evidence_count)) = resolved else {
            out.stats.dropped_incomplete += 1;
            continue;
        };
        if label == Verdict::Refuted {
            out.stats.refuted += 1;
        }
        out.records.push(ClaimRecord {
            claim_id: raw.id.unwrap_or_else(|| ClaimId(format!("line-{lineno}"))),
            claim: raw.claim,
            label,
            evidence_text,
            evidence_count,
        });
    }
    Ok(out)
}

/// Join the evidence into one text. Returns `None` when there is nothing
/// usable (the "incomplete" drop criterion).
fn resolve_evidence(raw: &RawRecord) -> Option<(String, usize)> {
    if let Some(text) = &raw.evidence_text {
        if !text.trim().is_empty() {
            // an explicit count survives canonical round-trips
            return Some((text.clone(), raw.evidence_count.unwrap_or(1)));
        }
    }
    if let Some(list) = &raw.evidence {
        let kept: Vec<&str> = list.iter().map(|s| s.trim()).filter(|s| !s.is_empty()).collect();
        if !kept.is_empty() {
            return Some((kept.join(" "), kept.len()));
        }
    }
    None
}

/// Serialize records in the canonical JSON-lines form accepted back by
/// [`load_corpus`].
pub fn write_corpus<W: Write>(mut w: W, records: &[ClaimRecord]) -> std::io::Result<()> {
    for rec in records {
        serde_json::to_writer(&mut w, rec)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

/// Uniform sample without replacement, deterministic in `(records, n, seed)`.
/// Every record must already be labeled REFUTED.
pub fn sample_refuted(records: &[ClaimRecord], n: usize, seed: u64) -> Result<Vec<ClaimRecord>, CorpusError> {
    for rec in records {
        if rec.label != Verdict::Refuted {
            return Err(CorpusError::NotRefuted { claim_id: rec.claim_id.clone(), label: rec.label });
        }
    }
    if n > records.len() {
        return Err(CorpusError::SampleTooLarge { n, len: records.len() });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let picked = rand::seq::index::sample(&mut rng, records.len(), n);
    Ok(picked.iter().map(|i| records[i].clone()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;
    use std::io::Write as _;

    fn write_temp(lines: &[&str]) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        for l in lines {
            writeln!(f, "{l}").unwrap();
        }
        f
    }

    fn refuted(id: &str, claim: &str) -> ClaimRecord {
        ClaimRecord {
            claim_id: id.into(),
            claim: claim.to_string(),
            label: Verdict::Refuted,
            evidence_text: format!("Evidence for {id}."),
            evidence_count: 1,
        }
    }

    #[test]
    fn loads_filtering_and_dropping() {
        let f = write_temp(&[
            r#"{"id": 1, "claim": "A.", "label": "REFUTED", "evidence_text": "E1."}"#,
            r#"{"id": 2, "claim": "B.", "label": "REFUTED", "evidence_text": "  "}"#,
            r#"{"id": 3, "claim": "C.", "label": "SUPPORTED", "evidence_text": "E3."}"#,
        ]);
        let load = load_corpus(f.path(), Some(Verdict::Refuted)).unwrap();
        assert_eq!(load.records.len(), 1);
        assert_eq!(load.records[0].claim_id, ClaimId("1".into()));
        assert_eq!(load.stats.total_read, 3);
        assert_eq!(load.stats.refuted, 1);
        assert_eq!(load.stats.dropped_incomplete, 1);
        assert!(load.line_errors.is_empty());
    }

    #[test]
    fn empty_file_zero_stats() {
        let f = write_temp(&[]);
        let load = load_corpus(f.path(), None).unwrap();
        assert!(load.records.is_empty());
        assert_eq!(load.stats, CorpusStats::default());
    }

    #[test]
    fn three_line_fixture_one_incomplete() {
        let f = write_temp(&[
            r#"{"id": "a", "claim": "First.", "label": "REFUTES", "evidence": ["E1.", "E2."]}"#,
            r#"{"id": "b", "claim": "Second.", "label": "REFUTED"}"#,
            r#"{"id": "c", "claim": "Third.", "label": "REFUTED", "evidence_text": "E3."}"#,
        ]);
        let load = load_corpus(f.path(), Some(Verdict::Refuted)).unwrap();
        assert_eq!(load.records.len(), 2);
        assert_eq!(load.stats.dropped_incomplete, 1);
        assert_eq!(load.records[0].evidence_text, "E1. E2.");
        assert_eq!(load.records[0].evidence_count, 2);
    }

    #[test]
    fn malformed_lines_collected_not_fatal() {
        let f = write_temp(&[
            "not json at all",
            r#"{"id": 1, "claim": "Good.", "label": "REFUTED", "evidence_text": "E."}"#,
            r#"{"id": 2, "claim": "Bad label.", "label": "MAYBE", "evidence_text": "E."}"#,
            r#"{"id": 3, "claim": "   ", "label": "REFUTED", "evidence_text": "E."}"#,
        ]);
        let load = load_corpus(f.path(), None).unwrap();
        assert_eq!(load.records.len(), 1);
        let lines: Vec<usize> = load.line_errors.iter().map(|e| e.line).collect();
        assert_eq!(lines, vec![1, 3, 4]);
    }

    #[test]
    fn comments_and_blanks_skipped() {
        let f = write_temp(&[
            "# generated 2024-01-01",
            "",
            r#"{"id": 9, "claim": "X.", "label": "REFUTED", "evidence_text": "E."}"#,
        ]);
        let load = load_corpus(f.path(), None).unwrap();
        assert_eq!(load.records.len(), 1);
        assert!(load.line_errors.is_empty());
    }

    #[test]
    fn unreadable_path_is_fatal() {
        let err = load_corpus(Path::new("/nonexistent/nowhere.jsonl"), None);
        assert!(matches!(err, Err(CorpusError::Io(_))));
    }

    #[test]
    fn label_aliases_parse() {
        for (s, v) in [
            ("SUPPORTS", Verdict::Supported),
            ("supported", Verdict::Supported),
            ("REFUTES", Verdict::Refuted),
            ("refuted", Verdict::Refuted),
            ("NOT ENOUGH INFO", Verdict::NotEnoughInfo),
            ("NotEnoughInfo", Verdict::NotEnoughInfo),
        ] {
            assert_eq!(s.parse::<Verdict>().unwrap(), v, "{s}");
        }
        assert!("MAYBE".parse::<Verdict>().is_err());
    }

    #[test]
    fn round_trip_preserves_records() {
        let f = write_temp(&[
            r#"{"id": 4, "claim": "Two pieces.", "label": "REFUTED", "evidence": ["E1.", "E2.", "E3."]}"#,
            r#"{"id": "s-5", "claim": "One piece.", "label": "SUPPORTED", "evidence_text": "E."}"#,
        ]);
        let load = load_corpus(f.path(), None).unwrap();
        let mut buf = Vec::new();
        write_corpus(&mut buf, &load.records).unwrap();
        let f2 = tempfile::NamedTempFile::new().unwrap();
        std::fs::write(f2.path(), &buf).unwrap();
        let reloaded = load_corpus(f2.path(), None).unwrap();
        assert_eq!(reloaded.records, load.records);
        assert!(reloaded.line_errors.is_empty());
    }

    #[test]
    fn sample_is_deterministic_and_without_replacement() {
        let records: Vec<ClaimRecord> = (0..10).map(|i| refuted(&format!("r{i}"), "Claim.")).collect();
        let a = sample_refuted(&records, 4, 7).unwrap();
        let b = sample_refuted(&records, 4, 7).unwrap();
        assert_eq!(a, b);
        let ids: BTreeSet<_> = a.iter().map(|r| r.claim_id.clone()).collect();
        assert_eq!(ids.len(), 4);
    }

    #[test]
    fn exhaustive_sample_is_permutation() {
        let records: Vec<ClaimRecord> = (0..6).map(|i| refuted(&format!("r{i}"), "Claim.")).collect();
        let all = sample_refuted(&records, 6, 3).unwrap();
        let mut ids: Vec<_> = all.iter().map(|r| r.claim_id.0.clone()).collect();
        ids.sort();
        assert_eq!(ids, vec!["r0", "r1", "r2", "r3", "r4", "r5"]);
    }

    #[test]
    fn different_seeds_differ_somewhere() {
        let records: Vec<ClaimRecord> = (0..10).map(|i| refuted(&format!("r{i}"), "Claim.")).collect();
        let base = sample_refuted(&records, 4, 0).unwrap();
        let differs = (1..=5).any(|s| sample_refuted(&records, 4, s).unwrap() != base);
        assert!(differs, "five different seeds never changed the sample");
    }

    #[test]
    fn sample_rejects_bad_inputs() {
        let records = vec![refuted("r0", "Claim.")];
        assert!(matches!(
            sample_refuted(&records, 2, 0),
            Err(CorpusError::SampleTooLarge { n: 2, len: 1 })
        ));
        let mut sup = refuted("s0", "Claim.");
        sup.label = Verdict::Supported;
        assert!(matches!(sample_refuted(&[sup], 1, 0), Err(CorpusError::NotRefuted { .. })));
    }

    #[test]
    fn int_and_string_ids_both_load() {
        let f = write_temp(&[
            r#"{"id": 42, "claim": "Int id.", "label": "REFUTED", "evidence_text": "E."}"#,
            r#"{"id": "x-1", "claim": "Str id.", "label": "REFUTED", "evidence_text": "E."}"#,
            r#"{"claim": "No id.", "label": "REFUTED", "evidence_text": "E."}"#,
        ]);
        let load = load_corpus(f.path(), None).unwrap();
        let ids: Vec<&str> = load.records.iter().map(|r| r.claim_id.0.as_str()).collect();
        assert_eq!(ids, vec!["42", "x-1", "line-3"]);
    }
}
