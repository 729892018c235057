//! Linguistic annotation structures returned by ANNOTATE backends.
//!
//! Tokens carry universal POS tags plus a dependency arc (head index and
//! relation label, sentence-relative) and arrive grouped into sentences.
//! Named entities are reported as an auxiliary span list. On the wire an
//! annotation is a flat token array; [`annotation_from_wire`] regroups and
//! validates it.

use serde::{Deserialize, Serialize};

use super::BackendError;

/// Universal POS tag set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "UPPERCASE")]
pub enum PosTag {
    Adj,
    Adp,
    Adv,
    Aux,
    Cconj,
    Det,
    Intj,
    Noun,
    Num,
    Part,
    Pron,
    Propn,
    Punct,
    Sconj,
    Sym,
    Verb,
    X,
}

impl PosTag {
    pub fn as_str(self) -> &'static str {
        match self {
            PosTag::Adj => "ADJ",
            PosTag::Adp => "ADP",
            PosTag::Adv => "ADV",
            PosTag::Aux => "AUX",
            PosTag::Cconj => "CCONJ",
            PosTag::Det => "DET",
            PosTag::Intj => "INTJ",
            PosTag::Noun => "NOUN",
            PosTag::Num => "NUM",
            PosTag::Part => "PART",
            PosTag::Pron => "PRON",
            PosTag::Propn => "PROPN",
            PosTag::Punct => "PUNCT",
            PosTag::Sconj => "SCONJ",
            PosTag::Sym => "SYM",
            PosTag::Verb => "VERB",
            PosTag::X => "X",
        }
    }

    /// Verb or auxiliary — what counts as a "verbal" root for the
    /// sentence-completeness check.
    pub fn is_verbal(self) -> bool {
        matches!(self, PosTag::Verb | PosTag::Aux)
    }
}

impl std::fmt::Display for PosTag {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One token, sentence-relative: `head_index` points into the owning
/// sentence's token vector.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenAnnotation {
    pub text: String,
    pub pos: PosTag,
    pub lemma: String,
    pub dep: String,
    pub head_index: usize,
    pub is_sent_root: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SentenceAnnotation {
    pub tokens: Vec<TokenAnnotation>,
}

/// Named-entity span: token range `[start, end)` inside sentence `sentence`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntitySpan {
    pub text: String,
    pub sentence: usize,
    pub start: usize,
    pub end: usize,
}

/// Full annotation of one input text.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Annotation {
    pub sentences: Vec<SentenceAnnotation>,
    pub entities: Vec<EntitySpan>,
}

impl Annotation {
    pub fn empty() -> Self {
        Annotation::default()
    }

    pub fn is_empty(&self) -> bool {
        self.sentences.iter().all(|s| s.tokens.is_empty())
    }

    /// All tokens in reading order, across sentences.
    pub fn tokens(&self) -> impl Iterator<Item = &TokenAnnotation> {
        self.sentences.iter().flat_map(|s| s.tokens.iter())
    }

    /// Entity surface strings in reading order.
    pub fn entity_texts(&self) -> impl Iterator<Item = &str> {
        self.entities.iter().map(|e| e.text.as_str())
    }

    /// Check the structural invariants: one dependency root per non-empty
    /// sentence, heads in bounds, entity spans in bounds.
    pub fn validate(&self) -> Result<(), BackendError> {
        for (si, sent) in self.sentences.iter().enumerate() {
            if sent.tokens.is_empty() {
                return Err(BackendError::Annotation(format!("sentence {si} has no tokens")));
            }
            let roots = sent.tokens.iter().filter(|t| t.is_sent_root).count();
            if roots != 1 {
                return Err(BackendError::Annotation(format!(
                    "sentence {si} has {roots} roots, expected exactly 1"
                )));
            }
            for (ti, tok) in sent.tokens.iter().enumerate() {
                if tok.head_index >= sent.tokens.len() {
                    return Err(BackendError::Annotation(format!(
                        "sentence {si} token {ti}: head {} out of bounds",
                        tok.head_index
                    )));
                }
            }
        }
        for (ei, ent) in self.entities.iter().enumerate() {
            let len = self
                .sentences
                .get(ent.sentence)
                .map(|s| s.tokens.len())
                .ok_or_else(|| BackendError::Annotation(format!("entity {ei}: bad sentence index")))?;
            if ent.start >= ent.end || ent.end > len {
                return Err(BackendError::Annotation(format!(
                    "entity {ei}: span {}..{} out of bounds",
                    ent.start, ent.end
                )));
            }
        }
        Ok(())
    }
}

fn default_dep() -> String {
    "dep".to_string()
}

fn default_ent() -> String {
    "O".to_string()
}

/// Flat wire form of one token. Fixture files may use the short aliases
/// (`head`, `root`, `sent`, `ent`) and omit any defaulted field.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WireToken {
    pub text: String,
    pub pos: PosTag,
    #[serde(default)]
    pub lemma: String,
    #[serde(default = "default_dep")]
    pub dep: String,
    #[serde(default, alias = "head")]
    pub head_index: usize,
    #[serde(default, alias = "root")]
    pub is_sent_root: bool,
    #[serde(default, alias = "sent")]
    pub sent_index: usize,
    /// IOB2 entity tag: `O`, `B-<label>` or `I-<label>`.
    #[serde(default = "default_ent", alias = "ent")]
    pub ent_iob: String,
}

/// Regroup a flat wire token list into sentences, rebuild entity spans from
/// IOB tags, and validate. An empty lemma defaults to the lower-cased text.
pub fn annotation_from_wire(tokens: Vec<WireToken>) -> Result<Annotation, BackendError> {
    let mut ann = Annotation::default();
    for (i, wt) in tokens.into_iter().enumerate() {
        if wt.sent_index < ann.sentences.len().saturating_sub(1) {
            return Err(BackendError::Annotation(format!(
                "token {i}: sentence index {} goes backwards",
                wt.sent_index
            )));
        }
        while ann.sentences.len() <= wt.sent_index {
            ann.sentences.push(SentenceAnnotation::default());
        }
        let sent = wt.sent_index;
        let tok_idx = ann.sentences[sent].tokens.len();

        match wt.ent_iob.as_str() {
            "O" => {}
            tag if tag.starts_with("B-") => {
                ann.entities.push(EntitySpan {
                    text: wt.text.clone(),
                    sentence: sent,
                    start: tok_idx,
                    end: tok_idx + 1,
                });
            }
            tag if tag.starts_with("I-") => {
                let cont = ann
                    .entities
                    .last_mut()
                    .filter(|e| e.sentence == sent && e.end == tok_idx);
                match cont {
                    Some(e) => {
                        e.text.push(' ');
                        e.text.push_str(&wt.text);
                        e.end += 1;
                    }
                    None => {
                        return Err(BackendError::Annotation(format!(
                            "token {i}: I- tag without a preceding entity"
                        )))
                    }
                }
            }
            other => {
                return Err(BackendError::Annotation(format!("token {i}: bad entity tag {other:?}")))
            }
        }

        let lemma = if wt.lemma.is_empty() { wt.text.to_lowercase() } else { wt.lemma };
        ann.sentences[sent].tokens.push(TokenAnnotation {
            text: wt.text,
            pos: wt.pos,
            lemma,
            dep: wt.dep,
            head_index: wt.head_index,
            is_sent_root: wt.is_sent_root,
        });
    }
    ann.validate()?;
    Ok(ann)
}

/// Inverse of [`annotation_from_wire`]; entity spans become IOB2 tags.
pub fn annotation_to_wire(ann: &Annotation) -> Vec<WireToken> {
    let mut out = Vec::new();
    for (si, sent) in ann.sentences.iter().enumerate() {
        for (ti, tok) in sent.tokens.iter().enumerate() {
            let ent_iob = ann
                .entities
                .iter()
                .find(|e| e.sentence == si && (e.start..e.end).contains(&ti))
                .map(|e| if e.start == ti { "B-ENT".to_string() } else { "I-ENT".to_string() })
                .unwrap_or_else(default_ent);
            out.push(WireToken {
                text: tok.text.clone(),
                pos: tok.pos,
                lemma: tok.lemma.clone(),
                dep: tok.dep.clone(),
                head_index: tok.head_index,
                is_sent_root: tok.is_sent_root,
                sent_index: si,
                ent_iob,
            });
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn wire(text: &str, pos: PosTag) -> WireToken {
        WireToken {
            text: text.to_string(),
            pos,
            lemma: String::new(),
            dep: default_dep(),
            head_index: 0,
            is_sent_root: false,
            sent_index: 0,
            ent_iob: default_ent(),
        }
    }

    #[test]
    fn regroups_sentences_and_entities() {
        let mut t1 = wire("Black", PosTag::Propn);
        t1.ent_iob = "B-ORG".into();
        let mut t2 = wire("Panther", PosTag::Propn);
        t2.ent_iob = "I-ORG".into();
        let mut t3 = wire("is", PosTag::Aux);
        t3.is_sent_root = true;
        let mut t4 = wire("Here", PosTag::Adv);
        t4.sent_index = 1;
        t4.is_sent_root = true;

        let ann = annotation_from_wire(vec![t1, t2, t3, t4]).unwrap();
        assert_eq!(ann.sentences.len(), 2);
        assert_eq!(ann.sentences[0].tokens.len(), 3);
        assert_eq!(ann.entities.len(), 1);
        assert_eq!(ann.entities[0].text, "Black Panther");
        assert_eq!(ann.entities[0].start, 0);
        assert_eq!(ann.entities[0].end, 2);
        // empty lemma defaults to lower-cased text
        assert_eq!(ann.sentences[0].tokens[0].lemma, "black");
    }

    #[test]
    fn wire_round_trip() {
        let mut t1 = wire("Paris", PosTag::Propn);
        t1.ent_iob = "B-GPE".into();
        t1.lemma = "Paris".into();
        let mut t2 = wire("exists", PosTag::Verb);
        t2.is_sent_root = true;
        t2.lemma = "exist".into();
        let ann = annotation_from_wire(vec![t1, t2]).unwrap();
        let back = annotation_from_wire(annotation_to_wire(&ann)).unwrap();
        assert_eq!(back, ann);
    }

    #[test]
    fn rejects_double_root_and_bad_head() {
        let mut a = wire("A", PosTag::Noun);
        a.is_sent_root = true;
        let mut b = wire("B", PosTag::Noun);
        b.is_sent_root = true;
        assert!(annotation_from_wire(vec![a.clone(), b]).is_err());

        let mut c = wire("C", PosTag::Noun);
        c.head_index = 5;
        assert!(annotation_from_wire(vec![a, c]).is_err());
    }

    #[test]
    fn rejects_dangling_continuation_tag() {
        let mut t = wire("Panther", PosTag::Propn);
        t.ent_iob = "I-ORG".into();
        let mut root = wire("is", PosTag::Aux);
        root.is_sent_root = true;
        assert!(annotation_from_wire(vec![t, root]).is_err());
    }

    #[test]
    fn short_aliases_deserialize() {
        let json = r#"{"text": "is", "pos": "AUX", "head": 2, "root": true, "sent": 0, "ent": "O"}"#;
        let t: WireToken = serde_json::from_str(json).unwrap();
        assert_eq!(t.head_index, 2);
        assert!(t.is_sent_root);
        assert_eq!(t.dep, "dep");
    }

    #[test]
    fn empty_annotation_is_valid() {
        assert!(Annotation::empty().validate().is_ok());
        assert!(Annotation::empty().is_empty());
    }
}
