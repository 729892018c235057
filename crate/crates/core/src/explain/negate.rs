//! Rule-based claim negation.
//!
//! A four-rule cascade, ordered from most to least surgical:
//!
//! 1. a negation cue (`not`, `never`, an `n't` contraction) exists → remove
//!    the first one, expanding contractions ("isn't" → "is");
//! 2. a finite auxiliary/copula exists → insert `NOT` right after the first
//!    one;
//! 3. a finite main verb exists (per the annotator) → do-support:
//!    "does/do/did NOT" + lemma;
//! 4. otherwise prepend "It is NOT the case that ".
//!
//! Rules 1 and 2 are mutual inverses up to the casing of the inserted `NOT`,
//! which keeps double negation honest. Only rule 3 needs the annotator; when
//! it fails the cascade falls through to rule 4 with a warning.

use crate::backends::{Backend, PosTag};
use crate::diag::{Diagnostic, Stage};
use crate::text::{capitalize_first, token_core};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegationRule {
    RemovedNegation,
    InsertedAfterAux,
    DoSupport,
    ItIsNotTheCase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NegatedClaim {
    pub text: String,
    pub rule_applied: NegationRule,
}

/// Finite auxiliary and copula forms (plus modals). Word-list matching —
/// no morphology needed for rule 2.
const FINITE_AUX: &[&str] = &[
    "am", "is", "are", "was", "were", "has", "have", "had", "do", "does", "did", "will",
    "would", "shall", "should", "can", "could", "may", "might", "must",
];

fn is_finite_aux(word: &str) -> bool {
    FINITE_AUX.contains(&word)
}

/// Expand a negated contraction to its bare auxiliary, or report that the
/// word is not one.
fn expand_contraction(lower: &str) -> Option<&'static str> {
    match lower {
        "won't" => Some("will"),
        "can't" | "cannot" => Some("can"),
        "shan't" => Some("shall"),
        "ain't" => Some("is"),
        _ => lower
            .strip_suffix("n't")
            .and_then(|base| FINITE_AUX.iter().find(|&&a| a == base).copied()),
    }
}

/// Does the text contain a negative word (`not`/`never`/`n't`), token-wise?
/// Used for the CF-M connector choice.
pub fn has_negative_word(text: &str) -> bool {
    text.split_whitespace().any(|tok| {
        let low = token_core(tok).to_lowercase();
        low == "not" || low == "never" || low == "cannot" || low.ends_with("n't")
    })
}

/// Split a whitespace token into leading punctuation, core word, and
/// trailing punctuation.
fn split_punct(tok: &str) -> (&str, &str, &str) {
    let core = token_core(tok);
    if core.is_empty() {
        return ("", tok, "");
    }
    let start = tok.find(core).expect("core is a substring");
    (&tok[..start], core, &tok[start + core.len()..])
}

/// Match the capitalization of the first character of `like` onto `word`.
fn match_case(word: &str, like: &str) -> String {
    if like.chars().next().is_some_and(char::is_uppercase) {
        capitalize_first(word)
    } else {
        word.to_string()
    }
}

pub fn negate_claim(
    claim: &str,
    annotator: &dyn Backend,
    diagnostics: &mut Vec<Diagnostic>,
) -> NegatedClaim {
    let tokens: Vec<&str> = claim.split_whitespace().collect();

    // rule 1: remove the first negation cue
    for (i, tok) in tokens.iter().enumerate() {
        let (lead, core, trail) = split_punct(tok);
        let low = core.to_lowercase();
        if low == "not" || low == "never" {
            let mut parts: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
            parts.remove(i);
            // stray punctuation that was glued to the cue re-attaches to a
            // neighbour so nothing is silently lost
            if !trail.is_empty() {
                if i > 0 {
                    parts[i - 1].push_str(trail);
                } else if !parts.is_empty() {
                    parts[0] = format!("{trail}{}", parts[0]);
                }
            }
            if !lead.is_empty() && i > 0 {
                parts[i - 1].push_str(lead);
            }
            return NegatedClaim {
                text: capitalize_first(&parts.join(" ")),
                rule_applied: NegationRule::RemovedNegation,
            };
        }
        if let Some(expanded) = expand_contraction(&low) {
            let mut parts: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
            parts[i] = format!("{lead}{}{trail}", match_case(expanded, core));
            return NegatedClaim {
                text: capitalize_first(&parts.join(" ")),
                rule_applied: NegationRule::RemovedNegation,
            };
        }
    }

    // rule 2: insert NOT after the first finite auxiliary/copula
    for (i, tok) in tokens.iter().enumerate() {
        let (_, core, _) = split_punct(tok);
        if is_finite_aux(&core.to_lowercase()) {
            let mut parts: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
            parts.insert(i + 1, "NOT".to_string());
            return NegatedClaim {
                text: capitalize_first(&parts.join(" ")),
                rule_applied: NegationRule::InsertedAfterAux,
            };
        }
    }

    // rule 3: do-support on the first finite main verb
    match annotator.annotate(claim) {
        Ok(annotation) => {
            let verb = annotation.tokens().find(|t| t.pos == PosTag::Verb);
            if let Some(verb) = verb {
                let lemma =
                    if verb.lemma.is_empty() { verb.text.to_lowercase() } else { verb.lemma.clone() };
                if let Some(replaced) = do_support(&tokens, &verb.text, &lemma) {
                    return NegatedClaim {
                        text: capitalize_first(&replaced),
                        rule_applied: NegationRule::DoSupport,
                    };
                }
                diagnostics.push(Diagnostic::warning(
                    Stage::Render,
                    format!("verb {:?} not found among claim tokens; falling back", verb.text),
                ));
            }
        }
        Err(e) => {
            diagnostics.push(Diagnostic::warning(
                Stage::Render,
                format!("annotation failed during negation ({e}); falling back"),
            ));
        }
    }

    // rule 4: sentential negation
    NegatedClaim {
        text: format!("It is NOT the case that {claim}"),
        rule_applied: NegationRule::ItIsNotTheCase,
    }
}

/// Replace the first token matching `verb` with "does/do/did NOT {lemma}",
/// choosing the dummy auxiliary from the verb's inflection.
fn do_support(tokens: &[&str], verb: &str, lemma: &str) -> Option<String> {
    let i = tokens.iter().position(|tok| split_punct(tok).1 == verb)?;
    let (lead, core, trail) = split_punct(tokens[i]);
    let low = core.to_lowercase();
    let aux = if low == lemma {
        "do"
    } else if low == format!("{lemma}s")
        || low == format!("{lemma}es")
        || (lemma.ends_with('y') && low == format!("{}ies", &lemma[..lemma.len() - 1]))
    {
        "does"
    } else {
        "did"
    };
    let mut parts: Vec<String> = tokens.iter().map(|s| s.to_string()).collect();
    parts[i] = format!("{lead}{} NOT {lemma}{trail}", match_case(aux, core));
    Some(parts.join(" "))
}
