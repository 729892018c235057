//! Small text helpers shared across the pipeline.

/// Upper-case the first character, leaving the rest of the string untouched.
pub fn capitalize_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        None => String::new(),
        Some(c) => {
            let mut out = String::with_capacity(s.len());
            out.extend(c.to_uppercase());
            out.push_str(chars.as_str());
            out
        }
    }
}

/// Remove exactly one trailing period, if present.
pub fn strip_trailing_period(s: &str) -> &str {
    s.strip_suffix('.').unwrap_or(s)
}

/// Collapse whitespace runs to single spaces and trim the ends. Used for
/// building comparison keys, not for display.
pub fn normalize_ws(s: &str) -> String {
    s.split_whitespace().collect::<Vec<_>>().join(" ")
}

/// Truncate to the first sentence. A sentence boundary is a run of `.`, `!`
/// or `?` followed by whitespace and an upper-case letter; the boundary
/// punctuation is kept. Strings without a boundary come back whole.
pub fn first_sentence(s: &str) -> &str {
    let bytes = s.char_indices().collect::<Vec<_>>();
    let mut i = 0;
    while i < bytes.len() {
        let (_, c) = bytes[i];
        if matches!(c, '.' | '!' | '?') {
            // consume the full punctuation run
            let mut j = i + 1;
            while j < bytes.len() && matches!(bytes[j].1, '.' | '!' | '?') {
                j += 1;
            }
            let mut k = j;
            let mut saw_ws = false;
            while k < bytes.len() && bytes[k].1.is_whitespace() {
                saw_ws = true;
                k += 1;
            }
            if saw_ws && k < bytes.len() && bytes[k].1.is_uppercase() {
                let end = if j < bytes.len() { bytes[j].0 } else { s.len() };
                return &s[..end];
            }
            i = j;
        } else {
            i += 1;
        }
    }
    s
}

/// Strip leading and trailing ASCII punctuation from a whitespace token,
/// returning the core word. `"film,"` becomes `"film"`; a token that is all
/// punctuation becomes empty.
pub fn token_core(tok: &str) -> &str {
    tok.trim_matches(|c: char| c.is_ascii_punctuation())
}
