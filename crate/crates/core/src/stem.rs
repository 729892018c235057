//! Porter stemmer (the classic 1980 algorithm).
//!
//! Keyphrase candidates are merged and clustered on stemmed surface forms, so
//! the stemmer only has to be deterministic and consistent with itself; the
//! original algorithm is implemented faithfully all the same.

/// Stem a single word. Input is lower-cased first; words shorter than three
/// characters or containing non-ASCII-alphabetic characters are returned
/// lower-cased but otherwise untouched.
pub fn stem(word: &str) -> String {
    let w = word.to_lowercase();
    if w.len() <= 2 || !w.bytes().all(|b| b.is_ascii_lowercase()) {
        return w;
    }
    let mut s = Stemmer { b: w.into_bytes() };
    s.step1a();
    s.step1b();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5a();
    s.step5b();
    String::from_utf8(s.b).expect("ascii")
}

struct Stemmer {
    b: Vec<u8>,
}

impl Stemmer {
    fn is_consonant(&self, i: usize) -> bool {
        match self.b[i] {
            b'a' | b'e' | b'i' | b'o' | b'u' => false,
            b'y' => i == 0 || !self.is_consonant(i - 1),
            _ => true,
        }
    }

    /// Number of VC sequences in `self.b[..len]`.
    fn measure(&self, len: usize) -> usize {
        let mut m = 0;
        let mut i = 0;
        // skip initial consonants
        while i < len && self.is_consonant(i) {
            i += 1;
        }
        loop {
            // in a vowel run
            while i < len && !self.is_consonant(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
            m += 1;
            while i < len && self.is_consonant(i) {
                i += 1;
            }
            if i >= len {
                return m;
            }
        }
    }

    fn has_vowel(&self, len: usize) -> bool {
        (0..len).any(|i| !self.is_consonant(i))
    }

    fn ends_double_consonant(&self) -> bool {
        let n = self.b.len();
        n >= 2 && self.b[n - 1] == self.b[n - 2] && self.is_consonant(n - 1)
    }

    /// `*o`: stem ends consonant-vowel-consonant where the final consonant is
    /// not w, x or y.
    fn ends_cvc(&self, len: usize) -> bool {
        if len < 3 {
            return false;
        }
        let i = len - 1;
        self.is_consonant(i)
            && !self.is_consonant(i - 1)
            && self.is_consonant(i - 2)
            && !matches!(self.b[i], b'w' | b'x' | b'y')
    }

    fn ends_with(&self, suffix: &str) -> bool {
        self.b.len() >= suffix.len() && self.b.ends_with(suffix.as_bytes())
    }

    fn set_suffix(&mut self, old_len: usize, new: &str) {
        let keep = self.b.len() - old_len;
        self.b.truncate(keep);
        self.b.extend_from_slice(new.as_bytes());
    }

    /// If the word ends with `old` and the measure of the remaining stem
    /// satisfies `min_m`, replace `old` with `new` and report true.
    fn replace_if(&mut self, old: &str, new: &str, min_m: usize) -> bool {
        if self.ends_with(old) && self.measure(self.b.len() - old.len()) >= min_m {
            self.set_suffix(old.len(), new);
            true
        } else {
            false
        }
    }

    fn step1a(&mut self) {
        if self.ends_with("sses") {
            self.set_suffix(4, "ss");
        } else if self.ends_with("ies") {
            self.set_suffix(3, "i");
        } else if self.ends_with("ss") {
            // unchanged
        } else if self.ends_with("s") {
            self.set_suffix(1, "");
        }
    }

    fn step1b(&mut self) {
        if self.ends_with("eed") {
            if self.measure(self.b.len() - 3) > 0 {
                self.set_suffix(3, "ee");
            }
            return;
        }
        let removed = if self.ends_with("ed") && self.has_vowel(self.b.len() - 2) {
            self.set_suffix(2, "");
            true
        } else if self.ends_with("ing") && self.has_vowel(self.b.len() - 3) {
            self.set_suffix(3, "");
            true
        } else {
            false
        };
        if !removed {
            return;
        }
        if self.ends_with("at") || self.ends_with("bl") || self.ends_with("iz") {
            self.b.push(b'e');
        } else if self.ends_double_consonant() && !matches!(self.b[self.b.len() - 1], b'l' | b's' | b'z') {
            self.b.pop();
        } else if self.measure(self.b.len()) == 1 && self.ends_cvc(self.b.len()) {
            self.b.push(b'e');
        }
    }

    fn step1c(&mut self) {
        if self.ends_with("y") && self.has_vowel(self.b.len() - 1) {
            let n = self.b.len();
            self.b[n - 1] = b'i';
        }
    }

    fn step2(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("ational", "ate"),
            ("tional", "tion"),
            ("enci", "ence"),
            ("anci", "ance"),
            ("izer", "ize"),
            ("abli", "able"),
            ("alli", "al"),
            ("entli", "ent"),
            ("eli", "e"),
            ("ousli", "ous"),
            ("ization", "ize"),
            ("ation", "ate"),
            ("ator", "ate"),
            ("alism", "al"),
            ("iveness", "ive"),
            ("fulness", "ful"),
            ("ousness", "ous"),
            ("aliti", "al"),
            ("iviti", "ive"),
            ("biliti", "ble"),
        ];
        for (old, new) in RULES {
            if self.ends_with(old) {
                self.replace_if(old, new, 1);
                return;
            }
        }
    }

    fn step3(&mut self) {
        const RULES: &[(&str, &str)] = &[
            ("icate", "ic"),
            ("ative", ""),
            ("alize", "al"),
            ("iciti", "ic"),
            ("ical", "ic"),
            ("ful", ""),
            ("ness", ""),
        ];
        for (old, new) in RULES {
            if self.ends_with(old) {
                self.replace_if(old, new, 1);
                return;
            }
        }
    }

    fn step4(&mut self) {
        const SUFFIXES: &[&str] = &[
            "al", "ance", "ence", "er", "ic", "able", "ible", "ant", "ement", "ment", "ent",
            "ion", "ou", "ism", "ate", "iti", "ous", "ive", "ize",
        ];
        for suf in SUFFIXES {
            if self.ends_with(suf) {
                let stem_len = self.b.len() - suf.len();
                if self.measure(stem_len) > 1 {
                    // "ion" only drops after s or t
                    if *suf == "ion" && !(stem_len > 0 && matches!(self.b[stem_len - 1], b's' | b't')) {
                        return;
                    }
                    self.set_suffix(suf.len(), "");
                }
                return;
            }
        }
    }

    fn step5a(&mut self) {
        if self.ends_with("e") {
            let m = self.measure(self.b.len() - 1);
            if m > 1 || (m == 1 && !self.ends_cvc(self.b.len() - 1)) {
                self.b.pop();
            }
        }
    }

    fn step5b(&mut self) {
        if self.ends_double_consonant() && self.b[self.b.len() - 1] == b'l' && self.measure(self.b.len()) > 1 {
            self.b.pop();
        }
    }
}
