//! Company-name normalization and threshold fuzzy matching against the registry.
//!
//! Names are compared on their canonical form: ASCII-transliterated, lowercase,
//! punctuation-free, single-spaced, with trailing legal-form tokens removed.
//! Similarity is the normalized Levenshtein distance between canonical forms.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use serde::{Deserialize, Serialize};

use crate::error::MatchError;
use crate::model::{Company, CompanyId};

/// Legal-form tokens stripped from the end of a name, applied repeatedly.
pub const LEGAL_SUFFIXES: &[&str] = &[
    "inc",
    "incorporated",
    "corp",
    "corporation",
    "ltd",
    "limited",
    "llc",
    "plc",
    "co",
    "company",
    "ag",
    "se",
    "sa",
    "nv",
    "gmbh",
    "kk",
    "oyj",
    "ab",
    "spa",
    "holdings",
    "group",
];

/// Minimum similarity for a registry match unless configured otherwise.
pub const DEFAULT_THRESHOLD: f64 = 0.90;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SuffixList(Vec<String>);

impl SuffixList {
    /// Parses a suffix file: one suffix per line, `#` starts a comment.
    pub fn parse(text: &str) -> Self {
        let mut tokens: Vec<String> = text
            .lines()
            .map(|l| l.split('#').next().unwrap_or(""))
            .filter_map(|l| {
                let t = canonical_tokens(l).join(" ");
                (!t.is_empty()).then_some(t)
            })
            .collect();
        tokens.sort();
        tokens.dedup();
        SuffixList(tokens)
    }

    pub fn contains(&self, token: &str) -> bool {
        self.0.binary_search_by(|s| s.as_str().cmp(token)).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

impl Default for SuffixList {
    fn default() -> Self {
        let mut v: Vec<String> = LEGAL_SUFFIXES.iter().map(|s| s.to_string()).collect();
        v.sort();
        SuffixList(v)
    }
}

/// A normalized company name: `[a-z0-9]` tokens separated by single spaces.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CanonicalName(String);

impl CanonicalName {
    pub fn as_str(&self) -> &str {
        &self.0
    }

    pub fn tokens(&self) -> impl Iterator<Item = &str> {
        self.0.split(' ')
    }
}

impl fmt::Display for CanonicalName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// Transliterates, lowercases and splits into alphanumeric tokens.
///
/// Periods and apostrophes are dropped so that abbreviations such as `S.A.` or
/// `McDonald's` collapse into one token; every other non-alphanumeric character
/// separates tokens.
pub fn canonical_tokens(raw: &str) -> Vec<String> {
    let ascii = deunicode::deunicode(raw);
    let mut cleaned = String::with_capacity(ascii.len());
    for c in ascii.chars() {
        if c.is_ascii_alphanumeric() {
            cleaned.push(c.to_ascii_lowercase());
        } else if c == '.' || c == '\'' {
            continue;
        } else {
            cleaned.push(' ');
        }
    }
    cleaned.split_whitespace().map(str::to_string).collect()
}

/// Canonical text form used for substring checks; no suffix stripping.
pub fn canonical_text(raw: &str) -> String {
    canonical_tokens(raw).join(" ")
}

pub fn normalize_name(raw: &str) -> Result<CanonicalName, MatchError> {
    normalize_name_with(raw, &SuffixList::default())
}

pub fn normalize_name_with(raw: &str, suffixes: &SuffixList) -> Result<CanonicalName, MatchError> {
    let mut tokens = canonical_tokens(raw);
    if tokens.is_empty() {
        return Err(MatchError::EmptyInput);
    }
    while tokens.len() > 1 && tokens.last().is_some_and(|t| suffixes.contains(t)) {
        tokens.pop();
    }
    Ok(CanonicalName(tokens.join(" ")))
}

/// Edit distance over bytes; canonical forms are ASCII.
pub fn levenshtein(a: &str, b: &str) -> usize {
    let (a, b) = (a.as_bytes(), b.as_bytes());
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut cur = alloc::vec![0; b.len() + 1];
    for (i, &ca) in a.iter().enumerate() {
        cur[0] = i + 1;
        for (j, &cb) in b.iter().enumerate() {
            let subst = prev[j] + usize::from(ca != cb);
            cur[j + 1] = subst.min(prev[j + 1] + 1).min(cur[j] + 1);
        }
        core::mem::swap(&mut prev, &mut cur);
    }
    prev[b.len()]
}

fn canonical_similarity(a: &str, b: &str) -> f64 {
    if a == b {
        return 1.0;
    }
    let longest = a.len().max(b.len());
    1.0 - levenshtein(a, b) as f64 / longest as f64
}

/// Similarity of two raw names in `[0, 1]`; symmetric, 1.0 on equal canonical forms.
pub fn similarity(a: &str, b: &str) -> f64 {
    similarity_with(a, b, &SuffixList::default())
}

pub fn similarity_with(a: &str, b: &str, suffixes: &SuffixList) -> f64 {
    let ca = normalize_name_with(a, suffixes).map(|c| c.0).unwrap_or_default();
    let cb = normalize_name_with(b, suffixes).map(|c| c.0).unwrap_or_default();
    canonical_similarity(&ca, &cb)
}

#[derive(Clone, Copy, Debug, PartialEq, PartialOrd)]
pub struct Threshold(f64);

impl Threshold {
    pub const DEFAULT: Threshold = Threshold(DEFAULT_THRESHOLD);

    pub fn new(value: f64) -> Result<Self, MatchError> {
        if value > 0.0 && value <= 1.0 {
            Ok(Threshold(value))
        } else {
            Err(MatchError::InvalidThreshold(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

impl Default for Threshold {
    fn default() -> Self {
        Threshold::DEFAULT
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatchResult {
    pub candidate: CompanyId,
    pub similarity: f64,
}

/// Canonical names of every registry member, prepared once for repeated lookups.
#[derive(Clone, Debug, Default)]
pub struct MatchIndex {
    suffixes: SuffixList,
    entries: Vec<(String, CompanyId)>,
    exact: BTreeMap<String, CompanyId>,
}

impl MatchIndex {
    pub fn new<'a>(companies: impl IntoIterator<Item = &'a Company>) -> Self {
        Self::with_suffixes(companies, SuffixList::default())
    }

    pub fn with_suffixes<'a>(companies: impl IntoIterator<Item = &'a Company>, suffixes: SuffixList) -> Self {
        let mut entries = Vec::new();
        let mut exact: BTreeMap<String, CompanyId> = BTreeMap::new();
        for company in companies {
            for name in company.names() {
                let Ok(canonical) = normalize_name_with(name, &suffixes) else {
                    continue;
                };
                let canonical = canonical.0;
                match exact.get(&canonical) {
                    Some(existing) if *existing <= company.id => {}
                    _ => {
                        exact.insert(canonical.clone(), company.id.clone());
                    }
                }
                entries.push((canonical, company.id.clone()));
            }
        }
        entries.sort();
        entries.dedup();
        MatchIndex {
            suffixes,
            entries,
            exact,
        }
    }

    pub fn suffixes(&self) -> &SuffixList {
        &self.suffixes
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Best registry candidate for `raw` at or above `threshold`.
    ///
    /// Exact canonical equality wins outright; otherwise the highest similarity
    /// across all names and aliases is taken, ties going to the smallest id.
    pub fn best_match(&self, raw: &str, threshold: Threshold) -> Option<MatchResult> {
        let query = normalize_name_with(raw, &self.suffixes).ok()?.0;
        if let Some(id) = self.exact.get(&query) {
            return Some(MatchResult {
                candidate: id.clone(),
                similarity: 1.0,
            });
        }
        let mut best: Option<(f64, &CompanyId)> = None;
        for (name, id) in &self.entries {
            let longest = name.len().max(query.len()) as f64;
            let bound = 1.0 - name.len().abs_diff(query.len()) as f64 / longest;
            if bound < threshold.0 {
                continue;
            }
            if let Some((best_sim, _)) = best {
                if bound < best_sim {
                    continue;
                }
            }
            let sim = canonical_similarity(name, &query);
            let better = match best {
                None => true,
                Some((best_sim, best_id)) => sim > best_sim || (sim == best_sim && id < best_id),
            };
            if better {
                best = Some((sim, id));
            }
        }
        best.filter(|(sim, _)| *sim >= threshold.0).map(|(similarity, id)| MatchResult {
            candidate: id.clone(),
            similarity,
        })
    }
}
