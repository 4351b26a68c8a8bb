//! Reliability scoring of fetched supplier-disclosure documents.
//!
//! Three indicators feed the score:
//!
//! * the company name appears in the document URL (self-published),
//! * the company name appears in the document text,
//! * the text uses supply-chain vocabulary.
//!
//! Weights are 0.4 / 0.3 / 0.3 and the result is capped at the reliability
//! threshold unless both the URL and text indicators hold, so a document is
//! reliable exactly when the company's name is found in both places.

use alloc::string::String;

use serde::{Deserialize, Serialize};

use crate::matching::{canonical_text, CanonicalName};
use crate::model::RELIABILITY_THRESHOLD;

pub const SUPPLY_KEYWORDS: &[&str] = &["supplier", "suppliers", "supply chain", "vendor list", "procurement"];

// Weights in tenths keep the arithmetic exact.
const URL_WEIGHT: u8 = 4;
const TEXT_WEIGHT: u8 = 3;
const KEYWORD_WEIGHT: u8 = 3;
const CAP_TENTHS: u8 = 6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ScoreSignals {
    pub name_in_url: bool,
    pub name_in_text: bool,
    pub has_keyword: bool,
}

impl ScoreSignals {
    pub fn detect(company: &CanonicalName, url: &str, text: &str) -> Self {
        let canonical = canonical_text(text);
        ScoreSignals {
            name_in_url: name_in_url(company, url),
            name_in_text: contains_phrase(&canonical, company.as_str()),
            has_keyword: SUPPLY_KEYWORDS.iter().any(|k| contains_phrase(&canonical, k)),
        }
    }

    pub fn score(self) -> DocumentScore {
        let mut tenths = URL_WEIGHT * u8::from(self.name_in_url)
            + TEXT_WEIGHT * u8::from(self.name_in_text)
            + KEYWORD_WEIGHT * u8::from(self.has_keyword);
        if !(self.name_in_url && self.name_in_text) {
            tenths = tenths.min(CAP_TENTHS);
        }
        DocumentScore(tenths)
    }
}

/// A score in tenths, `0..=10`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct DocumentScore(u8);

impl DocumentScore {
    pub fn tenths(self) -> u8 {
        self.0
    }

    pub fn value(self) -> f64 {
        f64::from(self.0) / 10.0
    }

    pub fn reliable(self) -> bool {
        self.value() > RELIABILITY_THRESHOLD
    }
}

pub fn score_document(company: &CanonicalName, url: &str, text: &str) -> DocumentScore {
    ScoreSignals::detect(company, url, text).score()
}

/// Space-insensitive containment of the canonical name in the URL, ignoring
/// separators such as `-`, `_`, `.` and `/`.
fn name_in_url(company: &CanonicalName, url: &str) -> bool {
    let needle: String = company.as_str().chars().filter(|c| *c != ' ').collect();
    if needle.is_empty() {
        return false;
    }
    let haystack: String = url
        .chars()
        .filter(char::is_ascii_alphanumeric)
        .map(|c| c.to_ascii_lowercase())
        .collect();
    haystack.contains(&needle)
}

/// Whole-token containment of `phrase` in canonical `text`.
pub fn contains_phrase(text: &str, phrase: &str) -> bool {
    if phrase.is_empty() {
        return false;
    }
    let bytes = text.as_bytes();
    let mut start = 0;
    while let Some(pos) = text[start..].find(phrase) {
        let begin = start + pos;
        let end = begin + phrase.len();
        let left_ok = begin == 0 || bytes[begin - 1] == b' ';
        let right_ok = end == bytes.len() || bytes[end] == b' ';
        if left_ok && right_ok {
            return true;
        }
        start = begin + 1;
    }
    false
}
