//! Supplier-name recognition and registry validation of recognized names.
//!
//! Recognizers propose raw organization names; only names that resolve to a
//! registry member survive [`validate_mentions`].

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::RecognizeError;
use crate::matching::{canonical_tokens, normalize_name_with, MatchIndex, SuffixList, Threshold};
use crate::model::{Company, CompanyId};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CandidateMention {
    pub raw_name: String,
    pub document_url: String,
    pub recognizer_id: String,
}

/// Deterministic recognizer that scans text for registry names and aliases.
///
/// Matching is on canonical tokens with whole-token boundaries; at each
/// position the longest known name wins.
#[derive(Clone, Debug, Default)]
pub struct Gazetteer {
    // first token -> (token sequence, company, display name), longest first
    entries: BTreeMap<String, Vec<(Vec<String>, CompanyId, String)>>,
}

pub const GAZETTEER_ID: &str = "gazetteer";

impl Gazetteer {
    pub fn new<'a>(companies: impl IntoIterator<Item = &'a Company>) -> Self {
        Self::with_suffixes(companies, &SuffixList::default())
    }

    pub fn with_suffixes<'a>(companies: impl IntoIterator<Item = &'a Company>, suffixes: &SuffixList) -> Self {
        let mut entries: BTreeMap<String, Vec<(Vec<String>, CompanyId, String)>> = BTreeMap::new();
        for company in companies {
            for name in company.names() {
                let Ok(canonical) = normalize_name_with(name, suffixes) else {
                    continue;
                };
                let tokens: Vec<String> = canonical.tokens().map(str::to_string).collect();
                // Single very short tokens are too ambiguous to scan for.
                if tokens.len() == 1 && tokens[0].len() < 2 {
                    continue;
                }
                let bucket = entries.entry(tokens[0].clone()).or_default();
                if !bucket.iter().any(|(t, id, _)| *t == tokens && *id == company.id) {
                    bucket.push((tokens, company.id.clone(), company.legal_name.clone()));
                }
            }
        }
        for bucket in entries.values_mut() {
            bucket.sort_by(|a, b| b.0.len().cmp(&a.0.len()).then_with(|| a.1.cmp(&b.1)));
        }
        Gazetteer { entries }
    }

    /// Mentions in order of first occurrence, one per company.
    pub fn recognize(&self, text: &str, document_url: &str) -> Vec<CandidateMention> {
        let tokens = canonical_tokens(text);
        let mut seen = BTreeSet::new();
        let mut mentions = Vec::new();
        let mut i = 0;
        while i < tokens.len() {
            let hit = self.entries.get(&tokens[i]).and_then(|bucket| {
                bucket
                    .iter()
                    .find(|(seq, _, _)| tokens.len() - i >= seq.len() && tokens[i..i + seq.len()] == seq[..])
            });
            match hit {
                Some((seq, id, name)) => {
                    if seen.insert(id.clone()) {
                        mentions.push(CandidateMention {
                            raw_name: name.clone(),
                            document_url: document_url.to_string(),
                            recognizer_id: GAZETTEER_ID.to_string(),
                        });
                    }
                    i += seq.len();
                }
                None => i += 1,
            }
        }
        mentions
    }
}

/// Prompt asking a language model for the supplier names in `text`.
pub fn supplier_prompt(company_name: &str, text: &str) -> String {
    format!(
        "The following text was retrieved while looking for the supplier list of {company_name}.\n\
         List every organization named in the text as a supplier of {company_name}.\n\
         Answer with a JSON array of strings containing the organization names exactly as written, \
         and nothing else. Answer [] if there are none.\n\n\
         Text:\n{text}"
    )
}

/// Parses a model reply that must be a JSON array of strings.
pub fn parse_name_array(reply: &str) -> Result<Vec<String>, RecognizeError> {
    let value: serde_json::Value =
        serde_json::from_str(reply.trim()).map_err(|e| RecognizeError::MalformedResponse(e.to_string()))?;
    let items = value
        .as_array()
        .ok_or_else(|| RecognizeError::MalformedResponse("expected a JSON array".to_string()))?;
    items
        .iter()
        .map(|item| {
            item.as_str()
                .map(str::to_string)
                .ok_or_else(|| RecognizeError::MalformedResponse("array items must be strings".to_string()))
        })
        .collect()
}

/// Turns raw names into mentions, trimming, dropping empties and collapsing
/// duplicates while keeping first-occurrence order.
pub fn mentions_from_names(
    names: impl IntoIterator<Item = String>,
    document_url: &str,
    recognizer_id: &str,
) -> Vec<CandidateMention> {
    let mut seen = BTreeSet::new();
    names
        .into_iter()
        .map(|n| n.trim().to_string())
        .filter(|n| !n.is_empty() && seen.insert(n.to_lowercase()))
        .map(|raw_name| CandidateMention {
            raw_name,
            document_url: document_url.to_string(),
            recognizer_id: recognizer_id.to_string(),
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedMentions {
    pub suppliers: Vec<CompanyId>,
    pub seen: usize,
    pub matched: usize,
    pub dropped: usize,
}

/// Resolves mentions against the registry. Unmatched names are dropped and
/// counted, duplicates collapse, and the focal company is removed.
pub fn validate_mentions(
    mentions: &[CandidateMention],
    index: &MatchIndex,
    focal: &CompanyId,
    threshold: Threshold,
) -> ValidatedMentions {
    let mut out = ValidatedMentions {
        seen: mentions.len(),
        ..ValidatedMentions::default()
    };
    let mut kept = BTreeSet::new();
    for mention in mentions {
        match index.best_match(&mention.raw_name, threshold) {
            Some(m) => {
                out.matched += 1;
                if m.candidate != *focal && kept.insert(m.candidate.clone()) {
                    out.suppliers.push(m.candidate);
                }
            }
            None => out.dropped += 1,
        }
    }
    out
}
