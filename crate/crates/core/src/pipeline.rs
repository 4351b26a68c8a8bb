//! Stage vocabulary and value types of the collection pipeline.
//!
//! The stateful runner lives in the std companion crate; everything here is
//! pure data plus the query templates.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::model::{Company, CompanyId, ContentType, Timestamp};

/// Per-company stages, in execution order. Each stage reads the previous
/// stage's stored result and writes its own.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Stage {
    Queries,
    Search,
    Fetch,
    Extract,
    Score,
    Recognize,
    Validate,
    Upsert,
    Commit,
}

impl Stage {
    pub const ALL: [Stage; 9] = [
        Stage::Queries,
        Stage::Search,
        Stage::Fetch,
        Stage::Extract,
        Stage::Score,
        Stage::Recognize,
        Stage::Validate,
        Stage::Upsert,
        Stage::Commit,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Stage::Queries => "queries",
            Stage::Search => "search",
            Stage::Fetch => "fetch",
            Stage::Extract => "extract",
            Stage::Score => "score",
            Stage::Recognize => "recognize",
            Stage::Validate => "validate",
            Stage::Upsert => "upsert",
            Stage::Commit => "commit",
        }
    }
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Stage {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Stage::ALL
            .into_iter()
            .find(|st| st.as_str() == s)
            .ok_or_else(|| format!("unknown stage {s:?}"))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StageStatus {
    #[default]
    Pending,
    Done,
    Failed,
}

impl StageStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StageStatus::Pending => "pending",
            StageStatus::Done => "done",
            StageStatus::Failed => "failed",
        }
    }
}

impl FromStr for StageStatus {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "pending" => Ok(StageStatus::Pending),
            "done" => Ok(StageStatus::Done),
            "failed" => Ok(StageStatus::Failed),
            other => Err(format!("unknown stage status {other:?}")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchQuery {
    pub company: CompanyId,
    pub text: String,
    pub rank: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SearchHit {
    pub query: SearchQuery,
    pub url: String,
    #[serde(default)]
    pub title: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawDocument {
    pub url: String,
    pub bytes: Vec<u8>,
    pub content_type: ContentType,
    pub fetched_at: Timestamp,
}

const QUERY_TEMPLATES: [&str; 3] = ["supplier list", "suppliers", "supply chain disclosure"];

/// Search queries for a company, most specific first.
pub fn build_queries(company: &Company) -> Vec<SearchQuery> {
    QUERY_TEMPLATES
        .iter()
        .enumerate()
        .map(|(rank, suffix)| SearchQuery {
            company: company.id.clone(),
            text: format!("\"{}\" {suffix}", company.legal_name),
            rank: rank as u32,
        })
        .collect()
}

/// Outcome of one company's pass through the stages.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CompanyRun {
    pub stages: BTreeMap<Stage, StageStatus>,
    pub documents_fetched: u64,
    pub documents_reliable: u64,
    pub reliable_urls: Vec<String>,
    pub mentions_seen: u64,
    pub mentions_matched: u64,
    pub relations_upserted: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineReport {
    pub companies_processed: u64,
    pub companies_with_relations: u64,
    pub companies_failed: u64,
    pub relations_upserted: u64,
    pub documents_fetched: u64,
    pub documents_reliable: u64,
    pub mentions_seen: u64,
    pub mentions_matched: u64,
    pub stages_executed: u64,
    pub stages_skipped: u64,
    pub companies: BTreeMap<CompanyId, CompanyRun>,
}

impl PipelineReport {
    /// Folds one company's run into the totals.
    pub fn record(&mut self, company: CompanyId, run: CompanyRun) {
        self.companies_processed += 1;
        if run.relations_upserted > 0 {
            self.companies_with_relations += 1;
        }
        if run.error.is_some() {
            self.companies_failed += 1;
        }
        self.relations_upserted += run.relations_upserted;
        self.documents_fetched += run.documents_fetched;
        self.documents_reliable += run.documents_reliable;
        self.mentions_seen += run.mentions_seen;
        self.mentions_matched += run.mentions_matched;
        self.companies.insert(company, run);
    }

    pub fn all_skipped(&self) -> bool {
        self.stages_executed == 0
    }

    /// Counter relations every report satisfies.
    pub fn is_consistent(&self) -> bool {
        self.documents_reliable <= self.documents_fetched
            && self.mentions_matched <= self.mentions_seen
            && self.relations_upserted <= self.mentions_matched
            && self.companies_with_relations <= self.companies_processed
    }

    pub fn summary(&self) -> String {
        format!(
            "{} companies processed; supplier relations found for {}; {} relations from {} reliable files ({} fetched)",
            self.companies_processed,
            self.companies_with_relations,
            self.relations_upserted,
            self.documents_reliable,
            self.documents_fetched
        )
    }
}
