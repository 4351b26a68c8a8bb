use alloc::string::String;

use thiserror::Error;

use crate::model::{CompanyId, RelationKey};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("company name is empty after normalization")]
    EmptyName,
    #[error("aliases must not be empty")]
    EmptyAlias,
    #[error("monetary amounts must be finite and nonnegative")]
    NegativeAmount,
    #[error("invalid company id {0:?}")]
    InvalidId(String),
    #[error("invalid continent {0:?}")]
    InvalidContinent(String),
    #[error("invalid country code {0:?} (expected ISO-3166 alpha-2)")]
    InvalidCountry(String),
    #[error("invalid content type {0:?}")]
    InvalidContentType(String),
    #[error("invalid origin {0:?}")]
    InvalidOrigin(String),
    #[error("invalid verdict {0:?}")]
    InvalidVerdict(String),
    #[error("score {0} outside [0, 1]")]
    ScoreOutOfRange(f64),
    #[error("reliable flag disagrees with score")]
    ReliabilityMismatch,
    #[error("content hash {0:?} is not a 64-character hex digest")]
    InvalidHash(String),
    #[error("document url is empty")]
    EmptyUrl,
    #[error("company {0} cannot supply itself")]
    SelfLoop(CompanyId),
    #[error("extracted relations need at least one provenance document")]
    MissingProvenance,
    #[error("only extracted relations carry provenance")]
    UnexpectedProvenance,
    #[error("relation confidence violates its origin rule")]
    ConfidenceMismatch,
    #[error("review state disagrees with the audit trail")]
    AuditMismatch,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("invalid record: {0}")]
    InvalidRecord(#[from] ModelError),
    #[error("company {0} cannot supply itself")]
    SelfLoop(CompanyId),
    #[error("unknown company {0}")]
    UnknownCompany(CompanyId),
    #[error("unknown relation {}->{} ({})", .0.customer, .0.supplier, .0.origin)]
    UnknownRelation(RelationKey),
    #[error("predicted confidence {0} must lie in (0, 0.6]")]
    PredictedConfidence(f64),
    #[error("duplicate record for {0}")]
    Duplicate(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SnapshotError {
    #[error("snapshot is empty")]
    Empty,
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("unsupported schema version {found} (expected {expected})")]
    SchemaVersion { found: u64, expected: u64 },
    #[error("line {line}: {source}")]
    Graph { line: usize, source: GraphError },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MatchError {
    #[error("input is empty")]
    EmptyInput,
    #[error("threshold {0} must lie in (0, 1]")]
    InvalidThreshold(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PredictError {
    #[error("unknown company {0}")]
    UnknownCompany(CompanyId),
    #[error("company {0} lacks industry or continent metadata")]
    MissingMetadata(CompanyId),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticsError {
    #[error("unknown company {0}")]
    UnknownCompany(CompanyId),
    #[error("ground truth references unknown company {0}")]
    ManifestMismatch(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RecognizeError {
    #[error("recognizer unavailable: {0}")]
    Unavailable(String),
    #[error("malformed recognizer response: {0}")]
    MalformedResponse(String),
}
