//! Domain records: companies, source documents and supplier relations.

use alloc::collections::BTreeSet;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::ModelError;
use crate::matching::{normalize_name, CanonicalName};

/// Seconds since the Unix epoch, UTC.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Timestamp(pub i64);

impl Timestamp {
    pub const EPOCH: Timestamp = Timestamp(0);

    pub fn seconds(self) -> i64 {
        self.0
    }
}

/// Registry key: the canonical company name joined with hyphens.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct CompanyId(String);

impl CompanyId {
    /// Accepts an already-formed slug (`[a-z0-9]` runs separated by single hyphens).
    pub fn new(value: impl Into<String>) -> Result<Self, ModelError> {
        let value = value.into();
        let valid = !value.is_empty()
            && value
                .bytes()
                .all(|b| b.is_ascii_lowercase() || b.is_ascii_digit() || b == b'-')
            && !value.starts_with('-')
            && !value.ends_with('-')
            && !value.contains("--");
        if valid {
            Ok(CompanyId(value))
        } else {
            Err(ModelError::InvalidId(value))
        }
    }

    pub fn from_canonical(name: &CanonicalName) -> Self {
        CompanyId(name.as_str().replace(' ', "-"))
    }

    /// Derives the id from a raw legal name.
    pub fn derive(legal_name: &str) -> Result<Self, ModelError> {
        normalize_name(legal_name)
            .map(|c| Self::from_canonical(&c))
            .map_err(|_| ModelError::EmptyName)
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for CompanyId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl TryFrom<String> for CompanyId {
    type Error = ModelError;

    fn try_from(value: String) -> Result<Self, Self::Error> {
        CompanyId::new(value)
    }
}

impl From<CompanyId> for String {
    fn from(id: CompanyId) -> String {
        id.0
    }
}

impl FromStr for CompanyId {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        CompanyId::new(s)
    }
}

impl AsRef<str> for CompanyId {
    fn as_ref(&self) -> &str {
        &self.0
    }
}

/// The seven regions used for grouping and transparency reporting.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Continent {
    EU,
    AF,
    NA,
    AS,
    SA,
    OC,
    ME,
}

impl Continent {
    pub const ALL: [Continent; 7] = [
        Continent::EU,
        Continent::AF,
        Continent::NA,
        Continent::AS,
        Continent::SA,
        Continent::OC,
        Continent::ME,
    ];

    pub fn code(self) -> &'static str {
        match self {
            Continent::EU => "EU",
            Continent::AF => "AF",
            Continent::NA => "NA",
            Continent::AS => "AS",
            Continent::SA => "SA",
            Continent::OC => "OC",
            Continent::ME => "ME",
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Continent::EU => "Europe",
            Continent::AF => "Africa",
            Continent::NA => "North America",
            Continent::AS => "Asia",
            Continent::SA => "South America",
            Continent::OC => "Oceania",
            Continent::ME => "Middle East",
        }
    }

    /// Continent of an ISO-3166 alpha-2 country code, where known.
    pub fn of_country(code: &str) -> Option<Continent> {
        crate::countries::continent_of(code)
    }
}

impl fmt::Display for Continent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Continent {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        Continent::ALL
            .into_iter()
            .find(|c| c.code().eq_ignore_ascii_case(t) || c.name().eq_ignore_ascii_case(t))
            .ok_or_else(|| ModelError::InvalidContinent(t.to_string()))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetadataSource {
    Seed,
    KnowledgeBase,
    Manual,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Company {
    pub id: CompanyId,
    pub legal_name: String,
    #[serde(default)]
    pub aliases: BTreeSet<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ticker: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub market_cap_usd: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub industry: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub country: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub continent: Option<Continent>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub website_domain: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub contact_email: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub employee_count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub revenue_usd: Option<f64>,
    pub metadata_source: MetadataSource,
}

impl Company {
    /// A record with only a name; the id is derived from it.
    pub fn named(legal_name: &str, source: MetadataSource) -> Result<Self, ModelError> {
        Ok(Company {
            id: CompanyId::derive(legal_name)?,
            legal_name: legal_name.trim().to_string(),
            aliases: BTreeSet::new(),
            ticker: None,
            market_cap_usd: None,
            industry: None,
            country: None,
            continent: None,
            website_domain: None,
            contact_email: None,
            employee_count: None,
            revenue_usd: None,
            metadata_source: source,
        })
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if self.legal_name.trim().is_empty() || normalize_name(&self.legal_name).is_err() {
            return Err(ModelError::EmptyName);
        }
        if self.aliases.iter().any(|a| a.trim().is_empty()) {
            return Err(ModelError::EmptyAlias);
        }
        for value in [self.market_cap_usd, self.revenue_usd].into_iter().flatten() {
            if !value.is_finite() || value < 0.0 {
                return Err(ModelError::NegativeAmount);
            }
        }
        if let Some(country) = &self.country {
            if country.len() != 2 || !country.bytes().all(|b| b.is_ascii_uppercase()) {
                return Err(ModelError::InvalidCountry(country.clone()));
            }
        }
        Ok(())
    }

    /// All names the company is known under, legal name first.
    pub fn names(&self) -> impl Iterator<Item = &str> {
        core::iter::once(self.legal_name.as_str()).chain(self.aliases.iter().map(String::as_str))
    }

    /// Fills absent fields from `other` and unions aliases. Present values are kept.
    pub fn merge_from(&mut self, other: &Company) {
        if other.legal_name != self.legal_name {
            self.aliases.insert(other.legal_name.clone());
        }
        for alias in &other.aliases {
            if *alias != self.legal_name {
                self.aliases.insert(alias.clone());
            }
        }
        fill(&mut self.ticker, &other.ticker);
        fill(&mut self.market_cap_usd, &other.market_cap_usd);
        fill(&mut self.industry, &other.industry);
        fill(&mut self.country, &other.country);
        fill(&mut self.continent, &other.continent);
        fill(&mut self.website_domain, &other.website_domain);
        fill(&mut self.contact_email, &other.contact_email);
        fill(&mut self.employee_count, &other.employee_count);
        fill(&mut self.revenue_usd, &other.revenue_usd);
    }
}

pub(crate) fn fill<T: Clone>(slot: &mut Option<T>, value: &Option<T>) {
    if slot.is_none() {
        slot.clone_from(value);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ContentType {
    Pdf,
    Html,
    Plain,
}

impl ContentType {
    pub fn as_str(self) -> &'static str {
        match self {
            ContentType::Pdf => "pdf",
            ContentType::Html => "html",
            ContentType::Plain => "plain",
        }
    }
}

impl FromStr for ContentType {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pdf" => Ok(ContentType::Pdf),
            "html" => Ok(ContentType::Html),
            "plain" | "text" | "txt" => Ok(ContentType::Plain),
            other => Err(ModelError::InvalidContentType(other.to_string())),
        }
    }
}

/// Documents scoring strictly above this are reliable.
pub const RELIABILITY_THRESHOLD: f64 = 0.6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SourceDocument {
    pub url: String,
    pub retrieved_at: Timestamp,
    pub content_hash: String,
    pub content_type: ContentType,
    pub score: f64,
    pub reliable: bool,
    pub extractor_id: String,
}

impl SourceDocument {
    pub fn new(
        url: impl Into<String>,
        retrieved_at: Timestamp,
        content_hash: impl Into<String>,
        content_type: ContentType,
        score: f64,
        extractor_id: impl Into<String>,
    ) -> Result<Self, ModelError> {
        let doc = SourceDocument {
            url: url.into(),
            retrieved_at,
            content_hash: content_hash.into(),
            content_type,
            score,
            reliable: score > RELIABILITY_THRESHOLD,
            extractor_id: extractor_id.into(),
        };
        doc.validate()?;
        Ok(doc)
    }

    pub fn validate(&self) -> Result<(), ModelError> {
        if !(0.0..=1.0).contains(&self.score) {
            return Err(ModelError::ScoreOutOfRange(self.score));
        }
        if self.reliable != (self.score > RELIABILITY_THRESHOLD) {
            return Err(ModelError::ReliabilityMismatch);
        }
        if self.content_hash.len() != 64 || !self.content_hash.bytes().all(|b| b.is_ascii_hexdigit()) {
            return Err(ModelError::InvalidHash(self.content_hash.clone()));
        }
        if self.url.is_empty() {
            return Err(ModelError::EmptyUrl);
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Origin {
    Extracted,
    Predicted,
    Manual,
}

impl Origin {
    pub const ALL: [Origin; 3] = [Origin::Extracted, Origin::Predicted, Origin::Manual];

    pub fn as_str(self) -> &'static str {
        match self {
            Origin::Extracted => "extracted",
            Origin::Predicted => "predicted",
            Origin::Manual => "manual",
        }
    }
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Origin {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Origin::ALL
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| ModelError::InvalidOrigin(s.to_string()))
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Review {
    #[default]
    Unreviewed,
    Confirmed,
    Rejected,
}

impl Review {
    pub fn as_str(self) -> &'static str {
        match self {
            Review::Unreviewed => "unreviewed",
            Review::Confirmed => "confirmed",
            Review::Rejected => "rejected",
        }
    }
}

/// A representative's decision on a relation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Confirmed,
    Rejected,
}

impl Verdict {
    pub fn as_review(self) -> Review {
        match self {
            Verdict::Confirmed => Review::Confirmed,
            Verdict::Rejected => Review::Rejected,
        }
    }
}

impl FromStr for Verdict {
    type Err = ModelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "confirmed" | "confirm" => Ok(Verdict::Confirmed),
            "rejected" | "reject" => Ok(Verdict::Rejected),
            other => Err(ModelError::InvalidVerdict(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuditEntry {
    pub actor: CompanyId,
    pub verdict: Verdict,
    pub at: Timestamp,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct RelationKey {
    pub customer: CompanyId,
    pub supplier: CompanyId,
    pub origin: Origin,
}

impl RelationKey {
    pub fn new(customer: CompanyId, supplier: CompanyId, origin: Origin) -> Self {
        RelationKey {
            customer,
            supplier,
            origin,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SupplierRelation {
    pub customer: CompanyId,
    pub supplier: CompanyId,
    pub origin: Origin,
    pub review: Review,
    pub confidence: f64,
    #[serde(default)]
    pub provenance: Vec<SourceDocument>,
    #[serde(default)]
    pub audit: Vec<AuditEntry>,
}

impl SupplierRelation {
    pub fn key(&self) -> RelationKey {
        RelationKey::new(self.customer.clone(), self.supplier.clone(), self.origin)
    }

    pub fn is_rejected(&self) -> bool {
        self.review == Review::Rejected
    }

    /// Checks the per-edge invariants that do not need the registry.
    pub fn validate(&self) -> Result<(), ModelError> {
        if self.customer == self.supplier {
            return Err(ModelError::SelfLoop(self.customer.clone()));
        }
        if !(0.0..=1.0).contains(&self.confidence) {
            return Err(ModelError::ScoreOutOfRange(self.confidence));
        }
        match self.origin {
            Origin::Extracted => {
                if self.provenance.is_empty() {
                    return Err(ModelError::MissingProvenance);
                }
                for doc in &self.provenance {
                    doc.validate()?;
                }
                let max = self.provenance.iter().map(|d| d.score).fold(0.0, f64::max);
                if max != self.confidence {
                    return Err(ModelError::ConfidenceMismatch);
                }
            }
            Origin::Predicted => {
                if !self.provenance.is_empty() {
                    return Err(ModelError::UnexpectedProvenance);
                }
                if self.confidence <= 0.0 || self.confidence > RELIABILITY_THRESHOLD {
                    return Err(ModelError::ConfidenceMismatch);
                }
            }
            Origin::Manual => {
                if !self.provenance.is_empty() {
                    return Err(ModelError::UnexpectedProvenance);
                }
                if self.confidence != 1.0 {
                    return Err(ModelError::ConfidenceMismatch);
                }
            }
        }
        let expected = self.audit.last().map(|a| a.verdict.as_review()).unwrap_or(Review::Unreviewed);
        if expected != self.review {
            return Err(ModelError::AuditMismatch);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn id_derivation() {
        assert_eq!(CompanyId::derive("Apple Inc.").unwrap().as_str(), "apple");
        assert_eq!(
            CompanyId::derive("Taiwan Semiconductor Manufacturing Co., Ltd.").unwrap().as_str(),
            "taiwan-semiconductor-manufacturing"
        );
        assert!(CompanyId::derive("  ").is_err());
        assert!(CompanyId::new("Apple").is_err());
        assert!(CompanyId::new("a--b").is_err());
    }

    #[test]
    fn continent_parsing() {
        assert_eq!("eu".parse::<Continent>().unwrap(), Continent::EU);
        assert_eq!("North America".parse::<Continent>().unwrap(), Continent::NA);
        assert!("XX".parse::<Continent>().is_err());
    }

    #[test]
    fn reliable_is_strictly_above_threshold() {
        let hash = "0".repeat(64);
        let at = SourceDocument::new("u", Timestamp(0), hash.clone(), ContentType::Plain, 0.6, "x").unwrap();
        assert!(!at.reliable);
        let above = SourceDocument::new("u", Timestamp(0), hash, ContentType::Plain, 0.7, "x").unwrap();
        assert!(above.reliable);
    }

    #[test]
    fn merge_keeps_present_fields() {
        let mut a = Company::named("Apple Inc.", MetadataSource::Seed).unwrap();
        a.industry = Some("IT".into());
        let mut b = Company::named("APPLE INC", MetadataSource::Seed).unwrap();
        b.country = Some("US".into());
        b.industry = Some("Hardware".into());
        a.merge_from(&b);
        assert_eq!(a.industry.as_deref(), Some("IT"));
        assert_eq!(a.country.as_deref(), Some("US"));
        assert!(a.aliases.contains("APPLE INC"));
    }
}
