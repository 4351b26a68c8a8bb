//! Metadata enrichment from a local fixture table or a remote knowledge base.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Duration;

use serde::{Deserialize, Serialize};
use supplynet_core::predict::MetadataPatch;
use supplynet_core::{Company, CompanyId, Continent, GraphError, SupplyGraph};
use thiserror::Error;

use crate::seed::is_email;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Lookup {
    Found { patch: MetadataPatch },
    NotFound,
    /// Several knowledge-base entities carry the name; nothing is applied.
    Ambiguous { candidates: Vec<String> },
}

#[derive(Debug, Error)]
pub enum EnrichError {
    #[error("metadata client unavailable: {0}")]
    Unavailable(String),
    #[error("metadata table row {row}: {message}")]
    Table { row: usize, message: String },
    #[error("cannot read metadata table {path}: {message}")]
    Io { path: String, message: String },
    #[error(transparent)]
    Graph(#[from] GraphError),
}

pub trait MetadataClient: Send + Sync {
    fn lookup(&self, company: &Company) -> Result<Lookup, EnrichError>;
}

pub fn enrich_company(company: &Company, client: &dyn MetadataClient) -> Result<Lookup, EnrichError> {
    let mut lookup = client.lookup(company)?;
    if let Lookup::Found { patch } = &mut lookup {
        patch.company = Some(company.id.clone());
        if patch.is_empty() {
            return Ok(Lookup::NotFound);
        }
    }
    Ok(lookup)
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnrichReport {
    pub patched: Vec<CompanyId>,
    pub not_found: Vec<CompanyId>,
    pub ambiguous: Vec<CompanyId>,
    pub failed: Vec<CompanyId>,
}

/// Looks up every company and applies the patches found. Client failures are
/// recorded per company.
pub fn enrich_all(graph: &mut SupplyGraph, client: &dyn MetadataClient) -> Result<EnrichReport, EnrichError> {
    let companies: Vec<Company> = graph.companies().cloned().collect();
    let mut report = EnrichReport::default();
    for company in &companies {
        match enrich_company(company, client) {
            Ok(Lookup::Found { patch }) => {
                patch.apply(graph, &company.id)?;
                report.patched.push(company.id.clone());
            }
            Ok(Lookup::NotFound) => report.not_found.push(company.id.clone()),
            Ok(Lookup::Ambiguous { .. }) => report.ambiguous.push(company.id.clone()),
            Err(e) => {
                tracing::warn!(company = %company.id, error = %e, "metadata lookup failed");
                report.failed.push(company.id.clone());
            }
        }
    }
    Ok(report)
}

pub const TABLE_COLUMNS: [&str; 7] = [
    "company_id",
    "industry",
    "country",
    "continent",
    "email",
    "employee_count",
    "revenue_usd",
];

/// Metadata read from a CSV table keyed by company id.
#[derive(Clone, Debug, Default)]
pub struct FixtureMetadata {
    rows: BTreeMap<String, MetadataPatch>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct TableRow {
    company_id: String,
    #[serde(default)]
    industry: Option<String>,
    #[serde(default)]
    country: Option<String>,
    #[serde(default)]
    continent: Option<String>,
    #[serde(default)]
    email: Option<String>,
    #[serde(default)]
    employee_count: Option<u64>,
    #[serde(default)]
    revenue_usd: Option<f64>,
}

fn non_empty(v: Option<String>) -> Option<String> {
    v.map(|s| s.trim().to_string()).filter(|s| !s.is_empty())
}

impl FixtureMetadata {
    pub fn load(path: &Path) -> Result<Self, EnrichError> {
        let text = std::fs::read_to_string(path).map_err(|e| EnrichError::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> Result<Self, EnrichError> {
        let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(text.as_bytes());
        let mut rows = BTreeMap::new();
        for (n, record) in reader.deserialize::<TableRow>().enumerate() {
            let row = n + 2;
            let bad = |message: String| EnrichError::Table { row, message };
            let r = record.map_err(|e| bad(e.to_string()))?;
            let continent = match non_empty(r.continent) {
                Some(c) => Some(c.parse::<Continent>().map_err(|e| bad(e.to_string()))?),
                None => None,
            };
            let email = non_empty(r.email);
            if let Some(e) = &email {
                if !is_email(e) {
                    return Err(bad(format!("invalid email {e:?}")));
                }
            }
            if r.revenue_usd.is_some_and(|v| !v.is_finite() || v < 0.0) {
                return Err(bad("revenue_usd must be nonnegative".into()));
            }
            let patch = MetadataPatch {
                company: None,
                industry: non_empty(r.industry),
                country: non_empty(r.country).map(|c| c.to_ascii_uppercase()),
                continent,
                contact_email: email,
                employee_count: r.employee_count,
                revenue_usd: r.revenue_usd,
                source: "fixture".into(),
            };
            rows.insert(r.company_id.trim().to_string(), patch);
        }
        Ok(FixtureMetadata { rows })
    }
}

impl MetadataClient for FixtureMetadata {
    fn lookup(&self, company: &Company) -> Result<Lookup, EnrichError> {
        Ok(match self.rows.get(company.id.as_str()) {
            Some(patch) => Lookup::Found { patch: patch.clone() },
            None => Lookup::NotFound,
        })
    }
}

/// Endpoints and property ids of the remote knowledge base. These are
/// configuration so a mirror or a different property mapping can be used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct KnowledgeBaseConfig {
    pub search_endpoint: String,
    pub sparql_endpoint: String,
    pub industry_property: String,
    pub country_property: String,
    pub country_code_property: String,
    pub employees_property: String,
    pub revenue_property: String,
    pub email_property: String,
}

impl Default for KnowledgeBaseConfig {
    fn default() -> Self {
        KnowledgeBaseConfig {
            search_endpoint: "https://www.wikidata.org/w/api.php".into(),
            sparql_endpoint: "https://query.wikidata.org/sparql".into(),
            industry_property: "P452".into(),
            country_property: "P17".into(),
            country_code_property: "P297".into(),
            employees_property: "P1128".into(),
            revenue_property: "P2139".into(),
            email_property: "P968".into(),
        }
    }
}

/// Wikidata-style client: entity search by label, then one SPARQL query for
/// the attributes of the single exact match.
pub struct KnowledgeBaseClient {
    config: KnowledgeBaseConfig,
    agent: ureq::Agent,
}

impl KnowledgeBaseClient {
    pub fn new(config: KnowledgeBaseConfig) -> Self {
        let agent = ureq::Agent::config_builder()
            .timeout_global(Some(Duration::from_secs(30)))
            .user_agent(concat!("supplynet/", env!("CARGO_PKG_VERSION")))
            .build()
            .into();
        KnowledgeBaseClient { config, agent }
    }

    fn get_json(&self, url: &str, query: &[(&str, &str)]) -> Result<serde_json::Value, EnrichError> {
        let mut request = self.agent.get(url).header("Accept", "application/sparql-results+json, application/json");
        for (k, v) in query {
            request = request.query(*k, *v);
        }
        let mut response = request.call().map_err(|e| EnrichError::Unavailable(e.to_string()))?;
        response
            .body_mut()
            .read_json()
            .map_err(|e| EnrichError::Unavailable(format!("bad knowledge-base response: {e}")))
    }

    pub fn sparql_for(&self, entity: &str) -> String {
        let c = &self.config;
        format!(
            "SELECT ?industryLabel ?code ?employees ?revenue ?email WHERE {{ \
             OPTIONAL {{ wd:{entity} wdt:{ind} ?industry. }} \
             OPTIONAL {{ wd:{entity} wdt:{ctry} ?country. ?country wdt:{code} ?code. }} \
             OPTIONAL {{ wd:{entity} wdt:{emp} ?employees. }} \
             OPTIONAL {{ wd:{entity} wdt:{rev} ?revenue. }} \
             OPTIONAL {{ wd:{entity} wdt:{mail} ?email. }} \
             SERVICE wikibase:label {{ bd:serviceParam wikibase:language \"en\". }} }} LIMIT 1",
            ind = c.industry_property,
            ctry = c.country_property,
            code = c.country_code_property,
            emp = c.employees_property,
            rev = c.revenue_property,
            mail = c.email_property,
        )
    }
}

/// Entity ids whose label or alias equals `name`, ignoring case.
pub fn exact_candidates(search: &serde_json::Value, name: &str) -> Vec<String> {
    let wanted = name.trim().to_lowercase();
    search["search"]
        .as_array()
        .map(|items| {
            items
                .iter()
                .filter(|item| {
                    let label = item["label"].as_str().unwrap_or_default().to_lowercase();
                    let matched = item["match"]["text"].as_str().unwrap_or_default().to_lowercase();
                    label == wanted || matched == wanted
                })
                .filter_map(|item| item["id"].as_str().map(str::to_string))
                .collect()
        })
        .unwrap_or_default()
}

/// Builds a patch from the first SPARQL result binding.
pub fn patch_from_bindings(result: &serde_json::Value) -> MetadataPatch {
    let binding = &result["results"]["bindings"][0];
    let text = |key: &str| binding[key]["value"].as_str().map(str::trim).filter(|v| !v.is_empty());
    let email = text("email")
        .map(|e| e.trim_start_matches("mailto:").to_string())
        .filter(|e| is_email(e));
    MetadataPatch {
        company: None,
        industry: text("industryLabel").map(str::to_string),
        country: text("code").map(|c| c.to_ascii_uppercase()).filter(|c| c.len() == 2),
        continent: None,
        contact_email: email,
        employee_count: text("employees").and_then(|v| v.parse::<f64>().ok()).filter(|v| *v >= 0.0).map(|v| v as u64),
        revenue_usd: text("revenue").and_then(|v| v.parse::<f64>().ok()).filter(|v| v.is_finite() && *v >= 0.0),
        source: "knowledge_base".into(),
    }
}

impl MetadataClient for KnowledgeBaseClient {
    fn lookup(&self, company: &Company) -> Result<Lookup, EnrichError> {
        let search = self.get_json(
            &self.config.search_endpoint,
            &[
                ("action", "wbsearchentities"),
                ("search", &company.legal_name),
                ("language", "en"),
                ("type", "item"),
                ("limit", "10"),
                ("format", "json"),
            ],
        )?;
        let candidates = exact_candidates(&search, &company.legal_name);
        match candidates.as_slice() {
            [] => Ok(Lookup::NotFound),
            [entity] => {
                let query = self.sparql_for(entity);
                let result = self.get_json(&self.config.sparql_endpoint, &[("query", &query), ("format", "json")])?;
                Ok(Lookup::Found {
                    patch: patch_from_bindings(&result),
                })
            }
            _ => Ok(Lookup::Ambiguous { candidates }),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use supplynet_core::MetadataSource;
    use serde_json::json;

    const TABLE: &str = "company_id,industry,country,continent,email,employee_count,revenue_usd\n\
                         apple,IT,,NA,,,\n\
                         sap,Software,DE,,info@sap.com,100000,3.1e10\n";

    fn graph() -> SupplyGraph {
        let mut g = SupplyGraph::new();
        for n in ["Apple Inc.", "SAP SE", "Pear Ltd"] {
            g.upsert_company(Company::named(n, MetadataSource::Seed).unwrap()).unwrap();
        }
        g
    }

    #[test]
    fn fixture_lookup_and_apply() {
        let table = FixtureMetadata::parse(TABLE).unwrap();
        let g = graph();
        let apple = g.company(&CompanyId::new("apple").unwrap()).unwrap();
        match enrich_company(apple, &table).unwrap() {
            Lookup::Found { patch } => {
                assert_eq!(patch.field_count(), 2);
                assert_eq!(patch.company.as_ref().map(CompanyId::as_str), Some("apple"));
            }
            other => panic!("unexpected {other:?}"),
        }
        let pear = g.company(&CompanyId::new("pear").unwrap()).unwrap();
        assert_eq!(enrich_company(pear, &table).unwrap(), Lookup::NotFound);
    }

    #[test]
    fn enrich_all_respects_existing_values() {
        let table = FixtureMetadata::parse(TABLE).unwrap();
        let mut g = graph();
        let sap = CompanyId::new("sap").unwrap();
        let mut manual = g.company(&sap).unwrap().clone();
        manual.industry = Some("Enterprise Software".into());
        g.fill_company(&sap, &manual).unwrap();
        let report = enrich_all(&mut g, &table).unwrap();
        assert_eq!(report.patched.len(), 2);
        assert_eq!(report.not_found.len(), 1);
        let sap = g.company(&sap).unwrap();
        assert_eq!(sap.industry.as_deref(), Some("Enterprise Software"));
        assert_eq!(sap.continent, Some(Continent::EU));
        assert_eq!(sap.employee_count, Some(100_000));
    }

    #[test]
    fn table_errors_name_the_row() {
        let err = FixtureMetadata::parse("company_id,continent\nx,Atlantis\n").unwrap_err();
        assert!(matches!(err, EnrichError::Table { row: 2, .. }));
        assert!(FixtureMetadata::parse("company_id,colour\nx,red\n").is_err());
    }

    #[test]
    fn knowledge_base_parsing() {
        let search = json!({"search": [
            {"id": "Q312", "label": "Apple Inc.", "match": {"text": "Apple Inc."}},
            {"id": "Q89", "label": "apple", "match": {"text": "apple"}}
        ]});
        assert_eq!(exact_candidates(&search, "Apple Inc."), ["Q312"]);
        assert_eq!(exact_candidates(&search, "apple"), ["Q89"]);
        let ambiguous = json!({"search": [{"id": "Q1", "label": "Acme"}, {"id": "Q2", "label": "ACME"}]});
        assert_eq!(exact_candidates(&ambiguous, "acme").len(), 2);
        let result = json!({"results": {"bindings": [{
            "industryLabel": {"value": "consumer electronics"},
            "code": {"value": "us"},
            "employees": {"value": "161000"},
            "revenue": {"value": "3.94328E11"},
            "email": {"value": "mailto:ir@apple.com"}
        }]}});
        let patch = patch_from_bindings(&result);
        assert_eq!(patch.industry.as_deref(), Some("consumer electronics"));
        assert_eq!(patch.country.as_deref(), Some("US"));
        assert_eq!(patch.employee_count, Some(161_000));
        assert_eq!(patch.contact_email.as_deref(), Some("ir@apple.com"));
        assert!(patch_from_bindings(&json!({})).is_empty());
        let q = KnowledgeBaseClient::new(KnowledgeBaseConfig::default()).sparql_for("Q312");
        assert!(q.contains("wd:Q312 wdt:P452"));
    }
}
