//! Seed registry CSV loading.
//!
//! Expected header: `id,name,ticker,market_cap_usd,industry,country,continent,website,email`.
//! Only `name` is required; `id` is derived from the name when empty. Rows
//! whose names share a canonical form are merged into one company.

use std::io::Read;
use std::path::Path;

use supplynet_core::{Company, CompanyId, Continent, GraphError, MetadataSource, SupplyGraph};
use thiserror::Error;

pub const SEED_COLUMNS: [&str; 9] = [
    "id",
    "name",
    "ticker",
    "market_cap_usd",
    "industry",
    "country",
    "continent",
    "website",
    "email",
];

#[derive(Debug, Error)]
pub enum SeedError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("seed file is empty")]
    EmptyFile,
    #[error("malformed csv at row {row}, column {column}: {message}")]
    Malformed { row: usize, column: String, message: String },
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SeedStats {
    pub rows: usize,
    pub merged: usize,
    pub companies: usize,
}

pub fn load_seed_registry(path: &Path) -> Result<(SupplyGraph, SeedStats), SeedError> {
    let mut graph = SupplyGraph::new();
    let stats = load_seed_file(&mut graph, path)?;
    Ok((graph, stats))
}

pub fn load_seed_file(graph: &mut SupplyGraph, path: &Path) -> Result<SeedStats, SeedError> {
    let file = std::fs::File::open(path).map_err(|source| SeedError::Io {
        path: path.display().to_string(),
        source,
    })?;
    load_seed_into(graph, file)
}

fn malformed(row: usize, column: &str, message: impl Into<String>) -> SeedError {
    SeedError::Malformed {
        row,
        column: column.to_string(),
        message: message.into(),
    }
}

/// Upserts every row of a seed CSV into `graph`. Row numbers in errors count
/// the header as row 1.
pub fn load_seed_into(graph: &mut SupplyGraph, reader: impl Read) -> Result<SeedStats, SeedError> {
    let mut csv = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = match csv.headers() {
        Ok(h) if h.is_empty() || (h.len() == 1 && h[0].is_empty()) => return Err(SeedError::EmptyFile),
        Ok(h) => h.clone(),
        Err(e) => return Err(malformed(1, "", e.to_string())),
    };
    let mut columns = std::collections::HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        let name = name.trim_start_matches('\u{feff}').to_ascii_lowercase();
        if !SEED_COLUMNS.contains(&name.as_str()) {
            return Err(malformed(1, &name, "unknown column"));
        }
        if columns.insert(name.clone(), i).is_some() {
            return Err(malformed(1, &name, "duplicate column"));
        }
    }
    if !columns.contains_key("name") {
        return Err(malformed(1, "name", "required column missing"));
    }

    let mut stats = SeedStats::default();
    for (n, record) in csv.records().enumerate() {
        let row = n + 2;
        let record = record.map_err(|e| malformed(row, "", e.to_string()))?;
        let field = |name: &str| -> Option<&str> {
            columns
                .get(name)
                .and_then(|&i| record.get(i))
                .map(str::trim)
                .filter(|v| !v.is_empty())
        };
        let company = company_from_row(row, &field)?;
        let before = graph.company_count();
        graph.upsert_company(company).map_err(|e| match e {
            GraphError::InvalidRecord(m) => malformed(row, "name", m.to_string()),
            other => malformed(row, "", other.to_string()),
        })?;
        stats.rows += 1;
        if graph.company_count() == before {
            stats.merged += 1;
        }
    }
    stats.companies = graph.company_count();
    Ok(stats)
}

fn company_from_row<'r>(row: usize, field: &dyn Fn(&str) -> Option<&'r str>) -> Result<Company, SeedError> {
    let name = field("name").ok_or_else(|| malformed(row, "name", "name is empty"))?;
    let mut company = Company::named(name, MetadataSource::Seed).map_err(|e| malformed(row, "name", e.to_string()))?;
    if let Some(id) = field("id") {
        company.id = CompanyId::new(id).map_err(|e| malformed(row, "id", e.to_string()))?;
    }
    company.ticker = field("ticker").map(str::to_string);
    if let Some(cap) = field("market_cap_usd") {
        let value: f64 = cap
            .replace('_', "")
            .parse()
            .map_err(|_| malformed(row, "market_cap_usd", format!("not a number: {cap:?}")))?;
        if !value.is_finite() || value < 0.0 {
            return Err(malformed(row, "market_cap_usd", "must be nonnegative"));
        }
        company.market_cap_usd = Some(value);
    }
    company.industry = field("industry").map(str::to_string);
    if let Some(country) = field("country") {
        let code = country.to_ascii_uppercase();
        if code.len() != 2 || !code.bytes().all(|b| b.is_ascii_uppercase()) {
            return Err(malformed(row, "country", format!("expected ISO-3166 alpha-2, got {country:?}")));
        }
        company.country = Some(code);
    }
    company.continent = match field("continent") {
        Some(c) => Some(
            c.parse::<Continent>()
                .map_err(|e| malformed(row, "continent", e.to_string()))?,
        ),
        None => company.country.as_deref().and_then(Continent::of_country),
    };
    if let Some(site) = field("website") {
        company.website_domain =
            Some(website_domain(site).ok_or_else(|| malformed(row, "website", format!("invalid website {site:?}")))?);
    }
    if let Some(email) = field("email") {
        if !is_email(email) {
            return Err(malformed(row, "email", format!("invalid email {email:?}")));
        }
        company.contact_email = Some(email.to_string());
    }
    Ok(company)
}

/// Host of a website URL or bare domain, lowercased and without `www.`.
pub fn website_domain(site: &str) -> Option<String> {
    let with_scheme = if site.contains("://") {
        site.to_string()
    } else {
        format!("https://{site}")
    };
    let parsed = url::Url::parse(&with_scheme).ok()?;
    let host = parsed.host_str()?.to_ascii_lowercase();
    let host = host.strip_prefix("www.").unwrap_or(&host).to_string();
    host.contains('.').then_some(host)
}

pub fn is_email(value: &str) -> bool {
    match value.split_once('@') {
        Some((local, domain)) => {
            !local.is_empty()
                && domain.contains('.')
                && !domain.starts_with('.')
                && !domain.ends_with('.')
                && !domain.contains('@')
                && !value.chars().any(char::is_whitespace)
        }
        None => false,
    }
}

/// Domain part of an email address, lowercased.
pub fn email_domain(value: &str) -> Option<String> {
    value.rsplit_once('@').map(|(_, d)| d.to_ascii_lowercase())
}
