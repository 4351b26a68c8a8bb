//! Graph fixtures shared by the integration test targets.
#![allow(dead_code)]

use std::path::{Path, PathBuf};

use supplynet_core::{
    Assertion, Company, CompanyId, ContentType, Continent, MetadataSource, SourceDocument, SupplyGraph, Timestamp,
};

/// Reference per-continent (evaluated, transparent) counts.
pub const CONTINENT_COUNTS: [(Continent, u64, u64); 7] = [
    (Continent::EU, 1435, 213),
    (Continent::AF, 84, 9),
    (Continent::NA, 2564, 248),
    (Continent::AS, 790, 67),
    (Continent::SA, 225, 19),
    (Continent::OC, 209, 16),
    (Continent::ME, 364, 13),
];

pub const CONTINENT_PERCENTAGES: [(&str, f64); 7] = [
    ("Europe (EU)", 14.84),
    ("Africa (AF)", 10.71),
    ("North America (NA)", 9.67),
    ("Asia (AS)", 8.48),
    ("South America (SA)", 8.44),
    ("Oceania (OC)", 7.66),
    ("Middle East (ME)", 3.57),
];

pub fn corpus() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus")
}

pub fn id(s: &str) -> CompanyId {
    CompanyId::new(s).unwrap()
}

pub fn extracted(url: &str) -> Assertion {
    Assertion::Extracted(
        SourceDocument::new(url, Timestamp(1_700_000_000), "ab".repeat(32), ContentType::Plain, 1.0, "gazetteer")
            .unwrap(),
    )
}

pub fn company(name: &str, industry: Option<&str>, continent: Option<Continent>) -> Company {
    let mut c = Company::named(name, MetadataSource::Seed).unwrap();
    c.industry = industry.map(str::to_string);
    c.continent = continent;
    c
}

/// A graph realizing the reference counts: the first `transparent` companies
/// of each continent have one extracted supplier, the continent's last company.
pub fn continent_reference_graph() -> SupplyGraph {
    let mut g = SupplyGraph::new();
    for (continent, evaluated, transparent) in CONTINENT_COUNTS {
        let names: Vec<String> = (0..evaluated).map(|i| format!("{} Firm {i:05}", continent.code())).collect();
        for name in &names {
            g.upsert_company(company(name, None, Some(continent))).unwrap();
        }
        let supplier = CompanyId::derive(names.last().unwrap()).unwrap();
        for name in names.iter().take(transparent as usize) {
            let customer = CompanyId::derive(name).unwrap();
            g.upsert_relation(&customer, &supplier, extracted("https://lists.example/list.txt")).unwrap();
        }
    }
    g
}

/// S1 supplies three customers and S2 one, all in one industry and region;
/// T1 has no suppliers.
pub fn prediction_graph() -> SupplyGraph {
    let mut g = SupplyGraph::new();
    for name in ["S1", "S2", "C1", "C2", "C3", "T1"] {
        g.upsert_company(company(name, Some("Semiconductors"), Some(Continent::AS))).unwrap();
    }
    for c in ["c1", "c2", "c3"] {
        g.upsert_relation(&id(c), &id("s1"), Assertion::Manual).unwrap();
    }
    g.upsert_relation(&id("c1"), &id("s2"), Assertion::Manual).unwrap();
    g
}
