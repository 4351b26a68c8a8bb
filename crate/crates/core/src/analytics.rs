//! Transparency proxy, grouped transparency and coverage reports, and the
//! peer-comparison nudge.
//!
//! A company is transparent when at least one non-rejected extracted supplier
//! relation exists for it. Predicted and manual relations never count.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::AnalyticsError;
use crate::graph::SupplyGraph;
use crate::matching::{MatchIndex, Threshold};
use crate::model::{Company, CompanyId, Continent, MetadataSource, Origin};
use crate::predict::GroupKey;

pub const UNKNOWN_GROUP: &str = "unknown";
pub const TOTAL_LABEL: &str = "Total";

pub fn is_transparent(graph: &SupplyGraph, company: &CompanyId) -> Result<bool, AnalyticsError> {
    if !graph.contains(company) {
        return Err(AnalyticsError::UnknownCompany(company.clone()));
    }
    Ok(transparent_set(graph).contains(company))
}

/// Ids of every transparent company.
pub fn transparent_set(graph: &SupplyGraph) -> BTreeSet<&CompanyId> {
    graph
        .relations()
        .filter(|r| r.origin == Origin::Extracted && !r.is_rejected())
        .map(|r| &r.customer)
        .collect()
}

/// `100 * part / whole` in hundredths of a percent, rounded half up.
pub fn percent_hundredths(part: u64, whole: u64) -> Option<u64> {
    (whole > 0).then(|| (20_000 * part + whole) / (2 * whole))
}

/// `100 * part / whole` rounded half up to a whole percent.
pub fn percent_whole(part: u64, whole: u64) -> Option<u64> {
    (whole > 0).then(|| (200 * part + whole) / (2 * whole))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroupBy {
    Continent,
    Industry,
    None,
}

impl core::str::FromStr for GroupBy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "continent" => Ok(GroupBy::Continent),
            "industry" => Ok(GroupBy::Industry),
            "none" => Ok(GroupBy::None),
            other => Err(format!("unknown grouping {other:?} (expected continent, industry or none)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransparencyRow {
    pub group_label: String,
    pub evaluated: u64,
    pub transparent: u64,
    /// Rounded to two decimals; `None` when nothing was evaluated.
    pub percentage: Option<f64>,
}

impl TransparencyRow {
    pub fn new(group_label: impl Into<String>, evaluated: u64, transparent: u64) -> Self {
        TransparencyRow {
            group_label: group_label.into(),
            evaluated,
            transparent,
            percentage: percent_hundredths(transparent, evaluated).map(|h| h as f64 / 100.0),
        }
    }

    fn hundredths(&self) -> Option<u64> {
        percent_hundredths(self.transparent, self.evaluated)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransparencyReport {
    pub rows: Vec<TransparencyRow>,
    pub total: TransparencyRow,
}

impl TransparencyReport {
    /// Builds the report from per-group counts; rows sort by percentage
    /// descending, then label.
    pub fn from_counts(counts: impl IntoIterator<Item = (String, u64, u64)>) -> Self {
        let mut rows: Vec<TransparencyRow> =
            counts.into_iter().map(|(label, e, t)| TransparencyRow::new(label, e, t)).collect();
        rows.sort_by(|a, b| {
            b.hundredths()
                .cmp(&a.hundredths())
                .then_with(|| a.group_label.cmp(&b.group_label))
        });
        let evaluated = rows.iter().map(|r| r.evaluated).sum();
        let transparent = rows.iter().map(|r| r.transparent).sum();
        TransparencyReport {
            rows,
            total: TransparencyRow::new(TOTAL_LABEL, evaluated, transparent),
        }
    }

    /// Group rows followed by the total row.
    pub fn all_rows(&self) -> impl Iterator<Item = &TransparencyRow> {
        self.rows.iter().chain(core::iter::once(&self.total))
    }
}

/// Display label of a continent in transparency reports, e.g. `Europe (EU)`.
pub fn continent_label(continent: Continent) -> String {
    format!("{} ({})", continent.name(), continent.code())
}

pub fn transparency_report(graph: &SupplyGraph, by: GroupBy) -> TransparencyReport {
    let transparent = transparent_set(graph);
    let mut counts: BTreeMap<String, (u64, u64)> = BTreeMap::new();
    if by == GroupBy::None {
        let evaluated = graph.company_count() as u64;
        let report = TransparencyReport::from_counts(core::iter::empty());
        return TransparencyReport {
            total: TransparencyRow::new(TOTAL_LABEL, evaluated, transparent.len() as u64),
            ..report
        };
    }
    for company in graph.companies() {
        let label = match by {
            GroupBy::Continent => company.continent.map(continent_label),
            GroupBy::Industry => company.industry.clone().filter(|i| !i.trim().is_empty()),
            GroupBy::None => unreachable!(),
        }
        .unwrap_or_else(|| UNKNOWN_GROUP.to_string());
        let entry = counts.entry(label).or_default();
        entry.0 += 1;
        entry.1 += u64::from(transparent.contains(&company.id));
    }
    TransparencyReport::from_counts(counts.into_iter().map(|(label, (e, t))| (label, e, t)))
}

/// One manually verified entry of the coverage ground truth.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TruthEntry {
    #[serde(default)]
    pub list_url: Option<String>,
    #[serde(default)]
    pub suppliers: Vec<String>,
}

pub type GroundTruth = BTreeMap<String, TruthEntry>;

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoverageRow {
    pub region: String,
    pub companies_probed: u64,
    pub published_lists_checked: u64,
    pub identified_lists_auto: u64,
    pub suppliers_checked: u64,
    pub suppliers_auto: u64,
    pub matched_initial_auto: u64,
}

impl CoverageRow {
    fn add(&mut self, other: &CoverageRow) {
        self.companies_probed += other.companies_probed;
        self.published_lists_checked += other.published_lists_checked;
        self.identified_lists_auto += other.identified_lists_auto;
        self.suppliers_checked += other.suppliers_checked;
        self.suppliers_auto += other.suppliers_auto;
        self.matched_initial_auto += other.matched_initial_auto;
    }
}

const COVERAGE_REGIONS: &[&str] = &[
    "North America",
    "Europe",
    "Asia and Middle East",
    "Africa",
    "South America",
    "Oceania",
    UNKNOWN_GROUP,
];

/// Region label used by the coverage report; Asia and the Middle East share a row.
pub fn coverage_region(continent: Option<Continent>) -> &'static str {
    match continent {
        Some(Continent::NA) => "North America",
        Some(Continent::EU) => "Europe",
        Some(Continent::AS) | Some(Continent::ME) => "Asia and Middle East",
        Some(Continent::AF) => "Africa",
        Some(Continent::SA) => "South America",
        Some(Continent::OC) => "Oceania",
        None => UNKNOWN_GROUP,
    }
}

/// Compares pipeline output with manually checked supplier lists.
///
/// A list counts as identified when an extracted relation of the company cites
/// the list URL. A checked supplier counts as found when it matches a
/// non-rejected extracted supplier of the company; it additionally counts as
/// matched to the initial list when that supplier was not added by hand.
/// Rows follow a fixed region order and end with a total row; an empty ground
/// truth yields an empty report.
pub fn coverage_report(
    graph: &SupplyGraph,
    truth: &GroundTruth,
    threshold: Threshold,
) -> Result<Vec<CoverageRow>, AnalyticsError> {
    if truth.is_empty() {
        return Ok(Vec::new());
    }
    let mut by_region: BTreeMap<&'static str, CoverageRow> = BTreeMap::new();
    for (raw_id, entry) in truth {
        let id = CompanyId::new(raw_id.as_str()).map_err(|_| AnalyticsError::ManifestMismatch(raw_id.clone()))?;
        let company = graph
            .company(&id)
            .ok_or_else(|| AnalyticsError::ManifestMismatch(raw_id.clone()))?;
        let extracted: Vec<_> = graph
            .relations()
            .filter(|r| r.customer == id && r.origin == Origin::Extracted && !r.is_rejected())
            .collect();
        let suppliers: Vec<&Company> = extracted.iter().filter_map(|r| graph.company(&r.supplier)).collect();
        let index = MatchIndex::new(suppliers.iter().copied());

        let mut row = CoverageRow {
            companies_probed: 1,
            ..CoverageRow::default()
        };
        if let Some(url) = &entry.list_url {
            row.published_lists_checked = 1;
            let found = extracted.iter().any(|r| r.provenance.iter().any(|d| d.url == *url));
            row.identified_lists_auto = u64::from(found);
        }
        row.suppliers_checked = entry.suppliers.len() as u64;
        for name in &entry.suppliers {
            if let Some(m) = index.best_match(name, threshold) {
                row.suppliers_auto += 1;
                let initial = graph
                    .company(&m.candidate)
                    .is_some_and(|c| c.metadata_source != MetadataSource::Manual);
                row.matched_initial_auto += u64::from(initial);
            }
        }
        let region = coverage_region(company.continent);
        by_region
            .entry(region)
            .or_insert_with(|| CoverageRow {
                region: region.to_string(),
                ..CoverageRow::default()
            })
            .add(&row);
    }
    let mut rows: Vec<CoverageRow> = COVERAGE_REGIONS
        .iter()
        .filter_map(|r| by_region.remove(r))
        .collect();
    let mut total = CoverageRow {
        region: TOTAL_LABEL.to_string(),
        ..CoverageRow::default()
    };
    for row in &rows {
        total.add(row);
    }
    rows.push(total);
    Ok(rows)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PeerScope {
    IndustryRegion,
    Region,
    Global,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Nudge {
    pub percentage: u64,
    pub message: String,
    pub scope: PeerScope,
    pub peers: u64,
    pub transparent_peers: u64,
}

pub fn nudge_text(percentage: u64) -> String {
    format!("{percentage}% of companies similar to yours are now sharing their supply chain data")
}

/// Share of comparable companies that are transparent.
///
/// Peers share the company's industry and continent; when there are none the
/// continent alone is used, and after that every other company. The company
/// itself is never its own peer.
pub fn nudge_message(graph: &SupplyGraph, company: &CompanyId) -> Result<Nudge, AnalyticsError> {
    let target = graph
        .company(company)
        .ok_or_else(|| AnalyticsError::UnknownCompany(company.clone()))?;
    let transparent = transparent_set(graph);
    let others = || graph.companies().filter(|c| c.id != *company);

    let group = GroupKey::of(target);
    let scopes: [(PeerScope, Vec<&Company>); 3] = [
        (
            PeerScope::IndustryRegion,
            match &group {
                Some(g) => others().filter(|c| g.contains(c)).collect(),
                None => Vec::new(),
            },
        ),
        (
            PeerScope::Region,
            match target.continent {
                Some(region) => others().filter(|c| c.continent == Some(region)).collect(),
                None => Vec::new(),
            },
        ),
        (PeerScope::Global, others().collect()),
    ];
    let (scope, peers) = scopes
        .into_iter()
        .find(|(scope, peers)| !peers.is_empty() || *scope == PeerScope::Global)
        .expect("global scope always selected");
    let total = peers.len() as u64;
    let sharing = peers.iter().filter(|c| transparent.contains(&c.id)).count() as u64;
    let percentage = percent_whole(sharing, total).unwrap_or(0);
    Ok(Nudge {
        percentage,
        message: nudge_text(percentage),
        scope,
        peers: total,
        transparent_peers: sharing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Assertion;
    use crate::model::{ContentType, RelationKey, SourceDocument, Timestamp, Verdict};

    fn id(s: &str) -> CompanyId {
        CompanyId::new(s).unwrap()
    }

    fn doc(url: &str) -> SourceDocument {
        SourceDocument::new(url, Timestamp(0), "a".repeat(64), ContentType::Plain, 1.0, "t").unwrap()
    }

    fn company(name: &str, continent: Option<Continent>) -> Company {
        let mut c = Company::named(name, MetadataSource::Seed).unwrap();
        c.continent = continent;
        c.industry = Some("Tech".into());
        c
    }

    #[test]
    fn rounding_half_up() {
        assert_eq!(percent_hundredths(585, 5671), Some(1032));
        assert_eq!(percent_hundredths(1, 8), Some(1250));
        assert_eq!(percent_hundredths(1, 1600), Some(6)); // 0.0625 -> 0.06
        assert_eq!(percent_hundredths(1, 16000), Some(1)); // 0.00625 -> 0.01
        assert_eq!(percent_hundredths(0, 0), None);
        assert_eq!(percent_whole(34, 100), Some(34));
        assert_eq!(percent_whole(1, 200), Some(1));
        assert_eq!(percent_whole(1, 3), Some(33));
    }

    #[test]
    fn transparency_rules() {
        let mut g = SupplyGraph::new();
        for n in ["A", "B", "C", "D"] {
            g.upsert_company(company(n, Some(Continent::EU))).unwrap();
        }
        g.upsert_relation(&id("a"), &id("b"), Assertion::Extracted(doc("u"))).unwrap();
        g.upsert_relation(&id("c"), &id("b"), Assertion::Predicted { confidence: 0.5 }).unwrap();
        g.upsert_relation(&id("d"), &id("b"), Assertion::Extracted(doc("v"))).unwrap();
        g.set_review(&RelationKey::new(id("d"), id("b"), Origin::Extracted), Verdict::Rejected, &id("b"), Timestamp(0))
            .unwrap();
        assert!(is_transparent(&g, &id("a")).unwrap());
        assert!(!is_transparent(&g, &id("c")).unwrap());
        assert!(!is_transparent(&g, &id("d")).unwrap());
        assert!(is_transparent(&g, &id("zz")).is_err());
    }

    #[test]
    fn empty_graph_report() {
        let r = transparency_report(&SupplyGraph::new(), GroupBy::Continent);
        assert!(r.rows.is_empty());
        assert_eq!(r.total.evaluated, 0);
        assert_eq!(r.total.percentage, None);
    }

    #[test]
    fn unknown_row_and_totals() {
        let mut g = SupplyGraph::new();
        g.upsert_company(company("A", Some(Continent::EU))).unwrap();
        g.upsert_company(company("B", None)).unwrap();
        g.upsert_company(company("C", None)).unwrap();
        g.upsert_relation(&id("b"), &id("a"), Assertion::Extracted(doc("u"))).unwrap();
        let r = transparency_report(&g, GroupBy::Continent);
        assert_eq!(r.rows[0].group_label, UNKNOWN_GROUP);
        assert_eq!(r.rows[0].percentage, Some(50.0));
        assert_eq!(r.rows[1].group_label, "Europe (EU)");
        assert_eq!((r.total.evaluated, r.total.transparent), (3, 1));
        assert_eq!(r.total.percentage, Some(33.33));
        let none = transparency_report(&g, GroupBy::None);
        assert!(none.rows.is_empty());
        assert_eq!(none.total.evaluated, 3);
    }

    #[test]
    fn coverage_counts() {
        let mut g = SupplyGraph::new();
        g.upsert_company(company("Apple", Some(Continent::NA))).unwrap();
        for n in ["Foxconn", "Pegatron", "Tiny Parts"] {
            g.upsert_company(company(n, Some(Continent::AS))).unwrap();
        }
        let mut manual = Company::named("Handmade", MetadataSource::Manual).unwrap();
        manual.continent = Some(Continent::AS);
        g.upsert_company(manual).unwrap();
        let list = "https://apple.example/suppliers.pdf";
        g.upsert_relation(&id("apple"), &id("foxconn"), Assertion::Extracted(doc(list))).unwrap();
        g.upsert_relation(&id("apple"), &id("pegatron"), Assertion::Extracted(doc(list))).unwrap();
        g.upsert_relation(&id("apple"), &id("handmade"), Assertion::Extracted(doc(list))).unwrap();

        let mut truth = GroundTruth::new();
        truth.insert(
            "apple".into(),
            TruthEntry {
                list_url: Some(list.into()),
                suppliers: ["Foxconn", "Pegatron Corp", "Handmade", "Unknown Widgets", "Tiny Parts"]
                    .map(String::from)
                    .to_vec(),
            },
        );
        truth.insert("foxconn".into(), TruthEntry::default());
        let rows = coverage_report(&g, &truth, Threshold::DEFAULT).unwrap();
        assert_eq!(rows.len(), 3);
        let na = &rows[0];
        assert_eq!(na.region, "North America");
        assert_eq!(
            (na.companies_probed, na.published_lists_checked, na.identified_lists_auto),
            (1, 1, 1)
        );
        assert_eq!((na.suppliers_checked, na.suppliers_auto, na.matched_initial_auto), (5, 3, 2));
        assert_eq!(rows[1].region, "Asia and Middle East");
        assert_eq!(rows[2].region, TOTAL_LABEL);
        assert_eq!(rows[2].companies_probed, 2);

        assert!(coverage_report(&g, &GroundTruth::new(), Threshold::DEFAULT).unwrap().is_empty());
        truth.insert("ghost".into(), TruthEntry::default());
        assert_eq!(
            coverage_report(&g, &truth, Threshold::DEFAULT).unwrap_err(),
            AnalyticsError::ManifestMismatch("ghost".into())
        );
    }

    #[test]
    fn nudge_fallbacks() {
        let mut g = SupplyGraph::new();
        g.upsert_company(company("Solo", Some(Continent::OC))).unwrap();
        let n = nudge_message(&g, &id("solo")).unwrap();
        assert_eq!((n.scope, n.peers, n.percentage), (PeerScope::Global, 0, 0));

        let mut other = company("Other", Some(Continent::EU));
        other.industry = Some("Retail".into());
        g.upsert_company(other).unwrap();
        g.upsert_company(company("Third", Some(Continent::EU))).unwrap();
        g.upsert_relation(&id("other"), &id("third"), Assertion::Extracted(doc("u"))).unwrap();
        let n = nudge_message(&g, &id("solo")).unwrap();
        assert_eq!((n.scope, n.peers, n.percentage), (PeerScope::Global, 2, 50));
        let n = nudge_message(&g, &id("third")).unwrap();
        assert_eq!((n.scope, n.peers, n.percentage), (PeerScope::Region, 1, 100));
        assert_eq!(n.message, "100% of companies similar to yours are now sharing their supply chain data");
    }
}
