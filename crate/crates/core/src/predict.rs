//! Metadata patches and rule-based supplier prediction.
//!
//! Companies are grouped by `(industry, continent)`. Within a group, members
//! are ranked by the number of distinct customers they supply through
//! extracted or manual, non-rejected relations. The top of that ranking is
//! proposed as likely suppliers for other members of the group.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, PredictError};
use crate::graph::SupplyGraph;
use crate::model::{Company, CompanyId, Continent, MetadataSource, Origin, RELIABILITY_THRESHOLD};

pub const DEFAULT_K: usize = 5;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetadataPatch {
    pub company: Option<CompanyId>,
    pub industry: Option<String>,
    pub country: Option<String>,
    pub continent: Option<Continent>,
    pub contact_email: Option<String>,
    pub employee_count: Option<u64>,
    pub revenue_usd: Option<f64>,
    pub source: String,
}

impl MetadataPatch {
    pub fn is_empty(&self) -> bool {
        self.industry.is_none()
            && self.country.is_none()
            && self.continent.is_none()
            && self.contact_email.is_none()
            && self.employee_count.is_none()
            && self.revenue_usd.is_none()
    }

    pub fn field_count(&self) -> usize {
        [
            self.industry.is_some(),
            self.country.is_some(),
            self.continent.is_some(),
            self.contact_email.is_some(),
            self.employee_count.is_some(),
            self.revenue_usd.is_some(),
        ]
        .into_iter()
        .filter(|b| *b)
        .count()
    }

    /// Fills the company's absent fields; values already present are kept.
    /// A continent is derived from the country when the patch has none.
    pub fn apply(&self, graph: &mut SupplyGraph, id: &CompanyId) -> Result<(), GraphError> {
        let existing = graph.company(id).ok_or_else(|| GraphError::UnknownCompany(id.clone()))?;
        let mut fields = Company {
            id: id.clone(),
            legal_name: existing.legal_name.clone(),
            aliases: BTreeSet::new(),
            ticker: None,
            market_cap_usd: None,
            industry: self.industry.clone(),
            country: self.country.as_ref().map(|c| c.trim().to_ascii_uppercase()),
            continent: self.continent,
            website_domain: None,
            contact_email: self.contact_email.clone(),
            employee_count: self.employee_count,
            revenue_usd: self.revenue_usd,
            metadata_source: MetadataSource::KnowledgeBase,
        };
        if fields.continent.is_none() {
            fields.continent = fields.country.as_deref().and_then(Continent::of_country);
        }
        graph.fill_company(id, &fields)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct GroupKey {
    pub industry: String,
    pub region: Continent,
}

impl GroupKey {
    pub fn of(company: &Company) -> Option<GroupKey> {
        let industry = company.industry.as_ref().filter(|i| !i.trim().is_empty())?;
        Some(GroupKey {
            industry: industry.clone(),
            region: company.continent?,
        })
    }

    pub fn contains(&self, company: &Company) -> bool {
        GroupKey::of(company).as_ref() == Some(self)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PredictedLink {
    pub customer: CompanyId,
    pub supplier: CompanyId,
    pub group: GroupKey,
    pub support: usize,
    pub confidence: f64,
}

/// Group members with nonzero support, by support descending then id.
pub fn supplier_rank(graph: &SupplyGraph, group: &GroupKey) -> Vec<(CompanyId, usize)> {
    let members: BTreeSet<&CompanyId> = graph.companies().filter(|c| group.contains(c)).map(|c| &c.id).collect();
    let mut customers: BTreeMap<&CompanyId, BTreeSet<&CompanyId>> = BTreeMap::new();
    for relation in graph.relations() {
        if relation.origin == Origin::Predicted || relation.is_rejected() {
            continue;
        }
        if members.contains(&relation.supplier) {
            customers.entry(&relation.supplier).or_default().insert(&relation.customer);
        }
    }
    let mut ranked: Vec<(CompanyId, usize)> =
        customers.into_iter().map(|(id, set)| (id.clone(), set.len())).collect();
    ranked.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked
}

/// Confidence for a prediction: `0.3 + 0.3 * support / max_support`.
pub fn prediction_confidence(support: usize, max_support: usize) -> f64 {
    let half = RELIABILITY_THRESHOLD / 2.0;
    half + half * (support as f64 / max_support as f64)
}

/// Top-`k` likely suppliers for `company` from its group ranking, skipping the
/// company itself and its current non-rejected suppliers. With
/// `only_if_empty`, companies that already have extracted or manual suppliers
/// get no predictions.
pub fn predict_suppliers(
    graph: &SupplyGraph,
    company: &CompanyId,
    k: usize,
    only_if_empty: bool,
) -> Result<Vec<PredictedLink>, PredictError> {
    let target = graph
        .company(company)
        .ok_or_else(|| PredictError::UnknownCompany(company.clone()))?;
    let group = GroupKey::of(target).ok_or_else(|| PredictError::MissingMetadata(company.clone()))?;

    let existing: BTreeSet<&CompanyId> = graph
        .relations()
        .filter(|r| r.customer == *company && !r.is_rejected())
        .map(|r| &r.supplier)
        .collect();
    if only_if_empty
        && graph
            .relations()
            .any(|r| r.customer == *company && !r.is_rejected() && r.origin != Origin::Predicted)
    {
        return Ok(Vec::new());
    }

    let ranking = supplier_rank(graph, &group);
    let Some(max_support) = ranking.first().map(|(_, s)| *s) else {
        return Ok(Vec::new());
    };
    Ok(ranking
        .into_iter()
        .filter(|(id, _)| id != company && !existing.contains(id))
        .take(k)
        .map(|(supplier, support)| PredictedLink {
            customer: company.clone(),
            supplier,
            group: group.clone(),
            support,
            confidence: prediction_confidence(support, max_support),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Assertion;
    use crate::model::{RelationKey, Timestamp, Verdict};

    fn id(s: &str) -> CompanyId {
        CompanyId::new(s).unwrap()
    }

    fn member(g: &mut SupplyGraph, name: &str) {
        let mut c = Company::named(name, MetadataSource::Seed).unwrap();
        c.industry = Some("Semiconductors".into());
        c.continent = Some(Continent::AS);
        g.upsert_company(c).unwrap();
    }

    // S1 supplies three customers, S2 one; t1 has no suppliers.
    fn fixture() -> SupplyGraph {
        let mut g = SupplyGraph::new();
        for name in ["S1", "S2", "C1", "C2", "C3", "T1"] {
            member(&mut g, name);
        }
        for c in ["c1", "c2", "c3"] {
            g.upsert_relation(&id(c), &id("s1"), Assertion::Manual).unwrap();
        }
        g.upsert_relation(&id("c1"), &id("s2"), Assertion::Manual).unwrap();
        g
    }

    #[test]
    fn rank_counts_distinct_customers() {
        let g = fixture();
        let group = GroupKey {
            industry: "Semiconductors".into(),
            region: Continent::AS,
        };
        assert_eq!(supplier_rank(&g, &group), [(id("s1"), 3), (id("s2"), 1)]);
        let empty = GroupKey {
            industry: "Retail".into(),
            region: Continent::EU,
        };
        assert!(supplier_rank(&g, &empty).is_empty());
    }

    #[test]
    fn rank_ties_by_id() {
        let mut g = fixture();
        g.upsert_relation(&id("c2"), &id("s2"), Assertion::Manual).unwrap();
        g.upsert_relation(&id("c3"), &id("s2"), Assertion::Manual).unwrap();
        let group = GroupKey::of(g.company(&id("t1")).unwrap()).unwrap();
        assert_eq!(supplier_rank(&g, &group), [(id("s1"), 3), (id("s2"), 3)]);
    }

    #[test]
    fn predicted_and_rejected_edges_do_not_count() {
        let mut g = fixture();
        g.upsert_relation(&id("t1"), &id("s2"), Assertion::Predicted { confidence: 0.4 }).unwrap();
        let key = RelationKey::new(id("c3"), id("s1"), Origin::Manual);
        g.set_review(&key, Verdict::Rejected, &id("s1"), Timestamp(0)).unwrap();
        let group = GroupKey::of(g.company(&id("t1")).unwrap()).unwrap();
        assert_eq!(supplier_rank(&g, &group), [(id("s1"), 2), (id("s2"), 1)]);
    }

    #[test]
    fn predictions_follow_rank() {
        let g = fixture();
        let p = predict_suppliers(&g, &id("t1"), 2, false).unwrap();
        let got: Vec<_> = p.iter().map(|l| (l.supplier.as_str(), l.support)).collect();
        assert_eq!(got, [("s1", 3), ("s2", 1)]);
        assert!((p[0].confidence - 0.6).abs() < 1e-12);
        assert!((p[1].confidence - 0.4).abs() < 1e-12);
    }

    #[test]
    fn predictions_skip_existing_and_self() {
        let mut g = fixture();
        g.upsert_relation(&id("t1"), &id("s1"), Assertion::Manual).unwrap();
        let p = predict_suppliers(&g, &id("t1"), 5, false).unwrap();
        assert_eq!(p.iter().map(|l| l.supplier.as_str()).collect::<Vec<_>>(), ["s2"]);
        let own = predict_suppliers(&g, &id("s1"), 5, false).unwrap();
        assert!(own.iter().all(|l| l.supplier != id("s1")));
        assert!(predict_suppliers(&g, &id("t1"), 5, true).unwrap().is_empty());
    }

    #[test]
    fn missing_metadata() {
        let mut g = fixture();
        g.upsert_company(Company::named("Loner", MetadataSource::Manual).unwrap()).unwrap();
        assert_eq!(
            predict_suppliers(&g, &id("loner"), 5, false).unwrap_err(),
            PredictError::MissingMetadata(id("loner"))
        );
    }

    #[test]
    fn patches_never_overwrite() {
        let mut g = SupplyGraph::new();
        let mut apple = Company::named("Apple Inc.", MetadataSource::Manual).unwrap();
        apple.industry = Some("Consumer Electronics".into());
        g.upsert_company(apple).unwrap();
        let patch = MetadataPatch {
            industry: Some("IT".into()),
            country: Some("us".into()),
            source: "fixture".into(),
            ..MetadataPatch::default()
        };
        assert_eq!(patch.field_count(), 2);
        patch.apply(&mut g, &id("apple")).unwrap();
        let apple = g.company(&id("apple")).unwrap();
        assert_eq!(apple.industry.as_deref(), Some("Consumer Electronics"));
        assert_eq!(apple.country.as_deref(), Some("US"));
        assert_eq!(apple.continent, Some(Continent::NA));
        assert_eq!(apple.metadata_source, MetadataSource::Manual);
    }
}
