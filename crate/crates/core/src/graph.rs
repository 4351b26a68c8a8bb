//! The company registry and the supplier-relation graph.
//!
//! Relations are keyed by `(customer, supplier, origin)`, so an extracted and a
//! manual assertion of the same pair are separate edges. All mutations go
//! through `&mut SupplyGraph`; callers that share a graph across threads wrap it
//! in a single-writer lock and read from cloned snapshots.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::string::String;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::error::{GraphError, ModelError};
use crate::matching::normalize_name;
use crate::model::{
    AuditEntry, Company, CompanyId, Origin, RelationKey, Review, SourceDocument, SupplierRelation, Timestamp,
    Verdict, RELIABILITY_THRESHOLD,
};

/// Version written into snapshot headers.
pub const SCHEMA_VERSION: u64 = 1;

/// What is being asserted when a relation is upserted.
#[derive(Clone, Debug, PartialEq)]
pub enum Assertion {
    Extracted(SourceDocument),
    Predicted { confidence: f64 },
    Manual,
}

impl Assertion {
    pub fn origin(&self) -> Origin {
        match self {
            Assertion::Extracted(_) => Origin::Extracted,
            Assertion::Predicted { .. } => Origin::Predicted,
            Assertion::Manual => Origin::Manual,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Upserted {
    pub relation: SupplierRelation,
    pub created: bool,
    pub changed: bool,
}

/// Which relations a read returns. The default hides rejected relations.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RelationFilter {
    pub origins: BTreeSet<Origin>,
    pub include_rejected: bool,
}

impl Default for RelationFilter {
    fn default() -> Self {
        RelationFilter {
            origins: Origin::ALL.into_iter().collect(),
            include_rejected: false,
        }
    }
}

impl RelationFilter {
    pub fn only(origins: impl IntoIterator<Item = Origin>) -> Self {
        RelationFilter {
            origins: origins.into_iter().collect(),
            include_rejected: false,
        }
    }

    pub fn with_rejected(mut self, include: bool) -> Self {
        self.include_rejected = include;
        self
    }

    pub fn accepts(&self, relation: &SupplierRelation) -> bool {
        self.origins.contains(&relation.origin) && (self.include_rejected || !relation.is_rejected())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GraphSnapshot {
    pub schema_version: u64,
    pub companies: Vec<Company>,
    pub relations: Vec<SupplierRelation>,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct SupplyGraph {
    companies: BTreeMap<CompanyId, Company>,
    by_canonical: BTreeMap<String, CompanyId>,
    relations: BTreeMap<RelationKey, SupplierRelation>,
}

impl SupplyGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn company_count(&self) -> usize {
        self.companies.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn company(&self, id: &CompanyId) -> Option<&Company> {
        self.companies.get(id)
    }

    pub fn contains(&self, id: &CompanyId) -> bool {
        self.companies.contains_key(id)
    }

    /// Companies in id order.
    pub fn companies(&self) -> impl Iterator<Item = &Company> {
        self.companies.values()
    }

    /// Relations in `(customer, supplier, origin)` order.
    pub fn relations(&self) -> impl Iterator<Item = &SupplierRelation> {
        self.relations.values()
    }

    pub fn relation(&self, key: &RelationKey) -> Option<&SupplierRelation> {
        self.relations.get(key)
    }

    /// Id of the company whose canonical legal name equals that of `name`.
    pub fn find_by_name(&self, name: &str) -> Option<&CompanyId> {
        let canonical = normalize_name(name).ok()?;
        self.by_canonical.get(canonical.as_str())
    }

    /// Inserts a company, or merges it into the existing record with the same id
    /// or the same canonical legal name. Present fields are never overwritten.
    pub fn upsert_company(&mut self, record: Company) -> Result<CompanyId, GraphError> {
        record.validate()?;
        let canonical = normalize_name(&record.legal_name)
            .map_err(|_| ModelError::EmptyName)?
            .as_str()
            .into();
        let target = if self.companies.contains_key(&record.id) {
            Some(record.id.clone())
        } else {
            self.by_canonical.get(&canonical).cloned()
        };
        match target {
            Some(id) => {
                let existing = self.companies.get_mut(&id).expect("index points at a registered company");
                existing.merge_from(&record);
                Ok(id)
            }
            None => {
                let id = record.id.clone();
                self.index_name(canonical, &id);
                self.companies.insert(id.clone(), record);
                Ok(id)
            }
        }
    }

    /// Fills absent fields of an existing company from `patch`.
    pub fn fill_company(&mut self, id: &CompanyId, patch: &Company) -> Result<(), GraphError> {
        let company = self
            .companies
            .get_mut(id)
            .ok_or_else(|| GraphError::UnknownCompany(id.clone()))?;
        let mut updated = company.clone();
        updated.merge_from(patch);
        updated.validate()?;
        *company = updated;
        Ok(())
    }

    // Smallest id wins so the index does not depend on insertion order.
    fn index_name(&mut self, canonical: String, id: &CompanyId) {
        match self.by_canonical.get(&canonical) {
            Some(existing) if existing <= id => {}
            _ => {
                self.by_canonical.insert(canonical, id.clone());
            }
        }
    }

    fn require(&self, id: &CompanyId) -> Result<(), GraphError> {
        if self.companies.contains_key(id) {
            Ok(())
        } else {
            Err(GraphError::UnknownCompany(id.clone()))
        }
    }

    pub fn upsert_relation(
        &mut self,
        customer: &CompanyId,
        supplier: &CompanyId,
        assertion: Assertion,
    ) -> Result<Upserted, GraphError> {
        if customer == supplier {
            return Err(GraphError::SelfLoop(customer.clone()));
        }
        self.require(customer)?;
        self.require(supplier)?;
        let key = RelationKey::new(customer.clone(), supplier.clone(), assertion.origin());

        let (confidence, provenance) = match assertion {
            Assertion::Extracted(doc) => {
                doc.validate()?;
                (doc.score, Some(doc))
            }
            Assertion::Predicted { confidence } => {
                if !(confidence > 0.0 && confidence <= RELIABILITY_THRESHOLD) {
                    return Err(GraphError::PredictedConfidence(confidence));
                }
                (confidence, None)
            }
            Assertion::Manual => (1.0, None),
        };

        if let Some(existing) = self.relations.get_mut(&key) {
            let changed = match (key.origin, provenance) {
                (Origin::Extracted, Some(doc)) => {
                    if existing.provenance.iter().any(|d| d.url == doc.url) {
                        false
                    } else {
                        existing.confidence = existing.confidence.max(doc.score);
                        existing.provenance.push(doc);
                        true
                    }
                }
                (Origin::Predicted, _) => {
                    let changed = existing.confidence != confidence;
                    existing.confidence = confidence;
                    changed
                }
                _ => false,
            };
            return Ok(Upserted {
                relation: existing.clone(),
                created: false,
                changed,
            });
        }

        let relation = SupplierRelation {
            customer: key.customer.clone(),
            supplier: key.supplier.clone(),
            origin: key.origin,
            review: Review::Unreviewed,
            confidence,
            provenance: provenance.into_iter().collect(),
            audit: Vec::new(),
        };
        self.relations.insert(key, relation.clone());
        Ok(Upserted {
            relation,
            created: true,
            changed: true,
        })
    }

    /// Records a verdict on a relation; the latest verdict wins and every call
    /// appends one audit entry.
    pub fn set_review(
        &mut self,
        key: &RelationKey,
        verdict: Verdict,
        actor: &CompanyId,
        at: Timestamp,
    ) -> Result<SupplierRelation, GraphError> {
        self.require(actor)?;
        let relation = self
            .relations
            .get_mut(key)
            .ok_or_else(|| GraphError::UnknownRelation(key.clone()))?;
        relation.review = verdict.as_review();
        relation.audit.push(AuditEntry {
            actor: actor.clone(),
            verdict,
            at,
        });
        Ok(relation.clone())
    }

    /// Relations where `company` is the customer, sorted by `(origin, supplier)`.
    pub fn suppliers_of(
        &self,
        company: &CompanyId,
        filter: &RelationFilter,
    ) -> Result<Vec<&SupplierRelation>, GraphError> {
        self.require(company)?;
        let mut rows: Vec<&SupplierRelation> = self
            .relations
            .values()
            .skip_while(|r| r.customer < *company)
            .take_while(|r| r.customer == *company)
            .filter(|r| filter.accepts(r))
            .collect();
        rows.sort_by(|a, b| (a.origin, &a.supplier).cmp(&(b.origin, &b.supplier)));
        Ok(rows)
    }

    /// Relations where `company` is the supplier, sorted by `(origin, customer)`.
    pub fn customers_of(
        &self,
        company: &CompanyId,
        filter: &RelationFilter,
    ) -> Result<Vec<&SupplierRelation>, GraphError> {
        self.require(company)?;
        let mut rows: Vec<&SupplierRelation> = self
            .relations
            .values()
            .filter(|r| r.supplier == *company && filter.accepts(r))
            .collect();
        rows.sort_by(|a, b| (a.origin, &a.customer).cmp(&(b.origin, &b.customer)));
        Ok(rows)
    }

    pub fn snapshot(&self) -> GraphSnapshot {
        GraphSnapshot {
            schema_version: SCHEMA_VERSION,
            companies: self.companies.values().cloned().collect(),
            relations: self.relations.values().cloned().collect(),
        }
    }

    /// Rebuilds a graph from snapshot records, checking every invariant.
    pub fn from_snapshot(snapshot: GraphSnapshot) -> Result<Self, GraphError> {
        let mut graph = SupplyGraph::new();
        for company in snapshot.companies {
            graph.insert_company(company)?;
        }
        for relation in snapshot.relations {
            graph.insert_relation(relation)?;
        }
        Ok(graph)
    }

    /// Adds a complete company record; fails on a duplicate id.
    pub fn insert_company(&mut self, company: Company) -> Result<(), GraphError> {
        company.validate()?;
        if self.companies.contains_key(&company.id) {
            return Err(GraphError::Duplicate(company.id.as_str().into()));
        }
        let canonical: String = normalize_name(&company.legal_name)
            .map_err(|_| ModelError::EmptyName)?
            .as_str()
            .into();
        self.index_name(canonical, &company.id);
        self.companies.insert(company.id.clone(), company);
        Ok(())
    }

    /// Adds a complete relation record; fails on a duplicate key or broken invariant.
    pub fn insert_relation(&mut self, relation: SupplierRelation) -> Result<(), GraphError> {
        relation.validate()?;
        self.require(&relation.customer)?;
        self.require(&relation.supplier)?;
        for entry in &relation.audit {
            self.require(&entry.actor)?;
        }
        let key = relation.key();
        if self.relations.contains_key(&key) {
            return Err(GraphError::Duplicate(alloc::format!(
                "{}->{} ({})",
                key.customer,
                key.supplier,
                key.origin
            )));
        }
        self.relations.insert(key, relation);
        Ok(())
    }
}
