//! Supplier-relation graph and the pure algorithms around it: company-name
//! matching, document reliability scoring, supplier recognition and
//! validation, rule-based supplier prediction and transparency analytics.
//!
//! The crate is `no_std` (with `alloc`) when built without the default `std`
//! feature. File, network and HTTP concerns live in the `supplynet` crate.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod analytics;
mod countries;
pub mod error;
pub mod graph;
pub mod matching;
pub mod model;
pub mod pipeline;
pub mod predict;
pub mod recognize;
pub mod scoring;
pub mod snapshot;
pub mod text;

pub use error::{AnalyticsError, GraphError, MatchError, ModelError, PredictError, RecognizeError, SnapshotError};
pub use graph::{Assertion, GraphSnapshot, RelationFilter, SupplyGraph, Upserted, SCHEMA_VERSION};
pub use model::{
    AuditEntry, Company, CompanyId, ContentType, Continent, MetadataSource, Origin, RelationKey, Review,
    SourceDocument, SupplierRelation, Timestamp, Verdict, RELIABILITY_THRESHOLD,
};
