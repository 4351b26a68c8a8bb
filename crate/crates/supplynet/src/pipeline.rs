//! The resumable collection pipeline.
//!
//! Each company passes through the nine stages of
//! [`Stage`](supplynet_core::pipeline::Stage). A stage reads the blobs of
//! earlier stages from the [`IntermediateStore`] and writes its own; stages
//! already marked done are skipped, so an interrupted run picks up where it
//! stopped. The upsert stage replays its stored assertions on every run,
//! which is harmless because relation upserts are idempotent.

use std::collections::BTreeSet;
use std::path::PathBuf;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use supplynet_core::graph::Assertion;
use supplynet_core::matching::{normalize_name, MatchIndex, Threshold};
use supplynet_core::pipeline::{build_queries, CompanyRun, PipelineReport, SearchHit, SearchQuery, Stage, StageStatus};
use supplynet_core::recognize::{validate_mentions, CandidateMention, Gazetteer};
use supplynet_core::scoring::score_document;
use supplynet_core::{Company, CompanyId, ContentType, RecognizeError, SourceDocument, SupplyGraph, Timestamp};
use thiserror::Error;

use crate::extract::{extract_text, ExtractedText, PdfExtractor, SidecarPdf};
use crate::fetch::{Fetcher, FixtureFetcher};
use crate::files::{save_snapshot, FileError};
use crate::manifest::FixtureManifest;
use crate::recognizer::{EntityRecognizer, GazetteerRecognizer};
use crate::search::{FixtureSearch, SearchClient, SearchError, DEFAULT_MAX_RESULTS};
use crate::store::{IntermediateStore, StoreError};

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Store(#[from] StoreError),
    #[error("cannot write snapshot: {0}")]
    Snapshot(#[from] FileError),
    #[error("search quota exceeded while processing {0}; run stopped")]
    QuotaExceeded(CompanyId),
    #[error("run interrupted after stage {stage} of {company}")]
    Interrupted { company: CompanyId, stage: Stage },
}

pub struct PipelineClients<'a> {
    pub search: &'a dyn SearchClient,
    pub fetcher: &'a dyn Fetcher,
    pub pdf: &'a dyn PdfExtractor,
    pub recognizer: &'a dyn EntityRecognizer,
}

/// Clients that serve everything from a fixture manifest, with the gazetteer
/// recognizer built from the registry.
pub struct FixtureClients {
    pub search: FixtureSearch,
    pub fetcher: FixtureFetcher,
    pub pdf: SidecarPdf,
    pub recognizer: GazetteerRecognizer,
}

impl FixtureClients {
    pub fn new(manifest: FixtureManifest, graph: &SupplyGraph) -> Self {
        FixtureClients {
            search: FixtureSearch::new(manifest.clone()),
            fetcher: FixtureFetcher::new(manifest.clone()),
            pdf: SidecarPdf::new(manifest),
            recognizer: GazetteerRecognizer(Gazetteer::new(graph.companies())),
        }
    }

    pub fn clients(&self) -> PipelineClients<'_> {
        PipelineClients {
            search: &self.search,
            fetcher: &self.fetcher,
            pdf: &self.pdf,
            recognizer: &self.recognizer,
        }
    }
}

#[derive(Clone, Debug)]
pub struct PipelineOptions {
    pub max_results: usize,
    pub threshold: Threshold,
    /// Discard stored stage results and recompute everything.
    pub force: bool,
    /// Written by the commit stage of every company and at the end of the run.
    pub snapshot_path: Option<PathBuf>,
    /// Stops the run right after this stage of this company completes, as if
    /// the process had been killed there.
    pub stop_after: Option<(CompanyId, Stage)>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        PipelineOptions {
            max_results: DEFAULT_MAX_RESULTS,
            threshold: Threshold::DEFAULT,
            force: false,
            snapshot_path: None,
            stop_after: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchedDoc {
    pub url: String,
    pub content_hash: String,
    pub content_type: ContentType,
    pub fetched_at: Timestamp,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FetchBlob {
    pub documents: Vec<FetchedDoc>,
    /// `(url, reason)` for hits that could not be fetched.
    pub errors: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtractedDoc {
    pub fetched: FetchedDoc,
    pub extracted: ExtractedText,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScoredDoc {
    pub document: SourceDocument,
    /// Kept only for reliable documents, which are the only ones read further.
    pub text: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidatedLink {
    pub supplier: CompanyId,
    pub document_url: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidateBlob {
    pub links: Vec<ValidatedLink>,
    pub mentions_seen: u64,
    pub mentions_matched: u64,
    pub mentions_dropped: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UpsertRecord {
    pub supplier: CompanyId,
    pub document: SourceDocument,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CommitBlob {
    pub relations: u64,
}

enum Failure {
    /// Recorded against the company; the run continues.
    Company(String),
    Fatal(PipelineError),
}

impl From<StoreError> for Failure {
    fn from(e: StoreError) -> Self {
        Failure::Fatal(e.into())
    }
}

struct Runner<'a> {
    store: &'a IntermediateStore,
    clients: &'a PipelineClients<'a>,
    options: &'a PipelineOptions,
    index: &'a MatchIndex,
    executed: u64,
    skipped: u64,
}

impl<'a> Runner<'a> {
    /// Returns the stored result of a done stage, or runs `work` and stores
    /// its result.
    fn stage<T, F>(&mut self, company: &CompanyId, stage: Stage, work: F) -> Result<T, Failure>
    where
        T: Serialize + DeserializeOwned,
        F: FnOnce() -> Result<T, Failure>,
    {
        if self.store.status(company, stage)? == StageStatus::Done {
            if let Some(blob) = self.store.read_blob(company, stage)? {
                self.skipped += 1;
                return Ok(blob);
            }
            tracing::warn!(%company, %stage, "stage marked done but its blob is missing; recomputing");
            self.store.set_status(company, stage, StageStatus::Pending)?;
        }
        let blob = match work() {
            Ok(blob) => blob,
            Err(Failure::Company(reason)) => {
                self.store.set_status(company, stage, StageStatus::Failed)?;
                return Err(Failure::Company(format!("{stage}: {reason}")));
            }
            Err(fatal) => return Err(fatal),
        };
        self.store.complete(company, stage, &blob)?;
        self.executed += 1;
        if let Some((c, s)) = &self.options.stop_after {
            if c == company && *s == stage {
                return Err(Failure::Fatal(PipelineError::Interrupted {
                    company: company.clone(),
                    stage,
                }));
            }
        }
        Ok(blob)
    }

    fn company(&mut self, graph: &mut SupplyGraph, company: &Company, run: &mut CompanyRun) -> Result<(), Failure> {
        let id = &company.id;
        let store = self.store;
        let clients = self.clients;
        let options = self.options;

        let queries: Vec<SearchQuery> = self.stage(id, Stage::Queries, || Ok(build_queries(company)))?;

        let hits: Vec<SearchHit> = self.stage(id, Stage::Search, || {
            let mut seen = BTreeSet::new();
            let mut hits = Vec::new();
            for query in &queries {
                let found = clients.search.search(query, options.max_results).map_err(|e| match e {
                    SearchError::QuotaExceeded => Failure::Fatal(PipelineError::QuotaExceeded(id.clone())),
                    other => Failure::Company(other.to_string()),
                })?;
                for hit in found {
                    if url::Url::parse(&hit.url).is_err() {
                        tracing::debug!(url = %hit.url, "dropping search hit with invalid url");
                        continue;
                    }
                    if seen.insert(hit.url.clone()) {
                        hits.push(hit);
                    }
                }
            }
            Ok(hits)
        })?;

        let fetched: FetchBlob = self.stage(id, Stage::Fetch, || {
            let mut blob = FetchBlob::default();
            for hit in &hits {
                match clients.fetcher.fetch(hit) {
                    Ok(raw) => {
                        let content_hash = store.put_raw(id, &raw.bytes)?;
                        blob.documents.push(FetchedDoc {
                            url: raw.url,
                            content_hash,
                            content_type: raw.content_type,
                            fetched_at: raw.fetched_at,
                        });
                    }
                    Err(e) => {
                        tracing::warn!(company = %id, url = %hit.url, error = %e, "fetch failed");
                        blob.errors.push((hit.url.clone(), e.to_string()));
                    }
                }
            }
            Ok(blob)
        })?;
        run.documents_fetched = fetched.documents.len() as u64;

        let extracted: Vec<ExtractedDoc> = self.stage(id, Stage::Extract, || {
            fetched
                .documents
                .iter()
                .map(|doc| {
                    let raw = supplynet_core::pipeline::RawDocument {
                        url: doc.url.clone(),
                        bytes: store.get_raw(id, &doc.content_hash)?,
                        content_type: doc.content_type,
                        fetched_at: doc.fetched_at,
                    };
                    Ok(ExtractedDoc {
                        fetched: doc.clone(),
                        extracted: extract_text(&raw, clients.pdf),
                    })
                })
                .collect()
        })?;

        let scored: Vec<ScoredDoc> = self.stage(id, Stage::Score, || {
            let name = normalize_name(&company.legal_name).map_err(|e| Failure::Company(e.to_string()))?;
            extracted
                .iter()
                .map(|doc| {
                    let score = score_document(&name, &doc.fetched.url, &doc.extracted.text);
                    let document = SourceDocument::new(
                        doc.fetched.url.clone(),
                        doc.fetched.fetched_at,
                        doc.fetched.content_hash.clone(),
                        doc.fetched.content_type,
                        score.value(),
                        doc.extracted.extractor_id.clone(),
                    )
                    .map_err(|e| Failure::Company(e.to_string()))?;
                    let text = score.reliable().then(|| doc.extracted.text.clone());
                    Ok(ScoredDoc { document, text })
                })
                .collect()
        })?;
        let reliable: Vec<&ScoredDoc> = scored.iter().filter(|d| d.document.reliable).collect();
        run.documents_reliable = reliable.len() as u64;
        run.reliable_urls = reliable.iter().map(|d| d.document.url.clone()).collect();

        let mentions: Vec<CandidateMention> = self.stage(id, Stage::Recognize, || {
            let mut all = Vec::new();
            for doc in &reliable {
                let text = doc.text.as_deref().unwrap_or_default();
                match clients.recognizer.recognize(company, text, &doc.document.url) {
                    Ok(found) => all.extend(found),
                    Err(RecognizeError::MalformedResponse(reason)) => {
                        tracing::warn!(company = %id, url = %doc.document.url, %reason, "recognizer reply discarded");
                    }
                    Err(e) => return Err(Failure::Company(e.to_string())),
                }
            }
            Ok(all)
        })?;

        let index = self.index;
        let validated: ValidateBlob = self.stage(id, Stage::Validate, || {
            let mut blob = ValidateBlob::default();
            let mut kept = BTreeSet::new();
            for doc in &reliable {
                let url = &doc.document.url;
                let of_doc: Vec<CandidateMention> =
                    mentions.iter().filter(|m| m.document_url == *url).cloned().collect();
                let v = validate_mentions(&of_doc, index, id, options.threshold);
                blob.mentions_seen += v.seen as u64;
                blob.mentions_matched += v.matched as u64;
                blob.mentions_dropped += v.dropped as u64;
                for supplier in v.suppliers {
                    if kept.insert((supplier.clone(), url.clone())) {
                        blob.links.push(ValidatedLink {
                            supplier,
                            document_url: url.clone(),
                        });
                    }
                }
            }
            Ok(blob)
        })?;
        run.mentions_seen = validated.mentions_seen;
        run.mentions_matched = validated.mentions_matched;

        let records: Vec<UpsertRecord> = self.stage(id, Stage::Upsert, || {
            validated
                .links
                .iter()
                .map(|link| {
                    let doc = reliable
                        .iter()
                        .find(|d| d.document.url == link.document_url)
                        .ok_or_else(|| Failure::Company(format!("no scored document for {}", link.document_url)))?;
                    Ok(UpsertRecord {
                        supplier: link.supplier.clone(),
                        document: doc.document.clone(),
                    })
                })
                .collect()
        })?;
        for record in &records {
            graph
                .upsert_relation(id, &record.supplier, Assertion::Extracted(record.document.clone()))
                .map_err(|e| Failure::Company(format!("upsert: {e}")))?;
        }
        let distinct: BTreeSet<&CompanyId> = records.iter().map(|r| &r.supplier).collect();
        run.relations_upserted = distinct.len() as u64;

        let snapshot = &*graph;
        let _commit: CommitBlob = self.stage(id, Stage::Commit, || {
            if let Some(path) = &options.snapshot_path {
                save_snapshot(snapshot, path).map_err(|e| Failure::Fatal(e.into()))?;
            }
            Ok(CommitBlob {
                relations: distinct.len() as u64,
            })
        })?;
        Ok(())
    }
}

/// Runs every company of `graph` through the stages.
///
/// Per-company failures are recorded in the report and the run goes on;
/// store and snapshot write errors and an exhausted search quota stop it.
pub fn run_pipeline(
    graph: &mut SupplyGraph,
    store: &IntermediateStore,
    clients: &PipelineClients<'_>,
    options: &PipelineOptions,
) -> Result<PipelineReport, PipelineError> {
    let companies: Vec<Company> = graph.companies().cloned().collect();
    let index = MatchIndex::new(companies.iter());
    let mut runner = Runner {
        store,
        clients,
        options,
        index: &index,
        executed: 0,
        skipped: 0,
    };
    let mut report = PipelineReport::default();
    for company in &companies {
        if options.force {
            store.reset(&company.id)?;
        }
        let mut run = CompanyRun::default();
        match runner.company(graph, company, &mut run) {
            Ok(()) => {}
            Err(Failure::Company(reason)) => {
                tracing::warn!(company = %company.id, %reason, "company failed");
                run.error = Some(reason);
            }
            Err(Failure::Fatal(e)) => {
                if let Some(path) = &options.snapshot_path {
                    if !matches!(e, PipelineError::Snapshot(_)) {
                        save_snapshot(graph, path)?;
                    }
                }
                return Err(e);
            }
        }
        run.stages = store.statuses(&company.id)?;
        report.record(company.id.clone(), run);
    }
    report.stages_executed = runner.executed;
    report.stages_skipped = runner.skipped;
    if let Some(path) = &options.snapshot_path {
        save_snapshot(graph, path)?;
    }
    Ok(report)
}
