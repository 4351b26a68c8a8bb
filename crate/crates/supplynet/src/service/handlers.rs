use std::collections::BTreeSet;
use std::sync::Arc;

use axum::body::Bytes;
use axum::extract::rejection::QueryRejection;
use axum::extract::{Path, Query, State};
use axum::http::{HeaderMap, StatusCode};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use supplynet_core::analytics::{is_transparent, nudge_message, transparency_report, GroupBy, Nudge, TransparencyRow};
use supplynet_core::graph::{Assertion, RelationFilter};
use supplynet_core::matching::{canonical_text, MatchIndex};
use supplynet_core::predict::{predict_suppliers, DEFAULT_K};
use supplynet_core::{
    AuditEntry, Company, CompanyId, ContentType, Continent, MetadataSource, Origin, RelationKey, Review,
    SupplierRelation, SupplyGraph, Timestamp, Verdict,
};

use super::auth::VerifyError;
use super::outbox::{Cause, NewEntry};
use super::{ApiError, AppState};
use crate::seed::{email_domain, is_email};

type ApiResult<T> = Result<T, ApiError>;

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoParams {}

fn params<T>(query: Result<Query<T>, QueryRejection>) -> ApiResult<T> {
    query.map(|Query(p)| p).map_err(|e| ApiError::bad_request(e.body_text()))
}

fn company_id(raw: &str) -> ApiResult<CompanyId> {
    CompanyId::new(raw).map_err(|_| ApiError::not_found(format!("unknown company {raw:?}")))
}

fn require_company<'g>(graph: &'g SupplyGraph, id: &CompanyId) -> ApiResult<&'g Company> {
    graph
        .company(id)
        .ok_or_else(|| ApiError::not_found(format!("unknown company {id}")))
}

fn body<T: DeserializeOwned>(bytes: &Bytes) -> ApiResult<T> {
    serde_json::from_slice(bytes).map_err(|e| ApiError::unprocessable(format!("invalid request body: {e}")))
}

fn bearer(headers: &HeaderMap) -> Option<&str> {
    headers
        .get(axum::http::header::AUTHORIZATION)?
        .to_str()
        .ok()?
        .strip_prefix("Bearer ")
        .map(str::trim)
        .filter(|t| !t.is_empty())
}

/// The company bound to the request's token.
fn authenticate(state: &AppState, headers: &HeaderMap) -> ApiResult<CompanyId> {
    let token = bearer(headers).ok_or_else(|| ApiError::unauthorized("missing bearer token"))?;
    let auth = state.auth.lock().expect("auth lock poisoned");
    auth.resolve(token, state.clock.now())
        .cloned()
        .ok_or_else(|| ApiError::unauthorized("invalid or revoked token"))
}

pub async fn health() -> Json<serde_json::Value> {
    Json(serde_json::json!({"status": "ok"}))
}

pub async fn not_found() -> ApiError {
    ApiError::not_found("no such endpoint")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanySummary {
    pub id: CompanyId,
    pub legal_name: String,
    pub industry: Option<String>,
    pub country: Option<String>,
    pub continent: Option<Continent>,
    pub transparent: bool,
}

fn summary(graph: &SupplyGraph, c: &Company) -> CompanySummary {
    CompanySummary {
        id: c.id.clone(),
        legal_name: c.legal_name.clone(),
        industry: c.industry.clone(),
        country: c.country.clone(),
        continent: c.continent,
        transparent: is_transparent(graph, &c.id).unwrap_or(false),
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ListParams {
    q: Option<String>,
    page: Option<usize>,
    per_page: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanyPage {
    pub total: usize,
    pub page: usize,
    pub per_page: usize,
    pub items: Vec<CompanySummary>,
}

const MAX_PER_PAGE: usize = 500;

pub async fn list_companies(
    State(state): State<Arc<AppState>>,
    query: Result<Query<ListParams>, QueryRejection>,
) -> ApiResult<Json<CompanyPage>> {
    let p = params(query)?;
    let page = p.page.unwrap_or(1);
    let per_page = p.per_page.unwrap_or(50);
    if page == 0 || per_page == 0 || per_page > MAX_PER_PAGE {
        return Err(ApiError::bad_request(format!(
            "page must be >= 1 and per_page within 1..={MAX_PER_PAGE}"
        )));
    }
    let needle = p.q.as_deref().map(canonical_text).unwrap_or_default();
    let graph = state.graph.read().expect("graph lock poisoned");
    let matching: Vec<&Company> = graph
        .companies()
        .filter(|c| needle.is_empty() || c.names().any(|n| canonical_text(n).contains(&needle)))
        .collect();
    let items = matching
        .iter()
        .skip((page - 1) * per_page)
        .take(per_page)
        .map(|c| summary(&graph, c))
        .collect();
    Ok(Json(CompanyPage {
        total: matching.len(),
        page,
        per_page,
        items,
    }))
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct OriginCounts {
    pub extracted: usize,
    pub predicted: usize,
    pub manual: usize,
}

impl OriginCounts {
    fn of<'a>(relations: impl Iterator<Item = &'a SupplierRelation>) -> Self {
        let mut c = OriginCounts::default();
        for r in relations {
            match r.origin {
                Origin::Extracted => c.extracted += 1,
                Origin::Predicted => c.predicted += 1,
                Origin::Manual => c.manual += 1,
            }
        }
        c
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompanyDetail {
    #[serde(flatten)]
    pub company: Company,
    pub transparent: bool,
    pub suppliers: OriginCounts,
    pub customers: OriginCounts,
}

pub async fn company_detail(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<NoParams>, QueryRejection>,
) -> ApiResult<Json<CompanyDetail>> {
    params(query)?;
    let id = company_id(&id)?;
    let graph = state.graph.read().expect("graph lock poisoned");
    let company = require_company(&graph, &id)?.clone();
    let filter = RelationFilter::default();
    let suppliers = OriginCounts::of(graph.suppliers_of(&id, &filter).unwrap_or_default().into_iter());
    let customers = OriginCounts::of(graph.customers_of(&id, &filter).unwrap_or_default().into_iter());
    Ok(Json(CompanyDetail {
        transparent: is_transparent(&graph, &id).unwrap_or(false),
        company,
        suppliers,
        customers,
    }))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProvenanceView {
    pub url: String,
    pub score: f64,
    pub reliable: bool,
    pub retrieved_at: Timestamp,
    pub content_type: ContentType,
}

/// One relation as seen from one of its endpoints.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationView {
    pub customer: CompanyId,
    pub supplier: CompanyId,
    /// Name of the endpoint that is not the company being viewed.
    pub counterpart_name: String,
    pub origin: Origin,
    pub review: Review,
    pub confidence: f64,
    pub provenance: Vec<ProvenanceView>,
    pub audit: Vec<AuditEntry>,
    /// Distinct customers backing an on-demand prediction.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub support: Option<usize>,
}

fn view(graph: &SupplyGraph, r: &SupplierRelation, counterpart: &CompanyId) -> RelationView {
    RelationView {
        customer: r.customer.clone(),
        supplier: r.supplier.clone(),
        counterpart_name: graph.company(counterpart).map(|c| c.legal_name.clone()).unwrap_or_default(),
        origin: r.origin,
        review: r.review,
        confidence: r.confidence,
        provenance: r
            .provenance
            .iter()
            .map(|d| ProvenanceView {
                url: d.url.clone(),
                score: d.score,
                reliable: d.reliable,
                retrieved_at: d.retrieved_at,
                content_type: d.content_type,
            })
            .collect(),
        audit: r.audit.clone(),
        support: None,
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationParams {
    include: Option<String>,
    include_rejected: Option<bool>,
    k: Option<usize>,
}

fn relation_filter(p: &RelationParams) -> ApiResult<RelationFilter> {
    let origins: BTreeSet<Origin> = match &p.include {
        None => Origin::ALL.into_iter().collect(),
        Some(list) => list
            .split(',')
            .map(str::trim)
            .filter(|s| !s.is_empty())
            .map(|s| s.parse::<Origin>().map_err(|e| ApiError::bad_request(e.to_string())))
            .collect::<ApiResult<_>>()?,
    };
    Ok(RelationFilter::only(origins).with_rejected(p.include_rejected.unwrap_or(false)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationList {
    pub company: CompanyId,
    pub rows: Vec<RelationView>,
}

pub async fn list_suppliers(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<RelationParams>, QueryRejection>,
) -> ApiResult<Json<RelationList>> {
    let p = params(query)?;
    let filter = relation_filter(&p)?;
    let id = company_id(&id)?;
    let graph = state.graph.read().expect("graph lock poisoned");
    require_company(&graph, &id)?;
    let mut rows: Vec<RelationView> = graph
        .suppliers_of(&id, &filter)
        .unwrap_or_default()
        .into_iter()
        .map(|r| view(&graph, r, &r.supplier))
        .collect();
    if filter.origins.contains(&Origin::Predicted) {
        // Companies without industry or continent simply get no predictions.
        let predicted = predict_suppliers(&graph, &id, p.k.unwrap_or(DEFAULT_K), false).unwrap_or_default();
        for link in predicted {
            rows.push(RelationView {
                counterpart_name: graph.company(&link.supplier).map(|c| c.legal_name.clone()).unwrap_or_default(),
                customer: link.customer,
                supplier: link.supplier,
                origin: Origin::Predicted,
                review: Review::Unreviewed,
                confidence: link.confidence,
                provenance: Vec::new(),
                audit: Vec::new(),
                support: Some(link.support),
            });
        }
    }
    Ok(Json(RelationList { company: id, rows }))
}

pub async fn list_customers(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<RelationParams>, QueryRejection>,
) -> ApiResult<Json<RelationList>> {
    let p = params(query)?;
    if p.k.is_some() {
        return Err(ApiError::bad_request("k applies to supplier predictions only"));
    }
    let filter = relation_filter(&p)?;
    let id = company_id(&id)?;
    let graph = state.graph.read().expect("graph lock poisoned");
    require_company(&graph, &id)?;
    let rows = graph
        .customers_of(&id, &filter)
        .unwrap_or_default()
        .into_iter()
        .map(|r| view(&graph, r, &r.customer))
        .collect();
    Ok(Json(RelationList { company: id, rows }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ClaimRequest {
    company_id: String,
    email: String,
}

pub async fn claim(
    State(state): State<Arc<AppState>>,
    query: Result<Query<NoParams>, QueryRejection>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<serde_json::Value>)> {
    params(query)?;
    let req: ClaimRequest = body(&bytes)?;
    let email = req.email.trim();
    if !is_email(email) {
        return Err(ApiError::unprocessable(format!("invalid email {email:?}")));
    }
    let id = company_id(&req.company_id)?;
    let company = {
        let graph = state.graph.read().expect("graph lock poisoned");
        require_company(&graph, &id)?.clone()
    };
    // The website domain is authoritative; the contact address stands in
    // for companies without one.
    let domain = company
        .website_domain
        .as_deref()
        .map(str::to_ascii_lowercase)
        .or_else(|| company.contact_email.as_deref().and_then(email_domain))
        .ok_or_else(|| ApiError::forbidden(format!("{} has no domain on record to verify against", company.id)))?;
    if email_domain(email).as_deref() != Some(domain.as_str()) {
        return Err(ApiError::forbidden(format!("email must be on the company domain {domain}")));
    }
    let now = state.clock.now();
    let code = state.auth.lock().expect("auth lock poisoned").claim(id.clone(), email, now)?;
    state.outbox.lock().expect("outbox lock poisoned").append(
        NewEntry {
            to: email,
            subject: format!("Verify your representation of {}", company.legal_name),
            body: format!(
                "Use this code to verify that you represent {}:\n\n{code}\n\nThe code expires in 24 hours.",
                company.legal_name
            ),
            cause: Cause::Verification,
            key: None,
        },
        now,
    )?;
    Ok((
        StatusCode::ACCEPTED,
        Json(serde_json::json!({"status": "verification_sent", "company_id": id})),
    ))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct VerifyRequest {
    code: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TokenResponse {
    pub token: String,
    pub company_id: CompanyId,
    pub issued_at: Timestamp,
}

pub async fn verify(
    State(state): State<Arc<AppState>>,
    query: Result<Query<NoParams>, QueryRejection>,
    bytes: Bytes,
) -> ApiResult<Json<TokenResponse>> {
    params(query)?;
    let req: VerifyRequest = body(&bytes)?;
    let outcome = state
        .auth
        .lock()
        .expect("auth lock poisoned")
        .verify(&req.code, state.clock.now())?;
    match outcome {
        Ok((token, record)) => Ok(Json(TokenResponse {
            token,
            company_id: record.company,
            issued_at: record.issued_at,
        })),
        Err(VerifyError::UnknownCode) => Err(ApiError::not_found("unknown or already used code")),
        Err(VerifyError::Expired) => Err(ApiError::gone("verification code expired")),
    }
}

pub async fn revoke(
    State(state): State<Arc<AppState>>,
    headers: HeaderMap,
    query: Result<Query<NoParams>, QueryRejection>,
) -> ApiResult<StatusCode> {
    params(query)?;
    authenticate(&state, &headers)?;
    let token = bearer(&headers).unwrap_or_default();
    state.auth.lock().expect("auth lock poisoned").revoke(token)?;
    Ok(StatusCode::NO_CONTENT)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AddOutcome {
    Matched,
    Created,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AddResponse {
    pub outcome: AddOutcome,
    pub relation: RelationView,
}

/// Resolves or creates the supplier and records the manual relation.
fn add_one(
    state: &AppState,
    graph: &mut SupplyGraph,
    customer: &CompanyId,
    name: &str,
    country: Option<&str>,
) -> ApiResult<(AddOutcome, bool, RelationView)> {
    let name = name.trim();
    if name.is_empty() {
        return Err(ApiError::unprocessable("supplier_name is empty"));
    }
    let matched = MatchIndex::new(graph.companies()).best_match(name, state.threshold);
    let (outcome, supplier) = match matched {
        Some(m) => (AddOutcome::Matched, m.candidate),
        None => {
            let mut company = Company::named(name, MetadataSource::Manual)
                .map_err(|e| ApiError::unprocessable(format!("supplier_name: {e}")))?;
            if let Some(code) = country.map(str::trim).filter(|c| !c.is_empty()) {
                let code = code.to_ascii_uppercase();
                company.continent = Continent::of_country(&code);
                company.country = Some(code);
            }
            let id = graph
                .upsert_company(company)
                .map_err(|e| ApiError::unprocessable(e.to_string()))?;
            (AddOutcome::Created, id)
        }
    };
    if supplier == *customer {
        return Err(ApiError::unprocessable("a company cannot be its own supplier"));
    }
    let upserted = graph
        .upsert_relation(customer, &supplier, Assertion::Manual)
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    let supplier_company = graph.company(&supplier).cloned();
    let customer_name = graph.company(customer).map(|c| c.legal_name.clone()).unwrap_or_default();
    if let Some(to) = supplier_company.as_ref().and_then(|c| c.contact_email.as_deref()) {
        state.outbox.lock().expect("outbox lock poisoned").append(
            NewEntry {
                to,
                subject: format!("{customer_name} listed you as a supplier"),
                body: format!(
                    "{customer_name} added {} to its supplier list. Verify your company to confirm or reject the relation.",
                    supplier_company.as_ref().map(|c| c.legal_name.as_str()).unwrap_or_default()
                ),
                cause: Cause::AddedAsSupplier,
                key: Some(format!("added_as_supplier:{}->{}", upserted.relation.customer, upserted.relation.supplier)),
            },
            state.clock.now(),
        )?;
    }
    Ok((outcome, upserted.created, view(graph, &upserted.relation, &supplier)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct AddRequest {
    supplier_name: String,
}

pub async fn add_supplier(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    query: Result<Query<NoParams>, QueryRejection>,
    bytes: Bytes,
) -> ApiResult<(StatusCode, Json<AddResponse>)> {
    params(query)?;
    let id = company_id(&id).map_err(|_| ApiError::forbidden("token may not act for this company"));
    let actor = authenticate(&state, &headers)?;
    let id = id?;
    if actor != id {
        return Err(ApiError::forbidden(format!("token of {actor} may not act for {id}")));
    }
    let req: AddRequest = body(&bytes)?;
    let mut graph = state.graph.write().expect("graph lock poisoned");
    require_company(&graph, &id)?;
    let (outcome, created, relation) = add_one(&state, &mut graph, &id, &req.supplier_name, None)?;
    state.persist(&graph)?;
    let status = if created { StatusCode::CREATED } else { StatusCode::OK };
    Ok((status, Json(AddResponse { outcome, relation })))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum RowOutcome {
    Matched { row: usize, name: String, supplier: CompanyId },
    Created { row: usize, name: String, supplier: CompanyId },
    Error { row: usize, name: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UploadResponse {
    pub outcomes: Vec<RowOutcome>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct UploadRow {
    name: String,
    #[serde(default)]
    country: Option<String>,
}

/// Parses an upload, rejecting anything but a `name[,country]` header.
fn parse_upload(bytes: &[u8]) -> ApiResult<Vec<Result<UploadRow, String>>> {
    let mut reader = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(bytes);
    let headers = reader
        .headers()
        .map_err(|e| ApiError::unprocessable(format!("unparseable csv: {e}")))?
        .clone();
    let names: Vec<String> = headers
        .iter()
        .map(|h| h.trim_start_matches('\u{feff}').to_ascii_lowercase())
        .collect();
    if names != ["name"] && names != ["name", "country"] {
        return Err(ApiError::unprocessable("csv header must be `name` or `name,country`"));
    }
    let rows: Vec<Result<UploadRow, String>> = reader
        .records()
        .map(|record| {
            let record = record.map_err(|e| e.to_string())?;
            Ok(UploadRow {
                name: record.get(0).unwrap_or_default().to_string(),
                country: record.get(1).map(str::to_string),
            })
        })
        .collect();
    if rows.is_empty() {
        return Err(ApiError::unprocessable("csv has no rows"));
    }
    Ok(rows)
}

pub async fn upload_suppliers(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    headers: HeaderMap,
    query: Result<Query<NoParams>, QueryRejection>,
    bytes: Bytes,
) -> ApiResult<Json<UploadResponse>> {
    params(query)?;
    let id = company_id(&id).map_err(|_| ApiError::forbidden("token may not act for this company"));
    let actor = authenticate(&state, &headers)?;
    let id = id?;
    if actor != id {
        return Err(ApiError::forbidden(format!("token of {actor} may not act for {id}")));
    }
    let rows = parse_upload(&bytes)?;
    let mut graph = state.graph.write().expect("graph lock poisoned");
    require_company(&graph, &id)?;
    let mut outcomes = Vec::with_capacity(rows.len());
    for (i, row) in rows.into_iter().enumerate() {
        // data rows are numbered from 2; the header is row 1
        let n = i + 2;
        let outcome = match row {
            Err(reason) => RowOutcome::Error {
                row: n,
                name: String::new(),
                reason,
            },
            Ok(r) => match add_one(&state, &mut graph, &id, &r.name, r.country.as_deref()) {
                Ok((AddOutcome::Matched, _, rel)) => RowOutcome::Matched {
                    row: n,
                    name: r.name,
                    supplier: rel.supplier,
                },
                Ok((AddOutcome::Created, _, rel)) => RowOutcome::Created {
                    row: n,
                    name: r.name,
                    supplier: rel.supplier,
                },
                Err(e) if e.status == StatusCode::INTERNAL_SERVER_ERROR => return Err(e),
                Err(e) => RowOutcome::Error {
                    row: n,
                    name: r.name,
                    reason: e.body.message,
                },
            },
        };
        outcomes.push(outcome);
    }
    state.persist(&graph)?;
    Ok(Json(UploadResponse { outcomes }))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ReviewRequest {
    verdict: String,
}

pub async fn review(
    State(state): State<Arc<AppState>>,
    Path((customer, supplier, origin)): Path<(String, String, String)>,
    headers: HeaderMap,
    query: Result<Query<NoParams>, QueryRejection>,
    bytes: Bytes,
) -> ApiResult<Json<RelationView>> {
    params(query)?;
    let actor = authenticate(&state, &headers)?;
    if actor.as_str() != customer && actor.as_str() != supplier {
        return Err(ApiError::forbidden(format!("{actor} is not a party to this relation")));
    }
    let req: ReviewRequest = body(&bytes)?;
    let verdict: Verdict = req
        .verdict
        .parse()
        .map_err(|_| ApiError::unprocessable(format!("verdict must be confirm or reject, got {:?}", req.verdict)))?;
    let unknown = || ApiError::not_found("unknown relation");
    let origin: Origin = origin.parse().map_err(|_| unknown())?;
    let key = RelationKey::new(
        CompanyId::new(customer).map_err(|_| unknown())?,
        CompanyId::new(supplier).map_err(|_| unknown())?,
        origin,
    );
    let mut graph = state.graph.write().expect("graph lock poisoned");
    if graph.relation(&key).is_none() {
        return Err(unknown());
    }
    let updated = graph
        .set_review(&key, verdict, &actor, state.clock.now())
        .map_err(|e| ApiError::unprocessable(e.to_string()))?;
    state.persist(&graph)?;
    let counterpart = if actor == updated.customer {
        updated.supplier.clone()
    } else {
        updated.customer.clone()
    };
    Ok(Json(view(&graph, &updated, &counterpart)))
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TransparencyParams {
    by: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransparencyResponse {
    pub by: GroupBy,
    pub rows: Vec<TransparencyRow>,
    pub total: TransparencyRow,
}

pub async fn transparency(
    State(state): State<Arc<AppState>>,
    query: Result<Query<TransparencyParams>, QueryRejection>,
) -> ApiResult<Json<TransparencyResponse>> {
    let p = params(query)?;
    let by: GroupBy = p
        .by
        .as_deref()
        .unwrap_or("continent")
        .parse()
        .map_err(ApiError::bad_request)?;
    let graph = state.graph.read().expect("graph lock poisoned");
    let report = transparency_report(&graph, by);
    Ok(Json(TransparencyResponse {
        by,
        rows: report.rows,
        total: report.total,
    }))
}

pub async fn nudge(
    State(state): State<Arc<AppState>>,
    Path(id): Path<String>,
    query: Result<Query<NoParams>, QueryRejection>,
) -> ApiResult<Json<Nudge>> {
    params(query)?;
    let id = company_id(&id)?;
    let graph = state.graph.read().expect("graph lock poisoned");
    nudge_message(&graph, &id)
        .map(Json)
        .map_err(|e| ApiError::not_found(e.to_string()))
}
