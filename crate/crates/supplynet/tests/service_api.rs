use std::path::Path;
use std::sync::Arc;

use axum::body::Body;
use axum::http::{Request, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use supplynet::clock::ManualClock;
use supplynet::files::load_snapshot;
use supplynet::seed::load_seed_registry;
use supplynet::service::outbox::Cause;
use supplynet::service::{router, AppState};
use supplynet_core::{CompanyId, Origin, Review};
use tower::ServiceExt;

const SEED: &str = "\
id,name,ticker,market_cap_usd,industry,country,continent,website,email
,Acme Devices Inc.,ACM,1e9,Semiconductors,US,,https://www.acme.example,contact@acme.example
,Beta Industries Corp.,BET,2e9,Semiconductors,US,,https://beta.example,sales@beta.example
,Gamma Metals GmbH,,,Metals & Mining,DE,,https://gamma.example,
";

struct Harness {
    state: Arc<AppState>,
    clock: Arc<ManualClock>,
    _dir: tempfile::TempDir,
}

fn harness() -> Harness {
    let dir = tempfile::tempdir().unwrap();
    let seed = dir.path().join("seed.csv");
    std::fs::write(&seed, SEED).unwrap();
    let (graph, _) = load_seed_registry(&seed).unwrap();
    let clock = Arc::new(ManualClock::new(1_700_000_000));
    let mut state = AppState::new(graph, clock.clone());
    state.snapshot = Some(dir.path().join("graph.dat"));
    Harness {
        state: Arc::new(state),
        clock,
        _dir: dir,
    }
}

impl Harness {
    async fn call(&self, method: &str, uri: &str, token: Option<&str>, body: Option<Value>) -> (StatusCode, Value) {
        let body = body.map(|b| b.to_string()).unwrap_or_default();
        self.raw(method, uri, token, body).await
    }

    async fn raw(&self, method: &str, uri: &str, token: Option<&str>, body: String) -> (StatusCode, Value) {
        let mut req = Request::builder().method(method).uri(uri);
        if let Some(t) = token {
            req = req.header("authorization", format!("Bearer {t}"));
        }
        let resp = router(self.state.clone())
            .oneshot(req.body(Body::from(body)).unwrap())
            .await
            .unwrap();
        let status = resp.status();
        let bytes = resp.into_body().collect().await.unwrap().to_bytes();
        let value = if bytes.is_empty() {
            Value::Null
        } else {
            serde_json::from_slice(&bytes).unwrap()
        };
        (status, value)
    }

    fn last_code(&self) -> String {
        let outbox = self.state.outbox.lock().unwrap();
        let entry = outbox.entries().iter().rev().find(|e| e.cause == Cause::Verification).unwrap();
        entry
            .body
            .lines()
            .find(|l| l.len() == 32 && l.chars().all(|c| c.is_ascii_hexdigit()))
            .unwrap()
            .to_string()
    }

    async fn token_for(&self, company: &str, email: &str) -> String {
        let (status, _) = self
            .call("POST", "/api/auth/claim", None, Some(json!({"company_id": company, "email": email})))
            .await;
        assert_eq!(status, StatusCode::ACCEPTED);
        let code = self.last_code();
        let (status, body) = self.call("POST", "/api/auth/verify", None, Some(json!({"code": code}))).await;
        assert_eq!(status, StatusCode::OK, "{body}");
        assert_eq!(body["company_id"], company);
        body["token"].as_str().unwrap().to_string()
    }

    fn outbox_count(&self, cause: Cause) -> usize {
        self.state.outbox.lock().unwrap().entries().iter().filter(|e| e.cause == cause).count()
    }
}

fn origins(rows: &Value) -> Vec<(String, String, String)> {
    rows["rows"]
        .as_array()
        .unwrap()
        .iter()
        .map(|r| {
            (
                r["supplier"].as_str().unwrap().to_string(),
                r["origin"].as_str().unwrap().to_string(),
                r["review"].as_str().unwrap().to_string(),
            )
        })
        .collect()
}

#[tokio::test]
async fn relation_lifecycle() {
    let h = harness();
    let acme = h.token_for("acme-devices", "jane@acme.example").await;

    let (status, body) = h
        .call("POST", "/api/companies/acme-devices/suppliers", Some(&acme), Some(json!({"supplier_name": "beta industries"})))
        .await;
    assert_eq!(status, StatusCode::CREATED, "{body}");
    assert_eq!(body["outcome"], "matched");
    assert_eq!(body["relation"]["supplier"], "beta-industries");
    assert_eq!(body["relation"]["origin"], "manual");
    assert_eq!(h.outbox_count(Cause::AddedAsSupplier), 1);

    // repeating the add is idempotent and does not notify twice
    let (status, _) = h
        .call("POST", "/api/companies/acme-devices/suppliers", Some(&acme), Some(json!({"supplier_name": "Beta Industries Corp."})))
        .await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(h.outbox_count(Cause::AddedAsSupplier), 1);

    let persisted = load_snapshot(h.state.snapshot.as_ref().unwrap()).unwrap();
    let acme_id = CompanyId::new("acme-devices").unwrap();
    assert_eq!(persisted.suppliers_of(&acme_id, &Default::default()).unwrap().len(), 1);

    let beta = h.token_for("beta-industries", "ops@beta.example").await;
    let review = "/api/relations/acme-devices/beta-industries/manual/review";
    let (status, body) = h.call("POST", review, Some(&beta), Some(json!({"verdict": "confirm"}))).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    assert_eq!(body["review"], "confirmed");

    let (_, list) = h.call("GET", "/api/companies/acme-devices/suppliers?include=manual", None, None).await;
    assert_eq!(origins(&list), [("beta-industries".into(), "manual".into(), "confirmed".into())]);

    // the customer rejects later; the latest verdict wins
    h.clock.advance(60);
    let (status, body) = h.call("POST", review, Some(&acme), Some(json!({"verdict": "reject"}))).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(body["review"], "rejected");
    assert_eq!(body["audit"].as_array().unwrap().len(), 2);

    let (_, list) = h.call("GET", "/api/companies/acme-devices/suppliers?include=manual", None, None).await;
    assert!(origins(&list).is_empty());
    let (_, list) = h
        .call("GET", "/api/companies/acme-devices/suppliers?include=manual&include_rejected=true", None, None)
        .await;
    assert_eq!(origins(&list), [("beta-industries".into(), "manual".into(), "rejected".into())]);

    let (_, customers) = h.call("GET", "/api/companies/beta-industries/customers?include_rejected=true", None, None).await;
    assert_eq!(customers["rows"][0]["customer"], "acme-devices");

    let persisted = load_snapshot(h.state.snapshot.as_ref().unwrap()).unwrap();
    let rel = persisted
        .relations()
        .find(|r| r.customer == acme_id && r.origin == Origin::Manual)
        .unwrap();
    assert_eq!(rel.review, Review::Rejected);
}

#[tokio::test]
async fn unmatched_supplier_names_create_companies() {
    let h = harness();
    let acme = h.token_for("acme-devices", "jane@acme.example").await;
    let (status, body) = h
        .call("POST", "/api/companies/acme-devices/suppliers", Some(&acme), Some(json!({"supplier_name": "Zephyr Optics Ltd"})))
        .await;
    assert_eq!(status, StatusCode::CREATED);
    assert_eq!(body["outcome"], "created");
    assert_eq!(body["relation"]["supplier"], "zephyr-optics");
    let (status, detail) = h.call("GET", "/api/companies/zephyr-optics", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(detail["metadata_source"], "manual");
    assert_eq!(detail["customers"]["manual"], 1);
    // no contact email on record, so nothing is queued
    assert_eq!(h.outbox_count(Cause::AddedAsSupplier), 0);
}

#[tokio::test]
async fn authorization_matrix() {
    let h = harness();
    let acme = h.token_for("acme-devices", "jane@acme.example").await;
    let add = |company: &str| format!("/api/companies/{company}/suppliers");
    let body = Some(json!({"supplier_name": "Gamma Metals"}));

    let cases: [(&str, Option<&str>, Option<Value>, StatusCode); 6] = [
        ("acme-devices", None, body.clone(), StatusCode::UNAUTHORIZED),
        ("acme-devices", Some("not-a-token"), body.clone(), StatusCode::UNAUTHORIZED),
        ("beta-industries", Some(&acme), body.clone(), StatusCode::FORBIDDEN),
        ("no-such-company", Some(&acme), body.clone(), StatusCode::FORBIDDEN),
        ("acme-devices", Some(&acme), Some(json!({"name": "x"})), StatusCode::UNPROCESSABLE_ENTITY),
        ("acme-devices", Some(&acme), Some(json!({"supplier_name": "Acme Devices"})), StatusCode::UNPROCESSABLE_ENTITY),
    ];
    for (company, token, body, expected) in cases {
        let (status, err) = h.call("POST", &add(company), token, body).await;
        assert_eq!(status, expected, "{company} {token:?}: {err}");
        assert!(err["code"].is_string() && err["message"].is_string());
    }
    assert!(h.state.graph.read().unwrap().relations().next().is_none());

    let (status, _) = h.call("POST", &add("acme-devices"), Some(&acme), body.clone()).await;
    assert_eq!(status, StatusCode::CREATED);

    let review = "/api/relations/acme-devices/gamma-metals/manual/review";
    let verdict = Some(json!({"verdict": "confirm"}));
    let beta = h.token_for("beta-industries", "ops@beta.example").await;
    assert_eq!(h.call("POST", review, None, verdict.clone()).await.0, StatusCode::UNAUTHORIZED);
    assert_eq!(h.call("POST", review, Some(&beta), verdict.clone()).await.0, StatusCode::FORBIDDEN);
    assert_eq!(
        h.call("POST", review, Some(&acme), Some(json!({"verdict": "maybe"}))).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(
        h.call("POST", "/api/relations/acme-devices/gamma-metals/extracted/review", Some(&acme), verdict.clone()).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(
        h.call("POST", "/api/relations/acme-devices/gamma-metals/bogus/review", Some(&acme), verdict.clone()).await.0,
        StatusCode::NOT_FOUND
    );
    assert_eq!(h.call("POST", review, Some(&acme), verdict.clone()).await.0, StatusCode::OK);

    // a revoked token stops working
    assert_eq!(h.call("POST", "/api/auth/revoke", Some(&acme), None).await.0, StatusCode::NO_CONTENT);
    assert_eq!(h.call("POST", review, Some(&acme), verdict).await.0, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn claim_and_verify_errors() {
    let h = harness();
    let claim = |company: &str, email: &str| Some(json!({"company_id": company, "email": email}));
    assert_eq!(
        h.call("POST", "/api/auth/claim", None, claim("acme-devices", "jane@elsewhere.example")).await.0,
        StatusCode::FORBIDDEN
    );
    assert_eq!(
        h.call("POST", "/api/auth/claim", None, claim("acme-devices", "not an email")).await.0,
        StatusCode::UNPROCESSABLE_ENTITY
    );
    assert_eq!(
        h.call("POST", "/api/auth/claim", None, claim("nobody", "a@b.example")).await.0,
        StatusCode::NOT_FOUND
    );
    // created through a manual add, so no domain is on record
    h.state
        .graph
        .write()
        .unwrap()
        .upsert_company(supplynet_core::Company::named("Orphan Works", supplynet_core::MetadataSource::Manual).unwrap())
        .unwrap();
    assert_eq!(
        h.call("POST", "/api/auth/claim", None, claim("orphan-works", "me@orphan.example")).await.0,
        StatusCode::FORBIDDEN
    );
    assert_eq!(h.outbox_count(Cause::Verification), 0);

    let verify = |code: &str| Some(json!({"code": code}));
    assert_eq!(h.call("POST", "/api/auth/verify", None, verify("00")).await.0, StatusCode::NOT_FOUND);

    assert_eq!(
        h.call("POST", "/api/auth/claim", None, claim("acme-devices", "Jane@ACME.example")).await.0,
        StatusCode::ACCEPTED
    );
    let code = h.last_code();
    h.clock.advance(24 * 3600 + 1);
    assert_eq!(h.call("POST", "/api/auth/verify", None, verify(&code)).await.0, StatusCode::GONE);

    h.call("POST", "/api/auth/claim", None, claim("acme-devices", "jane@acme.example")).await;
    let code = h.last_code();
    assert_eq!(h.call("POST", "/api/auth/verify", None, verify(&code)).await.0, StatusCode::OK);
    // codes are single use
    assert_eq!(h.call("POST", "/api/auth/verify", None, verify(&code)).await.0, StatusCode::NOT_FOUND);
}

#[tokio::test]
async fn csv_upload_reports_each_row() {
    let h = harness();
    let acme = h.token_for("acme-devices", "jane@acme.example").await;
    let uri = "/api/companies/acme-devices/suppliers/upload";
    let csv = "name,country\nBeta Industries,\nNova Ceramics KK,jp\nAcme Devices Inc.,\n\"\",\n";
    let (status, body) = h.raw("POST", uri, Some(&acme), csv.to_string()).await;
    assert_eq!(status, StatusCode::OK, "{body}");
    let outcomes = body["outcomes"].as_array().unwrap();
    let kinds: Vec<_> = outcomes.iter().map(|o| o["outcome"].as_str().unwrap()).collect();
    assert_eq!(kinds, ["matched", "created", "error", "error"]);
    assert_eq!(outcomes[1]["supplier"], "nova-ceramics");
    assert_eq!(outcomes[2]["row"], 4);

    {
        let graph = h.state.graph.read().unwrap();
        let nova = graph.company(&CompanyId::new("nova-ceramics").unwrap()).unwrap();
        assert_eq!(nova.country.as_deref(), Some("JP"));
        assert_eq!(graph.relations().count(), 2);
    }

    for bad in ["", "supplier\nBeta\n", "name\n"] {
        let (status, _) = h.raw("POST", uri, Some(&acme), bad.to_string()).await;
        assert_eq!(status, StatusCode::UNPROCESSABLE_ENTITY, "{bad:?}");
    }
    assert_eq!(h.raw("POST", uri, None, csv.to_string()).await.0, StatusCode::UNAUTHORIZED);
}

#[tokio::test]
async fn reads_validate_parameters() {
    let h = harness();
    for uri in [
        "/api/companies?color=red",
        "/api/companies?page=0",
        "/api/companies/acme-devices?x=1",
        "/api/companies/acme-devices/suppliers?include=guessed",
        "/api/companies/acme-devices/suppliers?limit=3",
        "/api/analytics/transparency?by=planet",
        "/api/analytics/transparency?group=industry",
    ] {
        let (status, body) = h.call("GET", uri, None, None).await;
        assert_eq!(status, StatusCode::BAD_REQUEST, "{uri}: {body}");
    }
    assert_eq!(h.call("GET", "/api/nothing", None, None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(h.call("GET", "/api/companies/nobody", None, None).await.0, StatusCode::NOT_FOUND);
    assert_eq!(h.call("GET", "/api/health", None, None).await.0, StatusCode::OK);
}

#[tokio::test]
async fn company_search_and_paging() {
    let h = harness();
    let (_, page) = h.call("GET", "/api/companies?per_page=2", None, None).await;
    assert_eq!(page["total"], 3);
    assert_eq!(page["items"].as_array().unwrap().len(), 2);
    let (_, page) = h.call("GET", "/api/companies?per_page=2&page=2", None, None).await;
    assert_eq!(page["items"].as_array().unwrap().len(), 1);
    let (_, hits) = h.call("GET", "/api/companies?q=BETA%20industries", None, None).await;
    assert_eq!(hits["total"], 1);
    assert_eq!(hits["items"][0]["id"], "beta-industries");
    assert_eq!(hits["items"][0]["continent"], "NA");
}

#[tokio::test]
async fn predictions_transparency_and_nudge() {
    let h = harness();
    let acme = h.token_for("acme-devices", "jane@acme.example").await;
    h.call("POST", "/api/companies/acme-devices/suppliers", Some(&acme), Some(json!({"supplier_name": "Beta Industries"})))
        .await;

    // beta now supplies one customer in the semiconductor / NA group
    let (_, list) = h.call("GET", "/api/companies/beta-industries/suppliers?include=predicted", None, None).await;
    assert!(origins(&list).is_empty(), "a company is never its own predicted supplier");
    let (_, list) = h.call("GET", "/api/companies/acme-devices/suppliers?include=predicted", None, None).await;
    assert!(origins(&list).is_empty(), "existing suppliers are not predicted again");

    let (status, report) = h.call("GET", "/api/analytics/transparency?by=industry", None, None).await;
    assert_eq!(status, StatusCode::OK);
    assert_eq!(report["by"], "industry");
    // manual relations alone do not make a company transparent
    assert_eq!(report["total"]["evaluated"], 3);
    assert_eq!(report["total"]["transparent"], 0);

    let (status, nudge) = h.call("GET", "/api/companies/beta-industries/nudge", None, None).await;
    assert_eq!(status, StatusCode::OK, "{nudge}");
    assert_eq!(nudge["percentage"], 0);
    assert!(nudge["message"].as_str().unwrap().starts_with("0% of companies similar to yours"));
}

#[test]
fn fixture_dir_exists() {
    assert!(Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures/corpus/seed.csv").exists());
}
