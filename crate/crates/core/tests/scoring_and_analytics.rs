use proptest::prelude::*;
use supplynet_core::analytics::{transparency_report, GroupBy};
use supplynet_core::graph::Assertion;
use supplynet_core::matching::normalize_name;
use supplynet_core::scoring::{score_document, ScoreSignals};
use supplynet_core::{
    Company, CompanyId, ContentType, Continent, MetadataSource, SourceDocument, SupplyGraph, Timestamp,
};

#[test]
fn score_truth_table() {
    // (url, text, keyword) -> tenths, evaluated by hand from 0.4/0.3/0.3 with the cap.
    let expected = [
        ((false, false, false), 0),
        ((false, false, true), 3),
        ((false, true, false), 3),
        ((false, true, true), 6),
        ((true, false, false), 4),
        ((true, false, true), 6),
        ((true, true, false), 7),
        ((true, true, true), 10),
    ];
    for ((name_in_url, name_in_text, has_keyword), tenths) in expected {
        let s = ScoreSignals { name_in_url, name_in_text, has_keyword }.score();
        assert_eq!(s.tenths(), tenths);
        assert_eq!(s.reliable(), name_in_url && name_in_text);
    }
}

#[test]
fn signals_detected_from_documents() {
    let name = normalize_name("Siemens AG").unwrap();
    let cases = [
        ("https://siemens.example/procurement/supplier-list.pdf", "Siemens AG supplier list", 10),
        ("https://siemens.example/annual.pdf", "Siemens AG annual report", 7),
        ("https://news.example/siemens-vendors", "quarterly results", 4),
        ("https://news.example/story", "Siemens and its suppliers", 6),
        ("https://news.example/story", "a supply chain story", 3),
    ];
    for (url, text, tenths) in cases {
        assert_eq!(score_document(&name, url, text).tenths(), tenths, "{url}");
    }
}

fn id(s: &str) -> CompanyId {
    CompanyId::new(s).unwrap()
}

fn random_graph(
    members: &[(Option<u8>, Option<u8>)],
    extracted: &[(usize, usize)],
) -> SupplyGraph {
    let mut g = SupplyGraph::new();
    for (i, (industry, continent)) in members.iter().enumerate() {
        let mut c = Company::named(&format!("c{i}"), MetadataSource::Seed).unwrap();
        c.industry = industry.map(|x| format!("ind{x}"));
        c.continent = continent.map(|x| Continent::ALL[x as usize]);
        g.upsert_company(c).unwrap();
    }
    for (n, (a, b)) in extracted.iter().enumerate() {
        let (a, b) = (a % members.len(), b % members.len());
        if a == b {
            continue;
        }
        let doc = SourceDocument::new(
            format!("https://d/{n}"),
            Timestamp(0),
            "c".repeat(64),
            ContentType::Plain,
            1.0,
            "t",
        )
        .unwrap();
        g.upsert_relation(&id(&format!("c{a}")), &id(&format!("c{b}")), Assertion::Extracted(doc)).unwrap();
    }
    g
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn total_row_is_sum_of_groups(
        members in prop::collection::vec((prop::option::of(0u8..3), prop::option::of(0u8..7)), 1..30),
        extracted in prop::collection::vec((0usize..30, 0usize..30), 0..40),
        by in prop_oneof![Just(GroupBy::Continent), Just(GroupBy::Industry)],
    ) {
        let g = random_graph(&members, &extracted);
        let r = transparency_report(&g, by);
        let evaluated: u64 = r.rows.iter().map(|row| row.evaluated).sum();
        let transparent: u64 = r.rows.iter().map(|row| row.transparent).sum();
        prop_assert_eq!(r.total.evaluated, evaluated);
        prop_assert_eq!(r.total.transparent, transparent);
        prop_assert_eq!(r.total.evaluated, g.company_count() as u64);
        for row in &r.rows {
            prop_assert!(row.transparent <= row.evaluated);
        }
    }

    #[test]
    fn predicted_edges_leave_transparency_unchanged(
        members in prop::collection::vec((prop::option::of(0u8..3), prop::option::of(0u8..7)), 2..30),
        extracted in prop::collection::vec((0usize..30, 0usize..30), 0..40),
        predicted in prop::collection::vec((0usize..30, 0usize..30, 1u8..=6), 1..40),
    ) {
        let mut g = random_graph(&members, &extracted);
        let before = transparency_report(&g, GroupBy::Continent);
        for (a, b, tenths) in predicted {
            let (a, b) = (a % members.len(), b % members.len());
            if a == b {
                continue;
            }
            g.upsert_relation(
                &id(&format!("c{a}")),
                &id(&format!("c{b}")),
                Assertion::Predicted { confidence: f64::from(tenths) / 10.0 },
            )
            .unwrap();
        }
        prop_assert_eq!(transparency_report(&g, GroupBy::Continent), before);
    }
}
