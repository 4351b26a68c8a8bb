//! Rendering of reports as aligned tables, CSV or JSON.
//!
//! Every report is first turned into a [`Tabular`]; the three formats are
//! renderings of the same cells, so they always carry the same numbers.

use std::fmt::Write as _;

use serde_json::{Map, Value};
use supplynet_core::analytics::{CoverageRow, TransparencyReport};
use supplynet_core::pipeline::PipelineReport;
use supplynet_core::predict::PredictedLink;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Table,
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    /// Printed with two decimals.
    Num(f64),
    Text(String),
    Empty,
}

impl Cell {
    fn display(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Num(v) => format!("{v:.2}"),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Num(v) => Value::from((v * 100.0).round() / 100.0),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map(Cell::Num).unwrap_or(Cell::Empty)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Tabular {
    pub headers: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Tabular {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Table => self.table(),
            Format::Csv => self.csv(),
            Format::Json => {
                let mut text = serde_json::to_string_pretty(&self.json()).expect("tables serialize");
                text.push('\n');
                text
            }
        }
    }

    fn table(&self) -> String {
        let cells: Vec<Vec<String>> = self.rows.iter().map(|r| r.iter().map(Cell::display).collect()).collect();
        let widths: Vec<usize> = self
            .headers
            .iter()
            .enumerate()
            .map(|(i, h)| cells.iter().map(|r| r[i].len()).chain([h.len()]).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        let line = |out: &mut String, values: Vec<&str>, rows: &[Vec<Cell>], header: bool| {
            let parts: Vec<String> = values
                .iter()
                .enumerate()
                .map(|(i, v)| {
                    // numbers right-aligned, text left-aligned
                    let numeric = !header && rows.iter().any(|r| matches!(r[i], Cell::Int(_) | Cell::Num(_)));
                    if numeric {
                        format!("{v:>w$}", w = widths[i])
                    } else {
                        format!("{v:<w$}", w = widths[i])
                    }
                })
                .collect();
            let _ = writeln!(out, "{}", parts.join("  ").trim_end());
        };
        line(&mut out, self.headers.clone(), &self.rows, true);
        let rule: Vec<String> = widths.iter().map(|w| "-".repeat(*w)).collect();
        let _ = writeln!(out, "{}", rule.join("  "));
        for row in &cells {
            line(&mut out, row.iter().map(String::as_str).collect(), &self.rows, false);
        }
        out
    }

    fn csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.headers).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::display)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("csv output is UTF-8")
    }

    pub fn json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .headers
                        .iter()
                        .zip(row)
                        .map(|(h, c)| (h.to_string(), c.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

pub fn transparency_table(report: &TransparencyReport) -> Tabular {
    Tabular {
        headers: vec!["group", "evaluated", "transparent", "percentage"],
        rows: report
            .all_rows()
            .map(|r| {
                vec![
                    Cell::Text(r.group_label.clone()),
                    Cell::Int(r.evaluated),
                    Cell::Int(r.transparent),
                    r.percentage.into(),
                ]
            })
            .collect(),
    }
}

pub fn coverage_table(rows: &[CoverageRow]) -> Tabular {
    Tabular {
        headers: vec![
            "region",
            "companies_probed",
            "published_lists_checked",
            "identified_lists_auto",
            "suppliers_checked",
            "suppliers_auto",
            "matched_initial_auto",
        ],
        rows: rows
            .iter()
            .map(|r| {
                vec![
                    Cell::Text(r.region.clone()),
                    Cell::Int(r.companies_probed),
                    Cell::Int(r.published_lists_checked),
                    Cell::Int(r.identified_lists_auto),
                    Cell::Int(r.suppliers_checked),
                    Cell::Int(r.suppliers_auto),
                    Cell::Int(r.matched_initial_auto),
                ]
            })
            .collect(),
    }
}

pub fn predictions_table(links: &[PredictedLink]) -> Tabular {
    Tabular {
        headers: vec!["supplier", "support", "confidence", "industry", "region"],
        rows: links
            .iter()
            .map(|l| {
                vec![
                    Cell::Text(l.supplier.as_str().to_string()),
                    Cell::Int(l.support as u64),
                    Cell::Num(l.confidence),
                    Cell::Text(l.group.industry.clone()),
                    Cell::Text(l.group.region.code().to_string()),
                ]
            })
            .collect(),
    }
}

/// Per-company counters of a pipeline run.
pub fn pipeline_table(report: &PipelineReport) -> Tabular {
    Tabular {
        headers: vec![
            "company",
            "documents_fetched",
            "documents_reliable",
            "mentions_seen",
            "mentions_matched",
            "relations_upserted",
            "error",
        ],
        rows: report
            .companies
            .iter()
            .map(|(id, run)| {
                vec![
                    Cell::Text(id.as_str().to_string()),
                    Cell::Int(run.documents_fetched),
                    Cell::Int(run.documents_reliable),
                    Cell::Int(run.mentions_seen),
                    Cell::Int(run.mentions_matched),
                    Cell::Int(run.relations_upserted),
                    run.error.clone().map(Cell::Text).unwrap_or(Cell::Empty),
                ]
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Tabular {
        transparency_table(&TransparencyReport::from_counts([
            ("Europe (EU)".to_string(), 1435, 213),
            ("Africa (AF)".to_string(), 84, 9),
            ("Nowhere".to_string(), 0, 0),
        ]))
    }

    #[test]
    fn table_layout() {
        let out = sample().render(Format::Table);
        let lines: Vec<&str> = out.lines().collect();
        assert_eq!(lines[0], "group        evaluated  transparent  percentage");
        assert!(lines[2].starts_with("Europe (EU)       1435          213       14.84"));
        assert_eq!(lines.len(), 2 + 4);
    }

    #[test]
    fn formats_agree_on_numbers() {
        let t = sample();
        let json = t.render(Format::Json);
        let parsed: Vec<serde_json::Value> = serde_json::from_str(&json).unwrap();
        let csv_text = t.render(Format::Csv);
        let mut reader = csv::Reader::from_reader(csv_text.as_bytes());
        let records: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
        assert_eq!(parsed.len(), records.len());
        for (obj, rec) in parsed.iter().zip(&records) {
            for (i, h) in t.headers.iter().enumerate() {
                match &obj[*h] {
                    serde_json::Value::Number(n) => {
                        assert_eq!(n.as_f64().unwrap(), rec[i].parse::<f64>().unwrap(), "{h}")
                    }
                    serde_json::Value::String(s) => assert_eq!(s, &rec[i]),
                    serde_json::Value::Null => assert_eq!(&rec[i], ""),
                    other => panic!("unexpected {other}"),
                }
            }
        }
    }
}
