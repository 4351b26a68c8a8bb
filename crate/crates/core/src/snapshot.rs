//! Line-oriented snapshot codec.
//!
//! The first line is a header object carrying `schema_version`; every further
//! line is one JSON object tagged with `kind` (`company` or `relation`).
//! Records are written in id / relation-key order, so equal graphs encode to
//! identical bytes.

use alloc::format;
use alloc::string::{String, ToString};

use serde::{Deserialize, Serialize};

use crate::error::SnapshotError;
use crate::graph::{SupplyGraph, SCHEMA_VERSION};
use crate::model::{Company, SupplierRelation};

pub const FORMAT_NAME: &str = "supplynet-graph";

#[derive(Serialize, Deserialize)]
struct Header {
    format: String,
    schema_version: u64,
}

#[derive(Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
enum Record {
    Company(Company),
    Relation(SupplierRelation),
}

pub fn encode(graph: &SupplyGraph) -> String {
    let mut out = String::new();
    let header = Header {
        format: FORMAT_NAME.to_string(),
        schema_version: SCHEMA_VERSION,
    };
    push_line(&mut out, &header);
    for company in graph.companies() {
        push_line(&mut out, &Record::Company(company.clone()));
    }
    for relation in graph.relations() {
        push_line(&mut out, &Record::Relation(relation.clone()));
    }
    out
}

fn push_line<T: Serialize>(out: &mut String, value: &T) {
    let line = serde_json::to_string(value).expect("snapshot records serialize");
    out.push_str(&line);
    out.push('\n');
}

pub fn decode(text: &str) -> Result<SupplyGraph, SnapshotError> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    let (_, header_line) = lines.next().ok_or(SnapshotError::Empty)?;
    let header: serde_json::Value = serde_json::from_str(header_line).map_err(|e| SnapshotError::Parse {
        line: 1,
        message: e.to_string(),
    })?;
    let version = header
        .get("schema_version")
        .and_then(serde_json::Value::as_u64)
        .ok_or_else(|| SnapshotError::Parse {
            line: 1,
            message: "header lacks schema_version".to_string(),
        })?;
    if version != SCHEMA_VERSION {
        return Err(SnapshotError::SchemaVersion {
            found: version,
            expected: SCHEMA_VERSION,
        });
    }

    let mut graph = SupplyGraph::new();
    let mut relations = alloc::vec::Vec::new();
    for (index, line) in lines {
        let record: Record = serde_json::from_str(line).map_err(|e| SnapshotError::Parse {
            line: index + 1,
            message: format!("{e}"),
        })?;
        match record {
            Record::Company(company) => graph
                .insert_company(company)
                .map_err(|source| SnapshotError::Graph { line: index + 1, source })?,
            Record::Relation(relation) => relations.push((index + 1, relation)),
        }
    }
    for (line, relation) in relations {
        graph
            .insert_relation(relation)
            .map_err(|source| SnapshotError::Graph { line, source })?;
    }
    Ok(graph)
}
