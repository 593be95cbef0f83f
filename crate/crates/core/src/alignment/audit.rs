//! Provenance of every alignment retained during a build.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use super::build::BuildResult;
use super::NodeRef;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    pub id: String,
    pub stage: usize,
    pub parents: Vec<String>,
    pub b_n: f64,
    pub b_e: f64,
    pub cd: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AuditTrail {
    pub records: Vec<AuditRecord>,
    /// Ids of the returned alignments, best first.
    pub roots: Vec<String>,
}

pub fn audit_trail(result: &BuildResult) -> AuditTrail {
    let records = result
        .nodes
        .iter()
        .map(|n| AuditRecord {
            id: result.node_name(NodeRef::Alignment(n.alignment.id)),
            stage: n.alignment.stage,
            parents: n
                .alignment
                .parents
                .map(|(a, b)| vec![result.node_name(a), result.node_name(b)])
                .unwrap_or_default(),
            b_n: n.score.b_n,
            b_e: n.score.b_e,
            cd: n.score.cd,
        })
        .collect();
    let roots = result
        .results
        .iter()
        .map(|&i| result.node_name(NodeRef::Alignment(i)))
        .collect();
    AuditTrail { records, roots }
}

impl AuditTrail {
    /// One line per record: `id stage parents B_N B_E CD`.
    pub fn to_text(&self) -> String {
        let mut out = String::from("# id stage parents b_n b_e cd\n");
        for r in &self.records {
            out.push_str(&format!(
                "{} {} {} {:.4} {:.4} {:.4}\n",
                r.id,
                r.stage,
                if r.parents.is_empty() {
                    "-".to_string()
                } else {
                    r.parents.join(",")
                },
                r.b_n,
                r.b_e,
                r.cd
            ));
        }
        out
    }

    /// Nested document: each root with its parents expanded down to leaves.
    pub fn to_tree_json(&self) -> Value {
        let by_id: HashMap<&str, &AuditRecord> =
            self.records.iter().map(|r| (r.id.as_str(), r)).collect();
        fn expand(id: &str, by_id: &HashMap<&str, &AuditRecord>) -> Value {
            match by_id.get(id) {
                None => json!({ "id": id }),
                Some(r) => json!({
                    "id": r.id,
                    "stage": r.stage,
                    "b_n": r.b_n,
                    "b_e": r.b_e,
                    "cd": r.cd,
                    "parents": r.parents.iter().map(|p| expand(p, by_id)).collect::<Vec<_>>(),
                }),
            }
        }
        Value::Array(self.roots.iter().map(|r| expand(r, &by_id)).collect())
    }

    pub fn record(&self, id: &str) -> Option<&AuditRecord> {
        self.records.iter().find(|r| r.id == id)
    }
}
