//! Bundles finished runs into one JSON document keyed by run id, plus a CSV
//! index.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::output::{timestamp, write_atomic, Table};
use crate::CliError;

pub fn bundle(inputs: &[PathBuf], out_dir: &Path) -> Result<(), CliError> {
    let mut runs: BTreeMap<String, Value> = BTreeMap::new();
    for path in inputs {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let doc: Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Failure(format!("{}: not a report: {e}", path.display())))?;
        let id = doc
            .get("id")
            .and_then(Value::as_str)
            .ok_or_else(|| CliError::Failure(format!("{}: report has no id", path.display())))?
            .to_string();
        if runs.contains_key(&id) {
            return Err(CliError::Failure(format!(
                "duplicate run id {id:?} in {}",
                path.display()
            )));
        }
        runs.insert(id, doc);
    }
    let field = |doc: &Value, key: &str| match doc.get(key) {
        Some(Value::String(s)) => s.clone(),
        Some(Value::Null) | None => String::new(),
        Some(v) => v.to_string(),
    };
    let mut index = Table::new(&["id", "experiment", "model", "seed", "timestamp"]);
    for (id, doc) in &runs {
        index.push([
            id.clone(),
            field(doc, "experiment"),
            field(doc, "model"),
            field(doc, "seed"),
            field(doc, "timestamp"),
        ]);
    }
    let doc = serde_json::json!({
        "timestamp": timestamp(),
        "count": runs.len(),
        "runs": runs,
    });
    let mut bytes =
        serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(&out_dir.join("bundle.json"), &bytes)?;
    write_atomic(&out_dir.join("bundle.csv"), &index.to_csv()?)?;
    println!(
        "bundled {} runs into {}",
        runs.len(),
        out_dir.join("bundle.json").display()
    );
    Ok(())
}
