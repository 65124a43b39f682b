//! Output files: every artifact is written to a temporary sibling and renamed
//! into place, and every JSON report carries its resolved configuration.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};
use tempfile::NamedTempFile;

use crate::config::Resolved;
use crate::CliError;

pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d.to_path_buf(),
        _ => PathBuf::from("."),
    };
    std::fs::create_dir_all(&dir).map_err(|e| CliError::io(&dir, e))?;
    let mut tmp = NamedTempFile::new_in(&dir).map_err(|e| CliError::io(&dir, e))?;
    tmp.write_all(bytes).map_err(|e| CliError::io(path, e))?;
    tmp.as_file()
        .sync_all()
        .map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

/// Seconds since the epoch. Excluded from the determinism contract.
pub fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// Rows of a CSV table with a header.
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new<S: AsRef<str>>(header: &[S]) -> Self {
        Table {
            header: header.iter().map(|s| s.as_ref().to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push<I: IntoIterator<Item = T>, T: ToString>(&mut self, row: I) {
        self.rows
            .push(row.into_iter().map(|x| x.to_string()).collect());
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, CliError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).map_err(CliError::csv)?;
        for r in &self.rows {
            w.write_record(r).map_err(CliError::csv)?;
        }
        w.into_inner().map_err(|e| CliError::Failure(e.to_string()))
    }
}

/// Everything an experiment produced.
pub struct Artifacts {
    pub results: Value,
    pub table: Option<Table>,
    /// Plain-text companion, such as a graph adjacency list.
    pub text: Option<String>,
    /// One-line summary for the terminal.
    pub summary: String,
}

impl Artifacts {
    pub fn new<T: Serialize>(results: &T, summary: String) -> Result<Self, CliError> {
        Ok(Artifacts {
            results: serde_json::to_value(results).map_err(|e| CliError::Failure(e.to_string()))?,
            table: None,
            text: None,
            summary,
        })
    }

    pub fn with_table(mut self, table: Table) -> Self {
        self.table = Some(table);
        self
    }

    pub fn with_text(mut self, text: String) -> Self {
        self.text = Some(text);
        self
    }
}

/// The JSON document written for one run.
pub fn report_json(run: &Resolved, artifacts: &Artifacts, files: &[PathBuf]) -> Value {
    json!({
        "id": run.config.id,
        "experiment": run.experiment.name(),
        "model": run.model.display_name(),
        "seed": run.config.seed,
        "config": run.config,
        "files": files.iter().map(|p| p.display().to_string()).collect::<Vec<_>>(),
        "timestamp": timestamp(),
        "results": artifacts.results,
    })
}

/// Writes `<id>.json` plus `<id>.csv` and `<id>.txt` when present. Returns
/// the JSON path.
pub fn emit(run: &Resolved, artifacts: &Artifacts) -> Result<PathBuf, CliError> {
    let dir = run
        .config
        .out_dir
        .clone()
        .unwrap_or_else(|| PathBuf::from("."));
    let id = run
        .config
        .id
        .clone()
        .unwrap_or_else(|| run.experiment.name().to_string());
    let mut files = Vec::new();
    if let Some(t) = &artifacts.table {
        let p = dir.join(format!("{id}.csv"));
        write_atomic(&p, &t.to_csv()?)?;
        files.push(p);
    }
    if let Some(text) = &artifacts.text {
        let p = dir.join(format!("{id}.txt"));
        write_atomic(&p, text.as_bytes())?;
        files.push(p);
    }
    let json_path = dir.join(format!("{id}.json"));
    let doc = report_json(run, artifacts, &files);
    let mut bytes =
        serde_json::to_vec_pretty(&doc).map_err(|e| CliError::Failure(e.to_string()))?;
    bytes.push(b'\n');
    write_atomic(&json_path, &bytes)?;
    Ok(json_path)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn atomic_write_replaces_contents() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("nested/out.txt");
        write_atomic(&p, b"one").unwrap();
        write_atomic(&p, b"two").unwrap();
        assert_eq!(std::fs::read(&p).unwrap(), b"two");
        assert_eq!(std::fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }

    #[test]
    fn csv_quotes_fields() {
        let mut t = Table::new(&["word", "n"]);
        t.push(["a, b", "2"]);
        assert_eq!(
            String::from_utf8(t.to_csv().unwrap()).unwrap(),
            "word,n\n\"a, b\",2\n"
        );
    }
}
