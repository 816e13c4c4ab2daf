//! CSV tables with a JSON metadata header line.
//!
//! Format: the first line is `# ` followed by a JSON object carrying the
//! fully resolved run configuration, seed, and library version; the second
//! line names the columns; every following line is one record with 12
//! significant digits.  Files are written to a temporary sibling and
//! renamed into place, so readers never observe partial output.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde_json::Value;

use crate::CliError;

#[derive(Debug, Clone)]
pub struct Table {
    pub metadata: Value,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl Table {
    pub fn new(metadata: Value, columns: &[&str]) -> Self {
        Table {
            metadata,
            columns: columns.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<f64>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write(&self, path: &Path) -> Result<(), CliError> {
        let io = |e: std::io::Error| CliError::Io {
            path: path.display().to_string(),
            source: e,
        };
        if let Some(dir) = path.parent() {
            if !dir.as_os_str().is_empty() {
                fs::create_dir_all(dir).map_err(io)?;
            }
        }
        let mut text = format!("# {}\n", self.metadata);
        text.push_str(&self.columns.join(","));
        text.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|v| format!("{v:.11e}")).collect();
            text.push_str(&cells.join(","));
            text.push('\n');
        }
        let tmp: PathBuf = path.with_extension(format!(
            "{}.tmp{}",
            path.extension().and_then(|e| e.to_str()).unwrap_or("csv"),
            std::process::id()
        ));
        let mut f = fs::File::create(&tmp).map_err(io)?;
        f.write_all(text.as_bytes()).map_err(io)?;
        f.sync_all().map_err(io)?;
        drop(f);
        fs::rename(&tmp, path).map_err(io)?;
        Ok(())
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let io = |e: std::io::Error| CliError::Io {
            path: path.display().to_string(),
            source: e,
        };
        let text = fs::read_to_string(path).map_err(io)?;
        let mut lines = text.lines();
        let meta_line = lines
            .next()
            .ok_or_else(|| CliError::parse(path, "empty file"))?;
        let metadata: Value = meta_line
            .strip_prefix("# ")
            .or_else(|| meta_line.strip_prefix('#'))
            .ok_or_else(|| CliError::parse(path, "missing metadata header line"))
            .and_then(|json| {
                serde_json::from_str(json).map_err(|e| CliError::parse(path, format!("bad metadata: {e}")))
            })?;
        let header = lines
            .next()
            .ok_or_else(|| CliError::parse(path, "missing column header"))?;
        let columns: Vec<String> = header.split(',').map(|s| s.trim().to_string()).collect();
        let mut rows = Vec::new();
        for (k, line) in lines.enumerate() {
            if line.trim().is_empty() {
                continue;
            }
            let row: Result<Vec<f64>, _> = line.split(',').map(|c| c.trim().parse::<f64>()).collect();
            let row = row.map_err(|e| CliError::parse(path, format!("row {}: {e}", k + 3)))?;
            if row.len() != columns.len() {
                return Err(CliError::parse(path, format!("row {} has wrong arity", k + 3)));
            }
            rows.push(row);
        }
        Ok(Table {
            metadata,
            columns,
            rows,
        })
    }
}
