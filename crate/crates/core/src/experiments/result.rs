use std::fmt::Write as _;
use std::path::Path;
use std::time::Duration;

use crate::error::{Error, Result};

use super::config::ExperimentConfig;

const ECHO_PREFIX: &str = "# ";
const META_PREFIX: &str = "#@ ";

/// A finished run: the config that produced it, the data table, and
/// run metadata.
///
/// On disk this is a CSV file preceded by the config echo (`# ` lines)
/// and metadata (`#@ key = value` lines). Wall time is kept in memory
/// only, so repeated runs write identical bytes.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
    pub metadata: Vec<(String, String)>,
    pub attempts: u64,
    pub wall_time: Duration,
}

impl ExperimentResult {
    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let idx = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[idx]).collect())
    }

    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }

    pub fn to_csv_string(&self) -> Result<String> {
        let mut out = String::new();
        for line in self.config.to_toml().lines() {
            out.push_str(ECHO_PREFIX);
            out.push_str(line);
            out.push('\n');
        }
        writeln!(out, "{META_PREFIX}attempts = {}", self.attempts).unwrap();
        for (k, v) in &self.metadata {
            writeln!(out, "{META_PREFIX}{k} = {v}").unwrap();
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|v| format!("{v:.16e}")))?;
        }
        let body = w.into_inner().map_err(|e| Error::Io(e.into_error()))?;
        out.push_str(std::str::from_utf8(&body).expect("CSV of ASCII fields"));
        Ok(out)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            std::fs::create_dir_all(dir)?;
        }
        std::fs::write(path, self.to_csv_string()?)?;
        Ok(())
    }

    pub fn from_csv_str(text: &str) -> Result<Self> {
        let mut echo = String::new();
        let mut metadata = Vec::new();
        let mut attempts = 0;
        let mut body_start = 0;
        for line in text.split_inclusive('\n') {
            if let Some(m) = line.strip_prefix(META_PREFIX) {
                let (k, v) = m
                    .trim_end()
                    .split_once(" = ")
                    .ok_or_else(|| Error::Validation(format!("bad metadata line: {m}")))?;
                if k == "attempts" {
                    attempts = v
                        .parse()
                        .map_err(|_| Error::Validation(format!("bad attempts value: {v}")))?;
                } else {
                    metadata.push((k.to_string(), v.to_string()));
                }
            } else if let Some(e) = line.strip_prefix(ECHO_PREFIX) {
                echo.push_str(e);
            } else if line.trim_end() == "#" {
                echo.push('\n');
            } else {
                break;
            }
            body_start += line.len();
        }
        let config = ExperimentConfig::from_toml(&echo)?;

        let mut r = csv::Reader::from_reader(&text.as_bytes()[body_start..]);
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec?;
            let row = rec
                .iter()
                .map(|f| {
                    f.parse::<f64>()
                        .map_err(|_| Error::Validation(format!("bad number in result: {f}")))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push(row);
        }
        Ok(Self {
            config,
            columns,
            rows,
            metadata,
            attempts,
            wall_time: Duration::ZERO,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::from_csv_str(&std::fs::read_to_string(path)?)
    }
}
