//! CSV and JSON writers. Both embed the config so a file is enough to
//! re-run the experiment that produced it.
//!
//! CSV layout: `# config <json>` and optional `# <key> <value>` summary
//! lines, a header starting with `schema_version`, then one row per record.
//! Floats carry 17 significant digits; line endings are LF.

use serde::Serialize;
use serde_json::{Map, Value};

use crate::config::{ExperimentConfig, OutputFormat};

pub const SCHEMA_VERSION: u32 = 1;

pub trait CsvRecord {
    fn columns() -> &'static [&'static str];
    fn fields(&self) -> Vec<String>;
}

pub fn num(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else {
        x.to_string()
    }
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

/// Records of one experiment plus scalar results that are not per-row.
#[derive(Debug, Clone, Serialize)]
pub struct Table<T> {
    pub experiment: &'static str,
    pub schema_version: u32,
    pub config: ExperimentConfig,
    pub summary: Map<String, Value>,
    pub records: Vec<T>,
}

impl<T: CsvRecord + Serialize> Table<T> {
    pub fn new(experiment: &'static str, config: ExperimentConfig, records: Vec<T>) -> Self {
        Self {
            experiment,
            schema_version: SCHEMA_VERSION,
            config,
            summary: Map::new(),
            records,
        }
    }

    pub fn with_summary(mut self, key: &str, value: Value) -> Self {
        self.summary.insert(key.to_owned(), value);
        self
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let config = serde_json::to_string(&self.config).expect("config serialises");
        out.push_str(&format!("# experiment {}\n# config {config}\n", self.experiment));
        for (k, v) in &self.summary {
            out.push_str(&format!("# {k} {v}\n"));
        }
        out.push_str("schema_version");
        for c in T::columns() {
            out.push(',');
            out.push_str(c);
        }
        out.push('\n');
        for r in &self.records {
            out.push_str(&SCHEMA_VERSION.to_string());
            for f in r.fields() {
                out.push(',');
                out.push_str(&f);
            }
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("table serialises");
        s.push('\n');
        s
    }

    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => self.to_csv(),
            OutputFormat::Json => self.to_json(),
        }
    }
}

/// Data rows of a CSV written by [`Table::to_csv`], keyed by header.
pub fn parse_csv(text: &str) -> Vec<Vec<(String, String)>> {
    let mut lines = text.lines().filter(|l| !l.starts_with('#'));
    let Some(header) = lines.next() else {
        return Vec::new();
    };
    let cols: Vec<&str> = header.split(',').collect();
    lines
        .map(|l| {
            cols.iter()
                .zip(l.split(','))
                .map(|(c, v)| ((*c).to_owned(), v.to_owned()))
                .collect()
        })
        .collect()
}
