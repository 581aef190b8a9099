//! Report envelopes and CSV tables.
//!
//! Every artifact carries the tool version, seed and resolved configuration.
//! Numbers are written with 9 significant digits.

use std::io::Write;
use std::path::PathBuf;

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::CliResult;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Rounds to 9 significant digits; non-finite values pass through.
pub fn sig9(x: f64) -> f64 {
    if !x.is_finite() || x == 0.0 {
        return x;
    }
    format!("{x:.8e}").parse().unwrap_or(x)
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            if let Some(r) = n.as_f64().map(sig9).and_then(serde_json::Number::from_f64) {
                *n = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Real(x) => sig9(*x).to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Real(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Int(b as i64)
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    /// File stem suffix: `<command>_<name>.csv`.
    pub name: String,
    pub headers: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, headers: &[&str]) -> Self {
        Self {
            name: name.to_string(),
            headers: headers.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    /// `key,value` rows for every scalar leaf of a JSON value.
    pub fn flattened(name: &str, value: &Value) -> Self {
        fn walk(prefix: &str, v: &Value, out: &mut Vec<Vec<Cell>>) {
            match v {
                Value::Object(map) => {
                    for (k, child) in map {
                        let key = if prefix.is_empty() {
                            k.clone()
                        } else {
                            format!("{prefix}.{k}")
                        };
                        walk(&key, child, out);
                    }
                }
                Value::Array(items) => {
                    for (i, child) in items.iter().enumerate() {
                        walk(&format!("{prefix}[{i}]"), child, out);
                    }
                }
                Value::Number(n) if n.is_f64() => {
                    out.push(vec![prefix.to_string().into(), n.as_f64().unwrap().into()])
                }
                Value::Null => out.push(vec![prefix.to_string().into(), Cell::Text(String::new())]),
                Value::String(s) => out.push(vec![prefix.to_string().into(), s.clone().into()]),
                other => out.push(vec![prefix.to_string().into(), other.to_string().into()]),
            }
        }
        let mut table = Table::new(name, &["key", "value"]);
        walk("", value, &mut table.rows);
        table
    }
}

/// Where and how results go.
#[derive(Debug, Clone)]
pub struct Emitter {
    pub format: Format,
    pub out_dir: Option<PathBuf>,
    pub timestamp: bool,
}

/// One subcommand's results.
pub struct Output<'a> {
    pub command: &'a str,
    pub seed: Option<u64>,
    pub config: Value,
    pub report: Value,
    /// The first table is what `--format csv` prints to standard output.
    pub tables: Vec<Table>,
}

impl Emitter {
    pub fn envelope(&self, out: &Output<'_>) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(SCHEMA_VERSION));
        map.insert("tool".into(), json!("fratio"));
        map.insert("version".into(), json!(env!("CARGO_PKG_VERSION")));
        map.insert("command".into(), json!(out.command));
        map.insert("seed".into(), json!(out.seed));
        if self.timestamp {
            let secs = std::time::SystemTime::now()
                .duration_since(std::time::UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0);
            map.insert("generated_at_unix".into(), json!(secs));
        }
        map.insert("config".into(), out.config.clone());
        map.insert("report".into(), out.report.clone());
        let mut v = Value::Object(map);
        round_value(&mut v);
        v
    }

    fn csv_preamble(&self, out: &Output<'_>) -> String {
        let config = serde_json::to_string(&out.config).unwrap_or_default();
        let seed = out
            .seed
            .map(|s| s.to_string())
            .unwrap_or_else(|| "none".into());
        format!(
            "# fratio {} schema {} command {} seed {}\n# config {}\n",
            env!("CARGO_PKG_VERSION"),
            SCHEMA_VERSION,
            out.command,
            seed,
            config
        )
    }

    fn write_table(&self, w: &mut dyn Write, out: &Output<'_>, table: &Table) -> CliResult<()> {
        w.write_all(self.csv_preamble(out).as_bytes())?;
        let mut writer = csv::Writer::from_writer(w);
        writer.write_record(&table.headers)?;
        for row in &table.rows {
            writer.write_record(row.iter().map(Cell::render))?;
        }
        writer.flush()?;
        Ok(())
    }

    /// Writes all artifacts to the output directory if one is set, otherwise
    /// the envelope (json) or the primary table (csv) to `stdout`. Returns
    /// the files written.
    pub fn emit(&self, out: &Output<'_>, stdout: &mut dyn Write) -> CliResult<Vec<PathBuf>> {
        let envelope = self.envelope(out);
        let fallback;
        let primary = match out.tables.first() {
            Some(t) => t,
            None => {
                fallback = Table::flattened("report", &envelope["report"]);
                &fallback
            }
        };
        match &self.out_dir {
            None => {
                match self.format {
                    Format::Json => {
                        serde_json::to_writer_pretty(&mut *stdout, &envelope)?;
                        writeln!(stdout)?;
                    }
                    Format::Csv => self.write_table(stdout, out, primary)?,
                }
                Ok(Vec::new())
            }
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let mut written = Vec::new();
                let json_path = dir.join(format!("{}.json", out.command));
                let mut text = serde_json::to_string_pretty(&envelope)?;
                text.push('\n');
                std::fs::write(&json_path, text)?;
                written.push(json_path);
                let tables: Vec<&Table> = if out.tables.is_empty() {
                    vec![primary]
                } else {
                    out.tables.iter().collect()
                };
                for table in tables {
                    let path = dir.join(format!("{}_{}.csv", out.command, table.name));
                    let mut file = std::fs::File::create(&path)?;
                    self.write_table(&mut file, out, table)?;
                    written.push(path);
                }
                Ok(written)
            }
        }
    }
}

pub fn to_value(v: &impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

pub fn display_paths(paths: &[PathBuf]) -> String {
    paths
        .iter()
        .map(|p| p.display().to_string())
        .collect::<Vec<_>>()
        .join("\n")
}
