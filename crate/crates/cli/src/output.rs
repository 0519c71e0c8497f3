//! Table and manifest writers.

use std::fs;
use std::path::{Path, PathBuf};

use clap::ValueEnum;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Flag(bool),
}

/// Floats use 17 significant digits so that CSV round trips are exact.
pub fn format_float(v: f64) -> String {
    format!("{v:.16e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Flag(b) => b.to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => json!(v),
            Cell::Int(v) => json!(v),
            Cell::Text(s) => json!(s),
            Cell::Flag(b) => json!(b),
        }
    }
}

pub struct Table {
    columns: Vec<&'static str>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Self {
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

fn io_error(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io {
        path: path.to_path_buf(),
        source,
    }
}

/// Collects the files of one run in an output directory.
pub struct Run {
    dir: PathBuf,
    format: Format,
    outputs: Vec<String>,
}

impl Run {
    pub fn new(dir: &Path, format: Format) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(io_error(dir))?;
        Ok(Self {
            dir: dir.to_path_buf(),
            format,
            outputs: Vec::new(),
        })
    }

    fn record(&mut self, name: String) -> PathBuf {
        let path = self.dir.join(&name);
        self.outputs.push(name);
        path
    }

    pub fn table(&mut self, stem: &str, table: &Table) -> CliResult<()> {
        let path = self.record(format!("{stem}.{}", self.format.extension()));
        match self.format {
            Format::Csv => {
                let csv_err = |source| CliError::Csv {
                    path: path.clone(),
                    source,
                };
                let mut w = csv::Writer::from_path(&path).map_err(csv_err)?;
                w.write_record(&table.columns).map_err(csv_err)?;
                for row in &table.rows {
                    w.write_record(row.iter().map(Cell::csv)).map_err(csv_err)?;
                }
                w.flush().map_err(io_error(&path))?;
            }
            Format::Json => {
                let rows: Vec<Value> = table
                    .rows
                    .iter()
                    .map(|row| {
                        let obj: Map<String, Value> = table
                            .columns
                            .iter()
                            .zip(row)
                            .map(|(c, v)| (c.to_string(), v.json()))
                            .collect();
                        Value::Object(obj)
                    })
                    .collect();
                write_json(&path, &rows)?;
            }
        }
        Ok(())
    }

    /// Writes a JSON document regardless of the table format.
    pub fn json(&mut self, name: &str, value: &impl Serialize) -> CliResult<()> {
        let path = self.record(format!("{name}.json"));
        write_json(&path, value)
    }

    /// Writes `run.json` with the command, versions, configuration echo,
    /// produced files and results.
    pub fn finish(self, command: &str, config: &impl Serialize, results: Value) -> CliResult<PathBuf> {
        let path = self.dir.join("run.json");
        let manifest = json!({
            "command": command,
            "cli_version": env!("CARGO_PKG_VERSION"),
            "library_version": lowpass::VERSION,
            "config": config,
            "outputs": self.outputs,
            "results": results,
        });
        write_json(&path, &manifest)?;
        Ok(path)
    }
}

fn write_json(path: &Path, value: &impl Serialize) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    fs::write(path, text).map_err(io_error(path))
}
