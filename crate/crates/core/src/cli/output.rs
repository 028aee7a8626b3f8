use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use super::CliError;

/// A table or summary entry. Non-finite reals are stored as text so that
/// every record survives a JSON round trip unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Bool(bool),
    Int(i64),
    Num(f64),
    Text(String),
}

impl Cell {
    pub fn num(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else if x.is_nan() {
            Cell::Text("nan".into())
        } else if x > 0.0 {
            Cell::Text("inf".into())
        } else {
            Cell::Text("-inf".into())
        }
    }

    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn empty() -> Self {
        Cell::Text(String::new())
    }

    fn render(&self) -> String {
        match self {
            Cell::Bool(b) => b.to_string(),
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format!("{x:?}"),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::num(x)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

pub type Fields = BTreeMap<String, Cell>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub experiment_id: String,
    pub timestamp: String,
    pub tool_version: String,
    pub subcommand: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Results {
    pub summary: Fields,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub meta: Meta,
    pub inputs: Fields,
    pub results: Results,
}

impl ResultRecord {
    pub fn new(subcommand: &str, inputs: Fields, results: Results) -> Self {
        Self {
            meta: Meta {
                experiment_id: experiment_id(subcommand, &inputs),
                timestamp: timestamp(),
                tool_version: env!("CARGO_PKG_VERSION").to_string(),
                subcommand: subcommand.to_string(),
            },
            inputs,
            results,
        }
    }

    /// `{meta, inputs, results}` with `meta` alone on the second line.
    pub fn to_json(&self) -> String {
        let meta = serde_json::to_string(&self.meta).expect("meta serializes");
        let inputs = serde_json::to_string_pretty(&self.inputs).expect("inputs serialize");
        let results = serde_json::to_string_pretty(&self.results).expect("results serialize");
        format!("{{\n\"meta\": {meta},\n\"inputs\": {inputs},\n\"results\": {results}\n}}\n")
    }

    pub fn from_json(text: &str) -> serde_json::Result<Self> {
        serde_json::from_str(text)
    }

    /// One `#` line with metadata and inputs, then the table.
    pub fn to_csv(&self) -> Result<String, CliError> {
        let header = serde_json::json!({ "meta": self.meta, "inputs": self.inputs });
        let mut out = format!("# {header}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut out);
            w.write_record(&self.results.columns)?;
            for row in &self.results.rows {
                w.write_record(row.iter().map(Cell::render))?;
            }
            w.flush()?;
        }
        Ok(String::from_utf8(out).expect("csv output is utf-8"))
    }
}

/// First 16 bytes of `sha256(subcommand \n inputs-json)`, hex encoded.
pub fn experiment_id(subcommand: &str, inputs: &Fields) -> String {
    let mut hasher = Sha256::new();
    hasher.update(subcommand.as_bytes());
    hasher.update(b"\n");
    hasher.update(serde_json::to_string(inputs).expect("inputs serialize").as_bytes());
    hasher.finalize()[..16].iter().map(|b| format!("{b:02x}")).collect()
}

/// RFC 3339 time of the run, or of `SOURCE_DATE_EPOCH` when set.
pub fn timestamp() -> String {
    let when = std::env::var("SOURCE_DATE_EPOCH")
        .ok()
        .and_then(|s| s.trim().parse::<u64>().ok())
        .map(|secs| UNIX_EPOCH + Duration::from_secs(secs))
        .unwrap_or_else(SystemTime::now);
    humantime::format_rfc3339_seconds(when).to_string()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
    Both,
}

#[derive(Debug, Clone)]
pub struct Sink {
    pub dir: PathBuf,
    pub stem: String,
    pub format: Format,
    pub plot: bool,
}

impl Sink {
    fn path(&self, ext: &str) -> PathBuf {
        self.dir.join(format!("{}.{ext}", self.stem))
    }

    pub fn write(&self, record: &ResultRecord, svg: Option<String>) -> Result<Vec<PathBuf>, CliError> {
        fs::create_dir_all(&self.dir)?;
        let mut written = Vec::new();
        if matches!(self.format, Format::Csv | Format::Both) {
            written.push(write_file(&self.path("csv"), &record.to_csv()?)?);
        }
        if matches!(self.format, Format::Json | Format::Both) {
            written.push(write_file(&self.path("json"), &record.to_json())?);
        }
        if let (true, Some(svg)) = (self.plot, svg) {
            written.push(write_file(&self.path("svg"), &svg)?);
        }
        Ok(written)
    }
}

fn write_file(path: &Path, contents: &str) -> Result<PathBuf, CliError> {
    fs::write(path, contents)?;
    Ok(path.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> ResultRecord {
        let mut inputs = Fields::new();
        inputs.insert("p".into(), Cell::num(2.0));
        inputs.insert("n".into(), Cell::from(1usize));
        let mut summary = Fields::new();
        summary.insert("ratio".into(), Cell::num(f64::INFINITY));
        summary.insert("ok".into(), true.into());
        summary.insert("tiny".into(), Cell::num(1e-300));
        summary.insert("third".into(), Cell::num(1.0 / 3.0));
        ResultRecord::new(
            "demo",
            inputs,
            Results {
                summary,
                columns: vec!["x".into(), "label".into()],
                rows: vec![vec![Cell::num(0.1), "a,b".into()], vec![Cell::num(-2.0), Cell::empty()]],
            },
        )
    }

    #[test]
    fn json_round_trip_is_lossless() {
        let r = sample();
        let back = ResultRecord::from_json(&r.to_json()).unwrap();
        assert_eq!(back, r);
        assert_eq!(back.to_json(), r.to_json());
    }

    #[test]
    fn csv_has_one_meta_line() {
        let csv = sample().to_csv().unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# {"));
        assert_eq!(lines[1], "x,label");
        assert_eq!(lines[2], "0.1,\"a,b\"");
        assert_eq!(lines.len(), 4);
    }

    #[test]
    fn experiment_id_depends_on_inputs_only() {
        let a = sample();
        let b = sample();
        assert_eq!(a.meta.experiment_id, b.meta.experiment_id);
        assert_eq!(a.meta.experiment_id.len(), 32);
        let mut other = a.inputs.clone();
        other.insert("p".into(), Cell::num(3.0));
        assert_ne!(experiment_id("demo", &other), a.meta.experiment_id);
    }
}
