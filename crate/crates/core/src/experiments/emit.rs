//! CSV, JSON and plot-data output. Every file starts with the generator
//! version and the run parameters; output bytes depend only on the records and
//! the metadata.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// `<crate version> (<git describe>)` of the build.
pub const VERSION: &str = env!("GAPMAP_VERSION");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidArgument(format!("unknown format {s:?} (csv, json)"))),
        }
    }
}

/// Run parameters echoed into every output file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OutputMeta {
    pub experiment: String,
    pub version: String,
    /// `θ` in the `cf:`/`cfper:`/`rat:` grammar, or `sampled` for seeded random draws.
    pub theta_spec: String,
    pub seed: u64,
    pub params: Vec<(String, String)>,
}

impl OutputMeta {
    pub fn new(experiment: &str, theta_spec: &str, seed: u64) -> Self {
        OutputMeta {
            experiment: experiment.into(),
            version: VERSION.into(),
            theta_spec: theta_spec.into(),
            seed,
            params: Vec::new(),
        }
    }

    pub fn param(mut self, key: &str, value: impl ToString) -> Self {
        self.params.push((key.into(), value.to_string()));
        self
    }

    fn comment(&self) -> String {
        let mut s = format!(
            "# gapmap {} experiment={} theta={} seed={}",
            self.version, self.experiment, self.theta_spec, self.seed
        );
        for (k, v) in &self.params {
            let _ = write!(s, " {k}={v}");
        }
        s.push('\n');
        s
    }
}

#[derive(Serialize)]
struct JsonDoc<'a, T> {
    meta: &'a OutputMeta,
    records: &'a [T],
}

fn io_err(path: &Path, e: impl ToString) -> Error {
    Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

/// The file contents for `records`. CSV gets a `#` metadata line and a header
/// named after the record fields; JSON is `{"meta": …, "records": [ … ]}`.
pub fn render<T: Serialize>(records: &[T], meta: &OutputMeta, format: Format) -> Result<String> {
    if records.is_empty() {
        return Err(Error::EmptyTable);
    }
    match format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(Vec::new());
            for r in records {
                w.serialize(r).map_err(|e| Error::InvalidArgument(e.to_string()))?;
            }
            let body = w.into_inner().map_err(|e| Error::InvalidArgument(e.to_string()))?;
            Ok(meta.comment() + &String::from_utf8(body).expect("csv output is utf-8"))
        }
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&JsonDoc { meta, records })
                .map_err(|e| Error::InvalidArgument(e.to_string()))?;
            s.push('\n');
            Ok(s)
        }
    }
}

/// Writes `records` to `path`. Nothing is created when `records` is empty.
pub fn emit<T: Serialize>(records: &[T], meta: &OutputMeta, format: Format, path: &Path) -> Result<()> {
    let text = render(records, meta, format)?;
    std::fs::write(path, text).map_err(|e| io_err(path, e))
}

/// Two whitespace-separated columns under a `#` header.
pub fn emit_plot(points: &[(f64, f64)], columns: (&str, &str), meta: &OutputMeta, path: &Path) -> Result<()> {
    if points.is_empty() {
        return Err(Error::EmptyTable);
    }
    let mut s = meta.comment();
    let _ = writeln!(s, "# {} {}", columns.0, columns.1);
    for (x, y) in points {
        let _ = writeln!(s, "{x} {y}");
    }
    std::fs::write(path, s).map_err(|e| io_err(path, e))
}

/// Reads a CSV written by [`emit`].
pub fn read_csv<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let mut r = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_path(path)
        .map_err(|e| io_err(path, e))?;
    r.deserialize().map(|row| row.map_err(|e| io_err(path, e))).collect()
}

/// Reads the metadata of a JSON file written by [`emit`] along with its
/// records.
pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<(OutputMeta, Vec<T>)> {
    #[derive(Deserialize)]
    struct Doc<T> {
        meta: OutputMeta,
        records: Vec<T>,
    }
    let text = std::fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let doc: Doc<T> = serde_json::from_str(&text).map_err(|e| io_err(path, e))?;
    Ok((doc.meta, doc.records))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[derive(Debug, PartialEq, Serialize, Deserialize)]
    struct Row {
        n: usize,
        #[serde(with = "crate::serde_big")]
        len: BigInt,
        ratio: Option<f64>,
    }

    fn rows() -> Vec<Row> {
        vec![
            Row {
                n: 1,
                len: BigInt::from(3),
                ratio: Some(0.5),
            },
            Row {
                n: 2,
                len: BigInt::from(10).pow(30),
                ratio: None,
            },
        ]
    }

    #[test]
    fn empty_table_writes_nothing() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let meta = OutputMeta::new("t", "cf:[2]", 0);
        assert_eq!(emit::<Row>(&[], &meta, Format::Csv, &p), Err(Error::EmptyTable));
        assert!(!p.exists());
    }

    #[test]
    fn csv_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.csv");
        let meta = OutputMeta::new("t", "cfper:[][2]", 7).param("depth", 30);
        emit(&rows(), &meta, Format::Csv, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let mut lines = text.lines();
        let first = lines.next().unwrap();
        assert!(first.contains("theta=cfper:[][2]") && first.contains(VERSION) && first.contains("depth=30"));
        assert_eq!(lines.next(), Some("n,len,ratio"));
        assert_eq!(read_csv::<Row>(&p).unwrap(), rows());
    }

    #[test]
    fn json_round_trip_keeps_big_integers_as_strings() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.json");
        let meta = OutputMeta::new("t", "sampled", 7);
        emit(&rows(), &meta, Format::Json, &p).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert!(text.contains("\"1000000000000000000000000000000\""));
        let (m, r) = read_json::<Row>(&p).unwrap();
        assert_eq!(m, meta);
        assert_eq!(r, rows());
    }

    #[test]
    fn rendering_is_deterministic() {
        let meta = OutputMeta::new("t", "sampled", 1);
        for f in [Format::Csv, Format::Json] {
            assert_eq!(render(&rows(), &meta, f).unwrap(), render(&rows(), &meta, f).unwrap());
        }
    }

    #[test]
    fn plot_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("x.dat");
        emit_plot(
            &[(1.0, 2.0), (3.0, 4.5)],
            ("n", "rho"),
            &OutputMeta::new("t", "sampled", 1),
            &p,
        )
        .unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let data: Vec<&str> = text.lines().filter(|l| !l.starts_with('#')).collect();
        assert_eq!(data, ["1 2", "3 4.5"]);
    }
}
