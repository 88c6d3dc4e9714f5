//! Tabular machine output and the manifest that accompanies every file.

use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

pub const OUT_DIR_ENV: &str = "FAREYLAB_OUT_DIR";

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// Rows of string cells. Exact values are kept as `num/den` strings and
/// floats in shortest round-trip form, so CSV and JSON carry the same data.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => {
                let mut w = csv::Writer::from_writer(Vec::new());
                w.write_record(&self.columns).expect("in-memory write");
                for row in &self.rows {
                    w.write_record(row).expect("in-memory write");
                }
                String::from_utf8(w.into_inner().expect("flushed")).expect("utf-8 cells")
            }
            Format::Json => {
                let mut s = serde_json::to_string_pretty(self).expect("serializable");
                s.push('\n');
                s
            }
        }
    }

    /// Parses the output of [`Table::render`], ignoring a leading manifest line.
    pub fn parse(text: &str, format: Format) -> Result<Self, String> {
        let body = match text.strip_prefix("# manifest ") {
            Some(rest) => rest.split_once('\n').map_or("", |(_, b)| b),
            None => text,
        };
        match format {
            Format::Csv => {
                let mut r = csv::Reader::from_reader(body.as_bytes());
                let columns = r
                    .headers()
                    .map_err(|e| e.to_string())?
                    .iter()
                    .map(String::from)
                    .collect();
                let rows = r
                    .records()
                    .map(|rec| rec.map(|r| r.iter().map(String::from).collect()))
                    .collect::<Result<_, _>>()
                    .map_err(|e| e.to_string())?;
                Ok(Self { columns, rows })
            }
            Format::Json => serde_json::from_str(body).map_err(|e| e.to_string()),
        }
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn float_cell(x: f64) -> String {
    format!("{x:?}")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub subcommand: String,
    /// Arguments after the binary name, verbatim.
    pub args: Vec<String>,
    pub seed: Option<u64>,
    pub version: String,
    pub duration_ms: u128,
    pub hash: String,
}

/// Flags that choose where or how fast output is produced, never what it is.
const UNHASHED_FLAGS: [&str; 2] = ["--out", "--workers"];

fn content_args(args: &[String]) -> Vec<&str> {
    let mut out = Vec::new();
    let mut it = args.iter();
    while let Some(a) = it.next() {
        if UNHASHED_FLAGS.contains(&a.as_str()) {
            it.next();
        } else if !UNHASHED_FLAGS.iter().any(|f| a.starts_with(&format!("{f}="))) {
            out.push(a.as_str());
        }
    }
    out
}

impl RunManifest {
    pub fn new(subcommand: &str, args: &[String], seed: Option<u64>, duration_ms: u128) -> Self {
        let version = env!("CARGO_PKG_VERSION").to_string();
        let key = serde_json::json!({
            "subcommand": subcommand,
            "args": content_args(args),
            "seed": seed,
            "version": version,
        });
        let hash = hex::encode(Sha256::digest(key.to_string().as_bytes()));
        Self {
            subcommand: subcommand.to_string(),
            args: args.to_vec(),
            seed,
            version,
            duration_ms,
            hash,
        }
    }
}

/// Relative paths are taken relative to `$FAREYLAB_OUT_DIR` when it is set.
pub fn resolve_out_path(path: &Path) -> PathBuf {
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if path.is_relative() && !dir.is_empty() => Path::new(&dir).join(path),
        _ => path.to_path_buf(),
    }
}

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".manifest.json");
    path.with_file_name(name)
}

/// Writes `# manifest <hash>` followed by the table, and the manifest itself
/// next to the file.
pub fn write_output(
    path: &Path,
    table: &Table,
    format: Format,
    manifest: &RunManifest,
) -> std::io::Result<PathBuf> {
    let path = resolve_out_path(path);
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    let body = format!("# manifest {}\n{}", manifest.hash, table.render(format));
    fs::write(&path, body)?;
    let sidecar = serde_json::to_string_pretty(manifest).expect("serializable");
    fs::write(sidecar_path(&path), sidecar + "\n")?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(&["n", "ratio"]);
        t.push(vec!["1".into(), "1/3".into()]);
        t.push(vec!["2".into(), "1/0".into()]);
        t
    }

    #[test]
    fn csv_and_json_roundtrip() {
        for f in [Format::Csv, Format::Json] {
            assert_eq!(Table::parse(&sample().render(f), f).unwrap(), sample());
        }
        let with_header = format!("# manifest abc\n{}", sample().render(Format::Csv));
        assert_eq!(Table::parse(&with_header, Format::Csv).unwrap(), sample());
    }

    #[test]
    fn hash_ignores_output_location_and_workers() {
        let a: Vec<String> = ["walk", "run", "--seed", "1", "--out", "a.csv", "--workers", "4"]
            .map(String::from)
            .to_vec();
        let b: Vec<String> = ["walk", "run", "--seed", "1", "--out=b.csv"].map(String::from).to_vec();
        let c: Vec<String> = ["walk", "run", "--seed", "2"].map(String::from).to_vec();
        let h = |args: &[String]| RunManifest::new("walk run", args, Some(1), 0).hash;
        assert_eq!(h(&a), h(&b));
        assert_ne!(h(&a), h(&c));
        assert_eq!(RunManifest::new("walk run", &a, Some(1), 999).hash, h(&a));
    }

    #[test]
    fn floats_roundtrip() {
        for x in [0.1, 1.0 / 3.0, f64::INFINITY, -2.5e-300] {
            assert_eq!(float_cell(x).parse::<f64>().unwrap(), x);
        }
    }
}
