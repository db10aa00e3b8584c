//! Output directory handling: locking, CSV/JSON tables stamped with the
//! config fingerprint, and the timestamped metadata sidecars.

use std::fs::{self, OpenOptions};
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde_json::{json, Map, Value};

use crate::error::{CliError, CliResult};

pub const LOCK_NAME: &str = ".nvcool.lock";
pub const FINGERPRINT_PREFIX: &str = "# config_fingerprint: ";

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

/// A table column. Angle columns hold radians; CSV shows them in degrees.
#[derive(Debug, Clone)]
pub struct Column {
    name: String,
    angle: bool,
}

impl Column {
    /// `name` already carries its unit suffix.
    pub fn plain(name: &str) -> Self {
        Column {
            name: name.to_string(),
            angle: false,
        }
    }

    /// Written as `<stem>_deg` in CSV and `<stem>_rad` in JSON.
    pub fn angle(stem: &str) -> Self {
        Column {
            name: stem.to_string(),
            angle: true,
        }
    }

    fn csv_name(&self) -> String {
        if self.angle {
            format!("{}_deg", self.name)
        } else {
            self.name.clone()
        }
    }

    fn json_name(&self) -> String {
        if self.angle {
            format!("{}_rad", self.name)
        } else {
            self.name.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<u32> for Cell {
    fn from(n: u32) -> Self {
        Cell::Int(n.into())
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<Column>) -> Self {
        Table {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    /// 17 significant digits, '.' decimal separator, ',' delimiter.
    pub fn to_csv(&self, fingerprint: &str) -> String {
        let mut out = format!("{FINGERPRINT_PREFIX}{fingerprint}\n");
        let header: Vec<String> = self.columns.iter().map(Column::csv_name).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .zip(&self.columns)
                .map(|(c, col)| match c {
                    Cell::Num(x) if col.angle => fmt_num(x.to_degrees()),
                    Cell::Num(x) => fmt_num(*x),
                    Cell::Int(n) => n.to_string(),
                    Cell::Text(s) => s.clone(),
                    Cell::Bool(b) => b.to_string(),
                    Cell::Missing => String::new(),
                })
                .collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }

    /// Rows as objects keyed by the JSON column names.
    pub fn to_json_rows(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut m = Map::new();
                for (c, col) in row.iter().zip(&self.columns) {
                    let v = match c {
                        Cell::Num(x) => json_num(*x),
                        Cell::Int(n) => json!(n),
                        Cell::Text(s) => json!(s),
                        Cell::Bool(b) => json!(b),
                        Cell::Missing => Value::Null,
                    };
                    m.insert(col.json_name(), v);
                }
                Value::Object(m)
            })
            .collect();
        Value::Array(rows)
    }
}

pub fn fmt_num(x: f64) -> String {
    if x.is_finite() {
        // adding +0.0 folds -0.0 into 0.0
        format!("{:.16e}", x + 0.0)
    } else {
        String::new()
    }
}

/// Non-finite values become null.
pub fn json_num(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

/// Exclusive handle on an output directory for the lifetime of one run.
#[derive(Debug)]
pub struct OutputDir {
    dir: PathBuf,
    fingerprint: String,
    command: Vec<String>,
    written: Vec<PathBuf>,
}

impl OutputDir {
    pub fn open(dir: &Path, fingerprint: &str, command: Vec<String>) -> CliResult<Self> {
        fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        let lock = dir.join(LOCK_NAME);
        match OpenOptions::new().write(true).create_new(true).open(&lock) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => {
                return Err(CliError::io(
                    &lock,
                    std::io::Error::new(
                        ErrorKind::AlreadyExists,
                        "output directory is locked by another run",
                    ),
                ));
            }
            Err(e) => return Err(CliError::io(&lock, e)),
        }
        Ok(OutputDir {
            dir: dir.to_path_buf(),
            fingerprint: fingerprint.to_string(),
            command,
            written: Vec::new(),
        })
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn written(&self) -> &[PathBuf] {
        &self.written
    }

    pub fn fingerprint(&self) -> &str {
        &self.fingerprint
    }

    /// `<stem>.csv` or `<stem>.json`, per `format`.
    pub fn write_table(
        &mut self,
        stem: &str,
        table: &Table,
        format: Format,
        extra: Value,
    ) -> CliResult<PathBuf> {
        match format {
            Format::Csv => {
                let text = table.to_csv(&self.fingerprint);
                self.write_bytes(&format!("{stem}.csv"), text.as_bytes())
            }
            Format::Json => {
                let mut doc = json!({ "rows": table.to_json_rows() });
                if let Value::Object(extra) = extra {
                    doc.as_object_mut().unwrap().extend(extra);
                }
                self.write_json(&format!("{stem}.json"), doc)
            }
        }
    }

    /// Writes a JSON object with `config_fingerprint` added at the top level.
    pub fn write_json(&mut self, name: &str, mut doc: Value) -> CliResult<PathBuf> {
        if let Value::Object(m) = &mut doc {
            m.insert("config_fingerprint".into(), json!(self.fingerprint));
        }
        let mut text = serde_json::to_string_pretty(&doc).expect("plain JSON");
        text.push('\n');
        self.write_bytes(name, text.as_bytes())
    }

    fn write_bytes(&mut self, name: &str, bytes: &[u8]) -> CliResult<PathBuf> {
        let path = self.dir.join(name);
        fs::write(&path, bytes).map_err(|e| CliError::io(&path, e))?;
        let created = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        let meta = json!({
            "file": name,
            "config_fingerprint": self.fingerprint,
            "created_unix_s": created,
            "tool_version": env!("CARGO_PKG_VERSION"),
            "command": self.command,
        });
        let meta_path = self.dir.join(format!("{name}.meta.json"));
        let text = serde_json::to_string_pretty(&meta).expect("plain JSON") + "\n";
        fs::write(&meta_path, text).map_err(|e| CliError::io(&meta_path, e))?;
        self.written.push(path.clone());
        Ok(path)
    }
}

impl Drop for OutputDir {
    fn drop(&mut self) {
        let _ = fs::remove_file(self.dir.join(LOCK_NAME));
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new(vec![
            Column::angle("beta"),
            Column::plain("f0"),
            Column::plain("region_tag"),
        ]);
        t.push(vec![
            Cell::Num(std::f64::consts::PI),
            Cell::Num(0.1),
            "damping".into(),
        ]);
        t.push(vec![Cell::Num(0.0), Cell::Missing, "no_cooling".into()]);
        t
    }

    #[test]
    fn csv_has_fingerprint_header_and_degrees() {
        let csv = table().to_csv("abc");
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines[0], "# config_fingerprint: abc");
        assert_eq!(lines[1], "beta_deg,f0,region_tag");
        assert_eq!(
            lines[2],
            "1.8000000000000000e2,1.0000000000000001e-1,damping"
        );
        assert_eq!(lines[3], "0.0000000000000000e0,,no_cooling");
    }

    #[test]
    fn csv_numbers_round_trip() {
        for x in [0.1, 1.0 / 3.0, 6.02214076e23, -1.5e-300, f64::MIN_POSITIVE] {
            assert_eq!(fmt_num(x).parse::<f64>().unwrap(), x);
        }
    }

    #[test]
    fn json_rows_use_radians() {
        let rows = table().to_json_rows();
        assert_eq!(rows[0]["beta_rad"], json!(std::f64::consts::PI));
        assert!(rows[1]["f0"].is_null());
    }

    #[test]
    fn lock_excludes_second_writer_and_is_released() {
        let dir = tempfile::tempdir().unwrap();
        let a = OutputDir::open(dir.path(), "f", vec![]).unwrap();
        let err = OutputDir::open(dir.path(), "f", vec![]).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        drop(a);
        assert!(OutputDir::open(dir.path(), "f", vec![]).is_ok());
    }

    #[test]
    fn every_file_gets_a_sidecar() {
        let dir = tempfile::tempdir().unwrap();
        let mut out = OutputDir::open(dir.path(), "f00", vec!["x".into()]).unwrap();
        out.write_table("t", &table(), Format::Json, json!({"note": 1}))
            .unwrap();
        let doc: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("t.json")).unwrap()).unwrap();
        assert_eq!(doc["config_fingerprint"], "f00");
        assert_eq!(doc["note"], 1);
        let meta: Value =
            serde_json::from_str(&fs::read_to_string(dir.path().join("t.json.meta.json")).unwrap())
                .unwrap();
        assert!(meta["created_unix_s"].is_u64());
    }
}
