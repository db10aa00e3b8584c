//! Regression comparison of two output files written by this tool.

use std::fs;
use std::path::Path;

use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};
use crate::output::FINGERPRINT_PREFIX;

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct Comparison {
    pub fingerprint: String,
    pub values_compared: usize,
    pub mismatches: usize,
    pub max_relative_diff: f64,
    /// First few differing locations.
    pub examples: Vec<String>,
}

impl Comparison {
    pub fn matches(&self) -> bool {
        self.mismatches == 0
    }
}

enum Parsed {
    Csv {
        fingerprint: String,
        lines: Vec<Vec<String>>,
    },
    Json {
        fingerprint: String,
        doc: Value,
    },
}

impl Parsed {
    fn fingerprint(&self) -> &str {
        match self {
            Parsed::Csv { fingerprint, .. } | Parsed::Json { fingerprint, .. } => fingerprint,
        }
    }
}

fn parse(path: &Path) -> CliResult<Parsed> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let is_json = path.extension().is_some_and(|e| e == "json");
    if is_json {
        let mut doc: Value = serde_json::from_str(&text).map_err(|e| {
            CliError::Usage(format!("{}: not a JSON output file: {e}", path.display()))
        })?;
        let fingerprint = doc
            .as_object_mut()
            .and_then(|m| m.remove("config_fingerprint"))
            .and_then(|v| v.as_str().map(str::to_string))
            .ok_or_else(|| {
                CliError::Usage(format!("{}: no config_fingerprint field", path.display()))
            })?;
        return Ok(Parsed::Json { fingerprint, doc });
    }
    let mut it = text.lines();
    let fingerprint = it
        .next()
        .and_then(|l| l.strip_prefix(FINGERPRINT_PREFIX))
        .ok_or_else(|| CliError::Usage(format!("{}: no config fingerprint line", path.display())))?
        .to_string();
    let lines = it
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect();
    Ok(Parsed::Csv { fingerprint, lines })
}

struct Acc {
    rtol: f64,
    out: Comparison,
}

impl Acc {
    fn scalar(&mut self, at: &str, a: &str, b: &str) {
        self.out.values_compared += 1;
        let same = match (a.parse::<f64>(), b.parse::<f64>()) {
            (Ok(x), Ok(y)) => {
                let d = if x == y {
                    0.0
                } else {
                    (x - y).abs() / x.abs().max(y.abs())
                };
                self.out.max_relative_diff = self.out.max_relative_diff.max(d);
                d <= self.rtol
            }
            _ => a == b,
        };
        if !same {
            self.mismatch(format!("{at}: {a} vs {b}"));
        }
    }

    fn mismatch(&mut self, what: String) {
        self.out.mismatches += 1;
        if self.out.examples.len() < 10 {
            self.out.examples.push(what);
        }
    }

    fn json(&mut self, at: &str, a: &Value, b: &Value) {
        match (a, b) {
            (Value::Object(x), Value::Object(y)) => {
                for k in x.keys().chain(y.keys().filter(|k| !x.contains_key(*k))) {
                    match (x.get(k), y.get(k)) {
                        (Some(u), Some(v)) => self.json(&format!("{at}.{k}"), u, v),
                        _ => self.mismatch(format!("{at}.{k}: present in one file only")),
                    }
                }
            }
            (Value::Array(x), Value::Array(y)) => {
                if x.len() != y.len() {
                    self.mismatch(format!("{at}: length {} vs {}", x.len(), y.len()));
                }
                for (i, (u, v)) in x.iter().zip(y).enumerate() {
                    self.json(&format!("{at}[{i}]"), u, v);
                }
            }
            (Value::Number(x), Value::Number(y)) => self.scalar(at, &x.to_string(), &y.to_string()),
            _ => {
                self.out.values_compared += 1;
                if a != b {
                    self.mismatch(format!("{at}: {a} vs {b}"));
                }
            }
        }
    }
}

/// Compares two files cell by cell with relative tolerance `rtol`. Files
/// produced from different resolved configs are rejected.
pub fn compare_files(a: &Path, b: &Path, rtol: f64) -> CliResult<Comparison> {
    let (pa, pb) = (parse(a)?, parse(b)?);
    if pa.fingerprint() != pb.fingerprint() {
        return Err(CliError::Config(format!(
            "config fingerprints differ: {} has {}, {} has {}",
            a.display(),
            pa.fingerprint(),
            b.display(),
            pb.fingerprint()
        )));
    }
    let mut acc = Acc {
        rtol,
        out: Comparison {
            fingerprint: pa.fingerprint().to_string(),
            values_compared: 0,
            mismatches: 0,
            max_relative_diff: 0.0,
            examples: Vec::new(),
        },
    };
    match (&pa, &pb) {
        (Parsed::Json { doc: x, .. }, Parsed::Json { doc: y, .. }) => acc.json("$", x, y),
        (Parsed::Csv { lines: x, .. }, Parsed::Csv { lines: y, .. }) => {
            if x.len() != y.len() {
                acc.mismatch(format!("row count {} vs {}", x.len(), y.len()));
            }
            for (i, (ra, rb)) in x.iter().zip(y).enumerate() {
                if ra.len() != rb.len() {
                    acc.mismatch(format!(
                        "line {}: {} vs {} cells",
                        i + 2,
                        ra.len(),
                        rb.len()
                    ));
                    continue;
                }
                for (j, (u, v)) in ra.iter().zip(rb).enumerate() {
                    acc.scalar(&format!("line {} col {}", i + 2, j + 1), u, v);
                }
            }
        }
        _ => {
            return Err(CliError::Usage(
                "cannot compare a CSV file with a JSON file".into(),
            ))
        }
    }
    Ok(acc.out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
        let p = dir.join(name);
        fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn csv_within_tolerance_matches() {
        let d = tempfile::tempdir().unwrap();
        let a = write(
            d.path(),
            "a.csv",
            "# config_fingerprint: x\nf0,tag\n1.0,damping\n",
        );
        let b = write(
            d.path(),
            "b.csv",
            "# config_fingerprint: x\nf0,tag\n1.0000001,damping\n",
        );
        assert!(!compare_files(&a, &b, 0.0).unwrap().matches());
        assert!(compare_files(&a, &b, 1e-6).unwrap().matches());
    }

    #[test]
    fn fingerprint_mismatch_is_an_error() {
        let d = tempfile::tempdir().unwrap();
        let a = write(d.path(), "a.json", r#"{"config_fingerprint":"x","v":1}"#);
        let b = write(d.path(), "b.json", r#"{"config_fingerprint":"y","v":1}"#);
        let e = compare_files(&a, &b, 0.0).unwrap_err();
        assert_eq!(e.exit_code(), 3);
    }

    #[test]
    fn json_structure_differences_are_counted() {
        let d = tempfile::tempdir().unwrap();
        let a = write(
            d.path(),
            "a.json",
            r#"{"config_fingerprint":"x","v":[1,2],"w":"s"}"#,
        );
        let b = write(
            d.path(),
            "b.json",
            r#"{"config_fingerprint":"x","v":[1,3],"u":0}"#,
        );
        let c = compare_files(&a, &b, 0.0).unwrap();
        assert_eq!(c.mismatches, 3);
    }
}
