//! Result tables: CSV with a `# key = value` header, or JSON. Both are
//! written atomically and read back exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::config::Format;
use crate::error::CliError;

/// Header key carrying the producing tool and version.
pub const TOOL_KEY: &str = "tool";
/// Prefix of header keys that report on a run rather than configure it.
pub const DIAGNOSTIC_PREFIX: &str = "diag.";

/// Shortest text that parses back to the same `f64`, in exponent form for
/// very small or very large magnitudes.
pub fn fmt_f64(v: f64) -> String {
    let a = v.abs();
    if a == 0.0 || (1e-4..1e16).contains(&a) || !a.is_finite() {
        v.to_string()
    } else {
        format!("{v:e}")
    }
}

pub fn tool_version() -> String {
    format!("levy-escape {}", env!("CARGO_PKG_VERSION"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    /// Ordered header entries.
    pub metadata: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

impl ResultTable {
    pub fn meta(&self, key: &str) -> Option<&str> {
        self.metadata.iter().find(|(k, _)| k == key).map(|(_, v)| v.as_str())
    }

    /// Header entries that configure a run.
    pub fn config_pairs(&self) -> impl Iterator<Item = (&str, &str)> {
        self.metadata
            .iter()
            .filter(|(k, _)| k != TOOL_KEY && !k.starts_with(DIAGNOSTIC_PREFIX))
            .map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.metadata {
            s.push_str(&format!("# {k} = {v}\n"));
        }
        s.push_str(&self.columns.join(","));
        s.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row.iter().map(|&v| fmt_f64(v)).collect();
            s.push_str(&cells.join(","));
            s.push('\n');
        }
        s
    }

    pub fn to_json(&self) -> String {
        let mut meta = Map::new();
        for (k, v) in &self.metadata {
            meta.insert(k.clone(), Value::String(v.clone()));
        }
        let doc = serde_json::json!({
            "metadata": meta,
            "columns": self.columns,
            "rows": self.rows,
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("finite values serialize");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    pub fn from_csv(text: &str, path: &str) -> Result<Self, CliError> {
        let bad = |reason: String| CliError::Format {
            path: path.to_string(),
            reason,
        };
        let mut metadata = Vec::new();
        let mut lines = text.lines();
        let mut columns = None;
        for line in lines.by_ref() {
            if let Some(rest) = line.strip_prefix('#') {
                let (k, v) = rest
                    .split_once(" = ")
                    .ok_or_else(|| bad(format!("header line {line:?} is not `# key = value`")))?;
                metadata.push((k.trim().to_string(), v.trim().to_string()));
            } else {
                columns = Some(line.split(',').map(str::to_string).collect::<Vec<_>>());
                break;
            }
        }
        let columns = columns.ok_or_else(|| bad("missing column line".into()))?;
        let mut rows = Vec::new();
        for (n, line) in lines.enumerate() {
            let row = line
                .split(',')
                .map(|c| {
                    c.parse::<f64>()
                        .map_err(|_| bad(format!("row {}: {c:?} is not a number", n + 1)))
                })
                .collect::<Result<Vec<_>, _>>()?;
            if row.len() != columns.len() {
                return Err(bad(format!(
                    "row {} has {} cells, expected {}",
                    n + 1,
                    row.len(),
                    columns.len()
                )));
            }
            rows.push(row);
        }
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }

    pub fn from_json(text: &str, path: &str) -> Result<Self, CliError> {
        let bad = |reason: String| CliError::Format {
            path: path.to_string(),
            reason,
        };
        let doc: Value = serde_json::from_str(text).map_err(|e| bad(e.to_string()))?;
        let metadata = doc["metadata"]
            .as_object()
            .ok_or_else(|| bad("missing metadata object".into()))?
            .iter()
            .map(|(k, v)| {
                Ok((
                    k.clone(),
                    v.as_str()
                        .ok_or_else(|| bad(format!("metadata {k} is not a string")))?
                        .to_string(),
                ))
            })
            .collect::<Result<Vec<_>, CliError>>()?;
        let columns: Vec<String> =
            serde_json::from_value(doc["columns"].clone()).map_err(|e| bad(format!("columns: {e}")))?;
        let rows: Vec<Vec<f64>> = serde_json::from_value(doc["rows"].clone()).map_err(|e| bad(format!("rows: {e}")))?;
        Ok(Self {
            metadata,
            columns,
            rows,
        })
    }

    /// Reads either format, telling them apart by the first character.
    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let name = path.display().to_string();
        if text.trim_start().starts_with('{') {
            Self::from_json(&text, &name)
        } else {
            Self::from_csv(&text, &name)
        }
    }
}

/// Write via a temporary file in the same directory and rename it into
/// place, so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| CliError::io(dir, e))?;
    tmp.write_all(contents.as_bytes()).map_err(|e| CliError::io(path, e))?;
    tmp.as_file().sync_all().map_err(|e| CliError::io(path, e))?;
    tmp.persist(path).map_err(|e| CliError::io(path, e.error))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table(rows: Vec<Vec<f64>>) -> ResultTable {
        ResultTable {
            metadata: vec![
                ("command".into(), "met".into()),
                ("diag.residual".into(), "1e-16".into()),
            ],
            columns: vec!["x".into(), "u".into()],
            rows,
        }
    }

    proptest! {
        #[test]
        fn csv_and_json_round_trip_exactly(values in proptest::collection::vec((-1e300f64..1e300, any::<f64>()), 1..20)) {
            let rows: Vec<Vec<f64>> = values
                .into_iter()
                .map(|(a, b)| vec![a, if b.is_finite() { b } else { 0.5 }])
                .collect();
            let t = table(rows);
            let csv = ResultTable::from_csv(&t.to_csv(), "mem").unwrap();
            prop_assert_eq!(&csv, &t);
            let json = ResultTable::from_json(&t.to_json(), "mem").unwrap();
            for (r, s) in json.rows.iter().zip(&t.rows) {
                for (a, b) in r.iter().zip(s) {
                    prop_assert_eq!(a.to_bits(), b.to_bits());
                }
            }
            prop_assert_eq!(json, t);
        }
    }

    #[test]
    fn float_text_is_exact_and_compact() {
        for v in [
            0.0,
            -0.0,
            0.05,
            1.0 / 3.0,
            1.7839063559677015e-12,
            1e300,
            -2.5e-7,
            1e16,
            12345.678,
        ] {
            let s = fmt_f64(v);
            assert_eq!(s.parse::<f64>().unwrap().to_bits(), v.to_bits(), "{s}");
            assert!(s.len() < 25, "{s}");
        }
        assert_eq!(fmt_f64(0.05), "0.05");
        assert_eq!(fmt_f64(1.5e-12), "1.5e-12");
    }

    #[test]
    fn config_pairs_skip_reports() {
        let t = table(vec![]);
        let pairs: Vec<_> = t.config_pairs().collect();
        assert_eq!(pairs, vec![("command", "met")]);
    }

    #[test]
    fn malformed_csv_is_rejected() {
        assert!(ResultTable::from_csv("# a = 1\nx,u\n1,2,3\n", "f").is_err());
        assert!(ResultTable::from_csv("# a = 1\nx,u\n1,zz\n", "f").is_err());
        assert!(ResultTable::from_csv("# broken\n", "f").is_err());
    }

    #[test]
    fn atomic_write_replaces_file() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("sub/out.csv");
        write_atomic(&p, "one").unwrap();
        write_atomic(&p, "two").unwrap();
        assert_eq!(fs::read_to_string(&p).unwrap(), "two");
        assert_eq!(fs::read_dir(p.parent().unwrap()).unwrap().count(), 1);
    }
}
