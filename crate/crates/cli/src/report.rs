use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

#[derive(Debug)]
pub enum CliError {
    /// Bad flags or input files; exit status 2.
    Validation(String),
    /// A computation contradicted itself; exit status 3.
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation(m) => write!(f, "invalid input: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<alexcover::Error> for CliError {
    fn from(e: alexcover::Error) -> Self {
        match e {
            alexcover::Error::ToleranceNotReached { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Validation(e.to_string()),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn to_value<T: Serialize>(v: &T) -> CliResult<Value> {
    serde_json::to_value(v).map_err(|e| CliError::Internal(e.to_string()))
}

/// A recomputation of a reported value along a second path. Failed exact
/// checks make the run exit with status 3; estimates are informational.
#[derive(Clone, Debug, Serialize)]
pub struct Check {
    pub name: String,
    pub ok: bool,
    pub exact: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub n_range: [usize; 2],
    pub tolerance: f64,
    pub characteristics: Vec<u64>,
    pub version: &'static str,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub inputs: Value,
    pub results: Value,
    pub checks: Vec<Check>,
    pub provenance: Provenance,
}

impl Report {
    pub fn check(&mut self, name: impl Into<String>, ok: bool, exact: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), ok, exact, detail: detail.into() });
    }

    pub fn breaches(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| c.exact && !c.ok).collect()
    }
}

pub fn emit_json(report: &Report) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("report values are plain JSON");
    s.push('\n');
    s
}

pub fn emit_table(report: &Report) -> String {
    let mut out = String::new();
    let v = serde_json::to_value(report).expect("report values are plain JSON");
    render(&mut out, "", &v);
    out
}

fn scalar(v: &Value) -> String {
    match v {
        Value::String(s) => s.clone(),
        Value::Null => "-".into(),
        other => other.to_string(),
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

fn join(prefix: &str, key: &str) -> String {
    if prefix.is_empty() {
        key.to_string()
    } else {
        format!("{prefix}.{key}")
    }
}

fn render(out: &mut String, prefix: &str, v: &Value) {
    match v {
        Value::Object(map) => {
            for (k, x) in map {
                render(out, &join(prefix, k), x);
            }
        }
        Value::Array(items) if items.iter().all(is_scalar) => {
            let cells: Vec<String> = items.iter().map(scalar).collect();
            let _ = writeln!(out, "{prefix}: [{}]", cells.join(", "));
        }
        Value::Array(items) if is_flat_table(items) => {
            let _ = writeln!(out, "{prefix}:");
            table(out, items);
        }
        Value::Array(items) => {
            for (k, x) in items.iter().enumerate() {
                render(out, &join(prefix, &k.to_string()), x);
            }
        }
        _ => {
            let _ = writeln!(out, "{prefix}: {}", scalar(v));
        }
    }
}

fn is_flat_table(items: &[Value]) -> bool {
    let Some(Value::Object(first)) = items.first() else {
        return false;
    };
    items.iter().all(|x| match x {
        Value::Object(m) => m.keys().eq(first.keys()) && m.values().all(is_cell),
        _ => false,
    })
}

fn is_cell(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(is_scalar),
        other => is_scalar(other),
    }
}

fn cell(v: &Value) -> String {
    match v {
        Value::Array(a) => a.iter().map(scalar).collect::<Vec<_>>().join(" "),
        other => scalar(other),
    }
}

fn table(out: &mut String, items: &[Value]) {
    let Value::Object(first) = &items[0] else { unreachable!() };
    let header: Vec<&String> = first.keys().collect();
    let rows: Vec<Vec<String>> = items.iter().map(|x| header.iter().map(|k| cell(&x[k.as_str()])).collect()).collect();
    let widths: Vec<usize> = header
        .iter()
        .enumerate()
        .map(|(j, h)| rows.iter().map(|r| r[j].len()).max().unwrap_or(0).max(h.len()))
        .collect();
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:>w$}")).collect();
        format!("  {}\n", padded.join("  "))
    };
    out.push_str(&line(header.iter().map(|s| s.as_str()).collect()));
    for r in &rows {
        out.push_str(&line(r.iter().map(|s| s.as_str()).collect()));
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn sample() -> Report {
        Report {
            command: "cover",
            inputs: json!({"n": 3}),
            results: json!({"rows": [{"n": 1, "betti": 2}, {"n": 2, "betti": 3}], "tags": ["a", "b"]}),
            checks: vec![],
            provenance: Provenance {
                seed: 0,
                n_range: [1, 2],
                tolerance: 1e-12,
                characteristics: vec![0, 2],
                version: "test",
            },
        }
    }

    #[test]
    fn table_lists_rows() {
        let t = emit_table(&sample());
        assert!(t.contains("results.rows:\n  n  betti\n  1      2\n  2      3\n"), "{t}");
        assert!(t.contains("results.tags: [a, b]"));
        assert!(t.contains("provenance.seed: 0"));
    }

    #[test]
    fn json_round_trips() {
        let r = sample();
        let text = emit_json(&r);
        let back: Value = serde_json::from_str(&text).unwrap();
        assert_eq!(back, serde_json::to_value(&r).unwrap());
    }
}
