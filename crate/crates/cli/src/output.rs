//! Deterministic CSV and JSON rendering of result tables.
//!
//! Numbers are written in scientific notation with a fixed number of
//! significant digits, independent of locale. CSV files start with a
//! `# schema:` comment naming the column layout version.

use serde::Serialize;
use serde_json::{json, Map, Value};

/// Column-layout version shared by all tables.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Bool(bool),
    Text(String),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Empty, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
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

/// Kebab-case name of a serde unit enum.
pub fn label<T: Serialize>(v: &T) -> String {
    match serde_json::to_value(v) {
        Ok(Value::String(s)) => s,
        other => panic!("not a unit enum: {other:?}"),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// Data file stem and schema name.
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: impl Into<String>, columns: &[&str]) -> Self {
        Table {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width for {}", self.name);
        self.rows.push(row);
    }

    pub fn schema(&self) -> String {
        format!("polariton-engine/{}/v{SCHEMA_VERSION}", self.name)
    }

    pub fn to_csv(&self, precision: usize) -> String {
        let mut out = format!(
            "# schema: {}; energies and rates in ps^-1, temperatures in K\n",
            self.schema()
        );
        let header: Vec<String> = self.columns.iter().map(|c| quote(c)).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row.iter().map(|c| csv_field(c, precision)).collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, precision: usize, summary: &Value) -> String {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Array(r.iter().map(|c| json_value(c, precision)).collect()))
            .collect();
        let doc = json!({
            "schema": self.schema(),
            "columns": self.columns,
            "rows": rows,
            "summary": round_json(summary, precision),
        });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }
}

/// `x` with `precision` significant digits.
pub fn format_number(x: f64, precision: usize) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{:.*e}", precision.saturating_sub(1), x)
    }
}

fn quote(s: &str) -> String {
    if s.contains([',', '"', '\n', '\r']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

fn csv_field(c: &Cell, precision: usize) -> String {
    match c {
        Cell::Num(x) => format_number(*x, precision),
        Cell::Int(n) => n.to_string(),
        Cell::Bool(b) => b.to_string(),
        Cell::Text(s) => quote(s),
        Cell::Empty => String::new(),
    }
}

fn rounded(x: f64, precision: usize) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    let r: f64 = format_number(x, precision).parse().expect("formatted float parses");
    serde_json::Number::from_f64(r).map_or(Value::Null, Value::Number)
}

fn json_value(c: &Cell, precision: usize) -> Value {
    match c {
        Cell::Num(x) => rounded(*x, precision),
        Cell::Int(n) => Value::from(*n),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

/// Rounds every float in a JSON tree to `precision` significant digits.
pub fn round_json(v: &Value, precision: usize) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => rounded(n.as_f64().unwrap_or(f64::NAN), precision),
        Value::Array(a) => Value::Array(a.iter().map(|x| round_json(x, precision)).collect()),
        Value::Object(o) => Value::Object(
            o.iter()
                .map(|(k, x)| (k.clone(), round_json(x, precision)))
                .collect::<Map<_, _>>(),
        ),
        other => other.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn table() -> Table {
        let mut t = Table::new("demo", &["n", "kind", "ok", "note"]);
        t.push(vec![1234.5678.into(), "crossing".into(), true.into(), Cell::Empty]);
        t.push(vec![f64::NAN.into(), "a,b".into(), false.into(), "say \"hi\"".into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = table().to_csv(4);
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# schema: polariton-engine/demo/v1"));
        assert_eq!(lines[1], "n,kind,ok,note");
        assert_eq!(lines[2], "1.235e3,crossing,true,");
        assert_eq!(lines[3], "NaN,\"a,b\",false,\"say \"\"hi\"\"\"");
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn json_mirrors_csv() {
        let v: Value = serde_json::from_str(&table().to_json(4, &json!({"x": 0.123456}))).unwrap();
        assert_eq!(v["columns"][0], "n");
        assert_eq!(v["rows"][0][0], 1235.0);
        assert_eq!(v["rows"][1][0], Value::Null);
        assert_eq!(v["summary"]["x"], 0.1235);
    }
}
