//! CSV and JSON rendering of result tables.

use std::io::Write;

use serde_json::{Map, Value};

/// A single table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Bool(bool),
    Missing,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Float(v) => format_sig12(*v),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => Value::from(*v),
            Cell::Float(v) if *v == 0.0 => Value::from(0.0),
            Cell::Float(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.as_str()),
            Cell::Bool(b) => Value::from(*b),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

/// Rows sharing one header, plus key/value summary entries for JSON.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(&'static str, Cell)>,
}

impl Table {
    pub fn new(columns: &[&'static str]) -> Self {
        Table {
            columns: columns.to_vec(),
            ..Table::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Identification echoed into JSON output.
#[derive(Debug, Clone)]
pub struct Meta {
    pub group: String,
    pub operator: String,
    pub command: String,
    pub version: String,
}

/// `%.12g`-style rendering: 12 significant digits, trailing zeros dropped,
/// integers without a fractional part and negative zero as `0`.
pub fn format_sig12(v: f64) -> String {
    if v.is_nan() {
        return "NaN".into();
    }
    if v.is_infinite() {
        return if v > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if v == 0.0 {
        return "0".into();
    }
    let sci = format!("{v:.11e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..12).contains(&exp) {
        let decimals = (11 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{}{:02}", trim_zeros(mantissa.to_string()), if exp < 0 { '-' } else { '+' }, exp.abs())
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> std::io::Result<()> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    w.write_record(&table.columns)?;
    for row in &table.rows {
        w.write_record(row.iter().map(Cell::csv))?;
    }
    w.flush()
}

pub fn write_json<W: Write>(table: &Table, meta: &Meta, mut out: W) -> std::io::Result<()> {
    let mut m = Map::new();
    m.insert("group".into(), meta.group.clone().into());
    m.insert("operator".into(), meta.operator.clone().into());
    m.insert("command".into(), meta.command.clone().into());
    m.insert("version".into(), meta.version.clone().into());
    let rows: Vec<Value> = table
        .rows
        .iter()
        .map(|r| {
            Value::Object(
                table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(k, c)| (k.to_string(), c.json()))
                    .collect(),
            )
        })
        .collect();
    let mut doc = Map::new();
    doc.insert("meta".into(), Value::Object(m));
    doc.insert("rows".into(), Value::Array(rows));
    if !table.summary.is_empty() {
        let s: Map<String, Value> = table.summary.iter().map(|(k, c)| (k.to_string(), c.json())).collect();
        doc.insert("summary".into(), Value::Object(s));
    }
    serde_json::to_writer_pretty(&mut out, &Value::Object(doc))?;
    out.write_all(b"\n")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(5.0), "5");
        assert_eq!(format_sig12(-0.0), "0");
        assert_eq!(format_sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(format_sig12(2.0 / 3.0 * 1e-7), "6.66666666667e-08");
        assert_eq!(format_sig12(123456789012345.0), "1.23456789012e+14");
        assert_eq!(format_sig12(0.96875), "0.96875");
        assert_eq!(format_sig12(-12.5), "-12.5");
        assert_eq!(format_sig12(99999999999.99999), "100000000000");
    }

    #[test]
    fn header_only_csv() {
        let t = Table::new(&["lambda", "N", "T", "avg", "ref", "abs_err"]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "lambda,N,T,avg,ref,abs_err\n");
    }

    #[test]
    fn integer_valued_row() {
        let mut t = Table::new(&["lambda", "N", "T", "avg", "ref", "abs_err"]);
        t.push(vec![5.0.into(), 11u64.into(), 11.0.into(), 1.0.into(), Cell::Missing, Cell::Missing]);
        let mut buf = Vec::new();
        write_csv(&t, &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "lambda,N,T,avg,ref,abs_err\n5,11,11,1,,\n");
    }

    #[test]
    fn json_keeps_column_order() {
        let mut t = Table::new(&["lambda", "N"]);
        t.push(vec![1.5.into(), 3u64.into()]);
        let meta = Meta {
            group: "t1".into(),
            operator: "mult(1)".into(),
            command: "weyl-scan".into(),
            version: "0".into(),
        };
        let mut buf = Vec::new();
        write_json(&t, &meta, &mut buf).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.find("\"lambda\"").unwrap() < s.find("\"N\"").unwrap());
        assert!(s.find("\"group\"").unwrap() < s.find("\"version\"").unwrap());
    }
}
