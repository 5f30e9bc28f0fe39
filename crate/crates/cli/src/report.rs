use std::io::{self, Write};
use std::path::Path;

use serde_json::ser::{Formatter, PrettyFormatter};
use serde_json::{Map, Value};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i128),
    Float(f64),
    Bool(bool),
    Text(String),
    Null,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i128)
    }
}

impl From<u32> for Cell {
    fn from(x: u32) -> Self {
        Cell::Int(x.into())
    }
}

impl From<i128> for Cell {
    fn from(x: i128) -> Self {
        Cell::Int(x)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_owned())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Null, Into::into)
    }
}

/// A table with a fixed column schema per command.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub command: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Report {
    pub fn new(command: impl Into<String>, columns: &[&str]) -> Self {
        Report { command: command.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row does not match the {} schema", self.command);
        self.rows.push(row);
    }

    /// Value in `column` of row `row`.
    pub fn get(&self, row: usize, column: &str) -> Option<&Cell> {
        let j = self.columns.iter().position(|c| c == column)?;
        self.rows.get(row).map(|r| &r[j])
    }
}

/// Scientific notation with 17 significant digits.
pub fn format_float(x: f64) -> String {
    if x.is_finite() {
        format!("{x:.16e}")
    } else if x.is_nan() {
        "NaN".into()
    } else if x > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

fn csv_field(cell: &Cell) -> String {
    match cell {
        Cell::Int(i) => i.to_string(),
        Cell::Float(x) => format_float(*x),
        Cell::Bool(b) => b.to_string(),
        Cell::Null => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_value(cell: &Cell) -> Value {
    match cell {
        Cell::Int(i) => i64::try_from(*i).map(Value::from).unwrap_or_else(|_| Value::String(i.to_string())),
        Cell::Float(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
        Cell::Bool(b) => Value::Bool(*b),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Null => Value::Null,
    }
}

/// Pretty JSON whose floats carry 17 significant digits.
struct SeventeenDigits<'a>(PrettyFormatter<'a>);

impl Formatter for SeventeenDigits<'_> {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        writer.write_all(format_float(value).as_bytes())
    }

    fn begin_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_array(w)
    }

    fn end_array<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array(w)
    }

    fn begin_array_value<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_array_value(w, first)
    }

    fn end_array_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_array_value(w)
    }

    fn begin_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object(w)
    }

    fn end_object<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object(w)
    }

    fn begin_object_key<W: ?Sized + Write>(&mut self, w: &mut W, first: bool) -> io::Result<()> {
        self.0.begin_object_key(w, first)
    }

    fn begin_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.begin_object_value(w)
    }

    fn end_object_value<W: ?Sized + Write>(&mut self, w: &mut W) -> io::Result<()> {
        self.0.end_object_value(w)
    }
}

/// Serializes any JSON value with 17-digit floats.
pub(crate) fn to_json_string(value: &Value) -> String {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, SeventeenDigits(PrettyFormatter::new()));
    serde::Serialize::serialize(value, &mut ser).expect("writing to a Vec cannot fail");
    out.push(b'\n');
    String::from_utf8(out).expect("serde_json emits UTF-8")
}

/// CSV: one header line, then one line per row.
/// JSON: `{"command": ..., "columns": [...], "rows": [{column: value}, ...]}`.
pub fn render(report: &Report, format: Format) -> String {
    match format {
        Format::Csv => {
            let mut out = report.columns.join(",");
            out.push('\n');
            for row in &report.rows {
                out.push_str(&row.iter().map(csv_field).collect::<Vec<_>>().join(","));
                out.push('\n');
            }
            out
        }
        Format::Json => {
            let rows = report
                .rows
                .iter()
                .map(|row| {
                    Value::Object(report.columns.iter().cloned().zip(row.iter().map(json_value)).collect::<Map<_, _>>())
                })
                .collect();
            let mut top = Map::new();
            top.insert("command".into(), Value::String(report.command.clone()));
            top.insert("columns".into(), report.columns.iter().map(|c| Value::String(c.clone())).collect());
            top.insert("rows".into(), Value::Array(rows));
            to_json_string(&Value::Object(top))
        }
    }
}

/// Writes the rendered report to `path`, or to stdout without one.
pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> io::Result<()> {
    let text = render(report, format);
    match path {
        Some(p) => std::fs::write(p, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("demo", &["a", "b", "c"]);
        r.push(vec![Cell::Int(3), Cell::Float(0.1), "x,y".into()]);
        r.push(vec![Cell::Bool(true), Cell::Float(f64::NAN), Cell::Null]);
        r
    }

    #[test]
    fn csv_layout() {
        assert_eq!(render(&sample(), Format::Csv), "a,b,c\n3,1.0000000000000001e-1,\"x,y\"\ntrue,NaN,\n");
    }

    #[test]
    fn seventeen_digits() {
        assert_eq!(format_float(1.0), "1.0000000000000000e0");
        assert_eq!(format_float(-0.25), "-2.5000000000000000e-1");
        assert_eq!(format_float(f64::INFINITY), "inf");
    }

    #[test]
    fn json_round_trips_floats() {
        let mut r = Report::new("demo", &["x"]);
        let values = [0.1, 1.0 / 3.0, std::f64::consts::PI, 1e-300, -123456.789];
        for v in values {
            r.push(vec![Cell::Float(v)]);
        }
        let parsed: Value = serde_json::from_str(&render(&r, Format::Json)).unwrap();
        for (row, v) in parsed["rows"].as_array().unwrap().iter().zip(values) {
            assert_eq!(row["x"].as_f64().unwrap().to_bits(), v.to_bits());
        }
        assert_eq!(parsed["columns"][0], "x");
        assert_eq!(parsed["command"], "demo");
    }

    #[test]
    fn json_keeps_column_order() {
        let text = render(&sample(), Format::Json);
        let (ia, ib, ic) = (text.find("\"a\":").unwrap(), text.find("\"b\":").unwrap(), text.find("\"c\":").unwrap());
        assert!(ia < ib && ib < ic);
    }
}
