use serde::Serialize;
use serde_json::{Map, Number, Value};

/// Bumped whenever a column is renamed or removed.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    fn tag(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Int(u64),
    Num(f64),
    Text(String),
    Flag(bool),
    Empty,
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as u64)
    }
}

impl From<u32> for Cell {
    fn from(v: u32) -> Self {
        Cell::Int(v.into())
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Flag(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

/// A command's result: the echo of what was asked plus a table of rows.
#[derive(Clone, Debug)]
pub struct OutputRecord {
    pub command: &'static str,
    pub params: Vec<(&'static str, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Serialize)]
struct Envelope<'a> {
    schema_version: u32,
    command: &'a str,
    format: &'a str,
    params: Map<String, Value>,
    columns: &'a [&'a str],
    rows: Vec<Map<String, Value>>,
}

impl OutputRecord {
    pub fn new(command: &'static str, columns: Vec<&'static str>) -> Self {
        Self {
            command,
            params: Vec::new(),
            columns,
            rows: Vec::new(),
        }
    }

    pub fn param(mut self, name: &'static str, value: impl Into<Cell>) -> Self {
        self.params.push((name, value.into()));
        self
    }

    pub fn push_row(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format, digits: usize) -> String {
        match format {
            Format::Csv => self.to_csv(digits),
            Format::Json => self.to_json(digits),
        }
    }

    fn to_csv(&self, digits: usize) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(|c| csv_cell(c, digits)).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self, digits: usize) -> String {
        let params = self
            .params
            .iter()
            .map(|(k, v)| (k.to_string(), json_cell(v, digits)))
            .collect();
        let rows = self
            .rows
            .iter()
            .map(|row| {
                self.columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| (k.to_string(), json_cell(v, digits)))
                    .collect()
            })
            .collect();
        let env = Envelope {
            schema_version: SCHEMA_VERSION,
            command: self.command,
            format: Format::Json.tag(),
            params,
            columns: &self.columns,
            rows,
        };
        let mut s = serde_json::to_string_pretty(&env).expect("plain data serializes");
        s.push('\n');
        s
    }
}

fn csv_cell(c: &Cell, digits: usize) -> String {
    match c {
        Cell::Int(v) => v.to_string(),
        Cell::Num(v) => format_sig(*v, digits),
        Cell::Flag(v) => v.to_string(),
        Cell::Empty => String::new(),
        Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
        Cell::Text(s) => s.clone(),
    }
}

fn json_cell(c: &Cell, digits: usize) -> Value {
    match c {
        Cell::Int(v) => Value::from(*v),
        // round first so both formats carry the same digits
        Cell::Num(v) => format_sig(*v, digits)
            .parse::<f64>()
            .ok()
            .and_then(Number::from_f64)
            .map_or(Value::Null, Value::Number),
        Cell::Flag(v) => Value::Bool(*v),
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Empty => Value::Null,
    }
}

/// `v` rounded to `digits` significant digits. Plain decimal for moderate
/// exponents, scientific otherwise; trailing zeros are dropped.
pub fn format_sig(v: f64, digits: usize) -> String {
    let digits = digits.max(1);
    if !v.is_finite() {
        return v.to_string();
    }
    if v == 0.0 {
        return "0".to_string();
    }
    let sci = format!("{:.*e}", digits - 1, v);
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{v:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if !s.contains('.') {
        return s;
    }
    s.trim_end_matches('0').trim_end_matches('.').to_string()
}
