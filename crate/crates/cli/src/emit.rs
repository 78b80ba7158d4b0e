//! Record output as JSON Lines or CSV.
//!
//! Every record is first converted to a [`serde_json::Value`] (field order
//! preserved), so both formats carry the same fields. Floats are written with
//! 17 significant digits in both; non-finite floats become `null` in JSON and
//! an empty cell in CSV.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter};
use serde_json::Value;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

pub fn float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Compact JSON with every float written by [`float`].
struct Sig17;

impl Formatter for Sig17 {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, v: f64) -> io::Result<()> {
        w.write_all(float(v).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, v: f32) -> io::Result<()> {
        self.write_f64(w, v as f64)
    }

    fn write_byte_array<W: ?Sized + Write>(&mut self, w: &mut W, v: &[u8]) -> io::Result<()> {
        CompactFormatter.write_byte_array(w, v)
    }
}

fn json(v: &Value) -> io::Result<Vec<u8>> {
    let mut out = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut out, Sig17);
    v.serialize(&mut ser).map_err(io::Error::other)?;
    Ok(out)
}

fn cell(v: &Value) -> io::Result<String> {
    Ok(match v {
        Value::Null => String::new(),
        Value::Bool(b) => b.to_string(),
        Value::Number(n) if n.is_f64() => n.as_f64().map(float).unwrap_or_default(),
        Value::Number(n) => n.to_string(),
        Value::String(s) => s.clone(),
        nested => String::from_utf8(json(nested)?).map_err(io::Error::other)?,
    })
}

/// Serializes `records` to `out`: one JSON object per line, or a CSV table
/// whose header is the field list of the first record.
pub fn write_records<T: Serialize, W: Write>(records: &[T], format: Format, out: W) -> io::Result<()> {
    let values = records
        .iter()
        .map(serde_json::to_value)
        .collect::<Result<Vec<_>, _>>()
        .map_err(io::Error::other)?;
    match format {
        Format::Json => {
            let mut out = out;
            for v in &values {
                out.write_all(&json(v)?)?;
                out.write_all(b"\n")?;
            }
            out.flush()
        }
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            let Some(Value::Object(first)) = values.first() else {
                return w.flush();
            };
            w.write_record(first.keys())?;
            for v in &values {
                let Value::Object(fields) = v else {
                    return Err(io::Error::other("CSV records must be objects"));
                };
                let row = fields.values().map(cell).collect::<io::Result<Vec<_>>>()?;
                w.write_record(row)?;
            }
            w.flush()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[derive(Serialize)]
    struct Row {
        k: u32,
        p: f64,
        note: Option<f64>,
        nested: Vec<f64>,
    }

    fn render(format: Format) -> String {
        let rows = [
            Row {
                k: 0,
                p: 0.1,
                note: None,
                nested: vec![1.0, 0.5],
            },
            Row {
                k: 1,
                p: f64::NAN,
                note: Some(2.0),
                nested: vec![],
            },
        ];
        let mut out = Vec::new();
        write_records(&rows, format, &mut out).unwrap();
        String::from_utf8(out).unwrap()
    }

    #[test]
    fn json_lines() {
        let s = render(Format::Json);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(
            lines[0],
            r#"{"k":0,"p":1.0000000000000001e-1,"note":null,"nested":[1.0000000000000000e0,5.0000000000000000e-1]}"#
        );
        assert_eq!(lines[1], r#"{"k":1,"p":null,"note":2.0000000000000000e0,"nested":[]}"#);
        let back: Value = serde_json::from_str(lines[0]).unwrap();
        assert_eq!(back["p"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_table() {
        let s = render(Format::Csv);
        let lines: Vec<&str> = s.lines().collect();
        assert_eq!(lines[0], "k,p,note,nested");
        assert_eq!(lines[1], r#"0,1.0000000000000001e-1,,"[1.0000000000000000e0,5.0000000000000000e-1]""#);
        assert_eq!(lines[2], "1,,2.0000000000000000e0,[]");
    }
}
