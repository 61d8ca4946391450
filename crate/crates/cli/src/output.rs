//! JSON and CSV emission with every float written to 17 significant digits.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::{CompactFormatter, Formatter, PrettyFormatter};
use serde_json::Value;

/// Wraps a formatter and writes floats as `d.dddddddddddddddde±x`.
struct Digits<F>(F);

fn digits(v: f64) -> String {
    format!("{v:.16e}")
}

macro_rules! delegate {
    ($($name:ident($($arg:ident: $ty:ty),*)),* $(,)?) => {
        $(fn $name<W: ?Sized + Write>(&mut self, w: &mut W $(, $arg: $ty)*) -> io::Result<()> {
            self.0.$name(w $(, $arg)*)
        })*
    };
}

impl<F: Formatter> Formatter for Digits<F> {
    fn write_f64<W: ?Sized + Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        w.write_all(digits(value).as_bytes())
    }

    fn write_f32<W: ?Sized + Write>(&mut self, w: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(w, value as f64)
    }

    delegate!(
        begin_array(),
        end_array(),
        begin_array_value(first: bool),
        end_array_value(),
        begin_object(),
        end_object(),
        begin_object_key(first: bool),
        end_object_key(),
        begin_object_value(),
        end_object_value(),
    );
}

pub fn json<T: Serialize>(value: &T, pretty: bool) -> String {
    let mut buf = Vec::new();
    let result = if pretty {
        let mut ser =
            serde_json::Serializer::with_formatter(&mut buf, Digits(PrettyFormatter::new()));
        value.serialize(&mut ser)
    } else {
        let mut ser = serde_json::Serializer::with_formatter(&mut buf, Digits(CompactFormatter));
        value.serialize(&mut ser)
    };
    result.expect("values serialize");
    String::from_utf8(buf).expect("json is utf-8")
}

/// A CSV cell: floats get 17 significant digits.
pub enum Cell {
    Int(i128),
    Float(f64),
    Text(String),
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(v) => digits(*v),
            Cell::Text(s) => s.clone(),
        }
    }
}

/// CSV text with a header row, or an aligned table when `pretty`.
pub fn csv(header: &[&str], rows: &[Vec<Cell>], pretty: bool) -> String {
    let cells: Vec<Vec<String>> = rows
        .iter()
        .map(|r| r.iter().map(Cell::render).collect())
        .collect();
    if pretty {
        let mut widths: Vec<usize> = header.iter().map(|h| h.len()).collect();
        for r in &cells {
            for (w, c) in widths.iter_mut().zip(r) {
                *w = (*w).max(c.len());
            }
        }
        let line = |r: Vec<&str>| -> String {
            r.iter()
                .zip(&widths)
                .map(|(c, w)| format!("{c:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(header.to_vec()) + "\n";
        for r in &cells {
            out += &(line(r.iter().map(String::as_str).collect()) + "\n");
        }
        return out;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in &cells {
        w.write_record(r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("flush")).expect("csv is utf-8")
}

/// `{"config": ..., "result": ...}`.
pub fn envelope(config: Value, result: Value) -> Value {
    serde_json::json!({ "config": config, "result": result })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_carry_seventeen_digits() {
        let s = json(
            &serde_json::json!({"x": 0.1, "n": 3, "v": [1.0, f64::NAN]}),
            false,
        );
        assert_eq!(
            s,
            r#"{"n":3,"v":[1.0000000000000000e0,null],"x":1.0000000000000001e-1}"#
        );
        let back: Value = serde_json::from_str(&s).unwrap();
        assert_eq!(back["x"].as_f64(), Some(0.1));
    }

    #[test]
    fn csv_has_a_header_row() {
        let s = csv(&["k", "v"], &[vec![Cell::Int(2), Cell::Float(0.5)]], false);
        assert_eq!(s, "k,v\n2,5.0000000000000000e-1\n");
        let p = csv(
            &["k", "v"],
            &[vec![Cell::Int(2), Cell::Text("a".into())]],
            true,
        );
        assert_eq!(p, "k  v\n2  a\n");
    }
}
