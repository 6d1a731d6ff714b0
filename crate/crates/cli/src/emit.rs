//! Text emitters. Every float goes out with 17 significant digits.

use std::fmt::Write;

use amo_core::spectrum::Tile;
use serde::Serialize;
use serde_json::Value;

use crate::error::{CliError, CliResult};

/// 17 significant digits, which round-trips every `f64`.
pub fn fmt17(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 {
            "inf".into()
        } else {
            "-inf".into()
        }
    } else {
        format!("{x:.16e}")
    }
}

pub fn to_json_text<T: Serialize>(value: &T) -> CliResult<String> {
    let v = serde_json::to_value(value).map_err(|e| CliError::ConfigInvalid(e.to_string()))?;
    let mut out = String::new();
    write_value(&mut out, &v, 0);
    out.push('\n');
    Ok(out)
}

fn write_value(out: &mut String, v: &Value, depth: usize) {
    let pad = |out: &mut String, d: usize| out.extend(std::iter::repeat_n("  ", d));
    match v {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&v.to_string()),
        Value::Number(n) => match (n.as_i64(), n.as_u64(), n.as_f64()) {
            (Some(i), _, _) => write!(out, "{i}").unwrap(),
            (_, Some(u), _) => write!(out, "{u}").unwrap(),
            (_, _, Some(f)) => out.push_str(&fmt17(f)),
            _ => out.push_str(&n.to_string()),
        },
        Value::Array(a) if a.is_empty() => out.push_str("[]"),
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                pad(out, depth + 1);
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push(']');
        }
        Value::Object(m) if m.is_empty() => out.push_str("{}"),
        Value::Object(m) => {
            out.push_str("{\n");
            for (i, (k, x)) in m.iter().enumerate() {
                pad(out, depth + 1);
                write!(out, "{}: ", Value::String(k.clone())).unwrap();
                write_value(out, x, depth + 1);
                out.push_str(if i + 1 < m.len() { ",\n" } else { "\n" });
            }
            pad(out, depth);
            out.push('}');
        }
    }
}

/// A CSV table of already formatted cells.
#[derive(Debug, Clone, Default)]
pub struct Table {
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(header: &[&'static str]) -> Self {
        Self { header: header.to_vec(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut s = self.header.join(",");
        s.push('\n');
        for r in &self.rows {
            s.push_str(&r.join(","));
            s.push('\n');
        }
        s
    }

    /// One object per row; cells that parse as numbers become numbers.
    pub fn to_json(&self) -> CliResult<String> {
        let rows: Vec<serde_json::Map<String, Value>> = self
            .rows
            .iter()
            .map(|r| {
                self.header
                    .iter()
                    .zip(r)
                    .map(|(h, c)| {
                        let v = if let Ok(i) = c.parse::<i64>() {
                            Value::from(i)
                        } else if let Ok(f) = c.parse::<f64>() {
                            serde_json::Number::from_f64(f).map(Value::Number).unwrap_or(Value::Null)
                        } else {
                            Value::String(c.clone())
                        };
                        (h.to_string(), v)
                    })
                    .collect()
            })
            .collect();
        to_json_text(&rows)
    }
}

pub const SVG_WIDTH: f64 = 1200.0;
pub const SVG_HEIGHT: f64 = 900.0;
const MARGIN: f64 = 40.0;

/// One horizontal segment per band at height `p/q`, energy on the
/// horizontal axis over `[−(2 + 2λ), 2 + 2λ]`.
pub fn butterfly_svg(lambda: f64, tiles: &[Tile]) -> String {
    let e_max = 2.0 + 2.0 * lambda.abs();
    let sx = |e: f64| MARGIN + (e + e_max) / (2.0 * e_max) * (SVG_WIDTH - 2.0 * MARGIN);
    let sy = |a: f64| SVG_HEIGHT - MARGIN - a * (SVG_HEIGHT - 2.0 * MARGIN);
    let mut s = String::new();
    writeln!(
        s,
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{w}\" height=\"{h}\" viewBox=\"0 0 {w} {h}\">",
        w = SVG_WIDTH,
        h = SVG_HEIGHT
    )
    .unwrap();
    writeln!(s, "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>").unwrap();
    writeln!(s, "<g stroke=\"black\" stroke-linecap=\"butt\">").unwrap();
    for t in tiles {
        let Some(b) = &t.bands else { continue };
        let y = sy(t.p as f64 / t.q as f64);
        let width = 4.0 / t.q as f64;
        for band in &b.bands {
            writeln!(
                s,
                "<line x1=\"{:.4}\" y1=\"{y:.4}\" x2=\"{:.4}\" y2=\"{y:.4}\" stroke-width=\"{width:.6}\"/>",
                sx(band.lo),
                sx(band.hi)
            )
            .unwrap();
        }
    }
    s.push_str("</g>\n</svg>\n");
    s
}
