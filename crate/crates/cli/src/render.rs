//! Serialization helpers shared by the subcommands.
//!
//! Output contract: rationals are "num/den" strings, floats carry 17
//! significant digits (fixed scientific form, so equal inputs produce equal
//! bytes), and every JSON payload or CSV file starts with a schema-version
//! marker.

use anyhow::Result;
use num::rational::BigRational;
use serde_json::value::RawValue;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

/// A float rendered with 17 significant digits, inserted into JSON as a
/// plain number literal.
pub fn f17(x: f64) -> Box<RawValue> {
    RawValue::from_string(f17_str(x)).expect("finite float formats as a JSON number")
}

pub fn f17_str(x: f64) -> String {
    format!("{x:.16e}")
}

/// "num/den" form, denominator always present so the grammar has one shape.
pub fn rat_str(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

pub fn stability_str(s: reliq::thresholds::Stability) -> &'static str {
    match s {
        reliq::thresholds::Stability::Stable => "stable",
        reliq::thresholds::Stability::Unstable => "unstable",
        reliq::thresholds::Stability::Marginal => "marginal",
    }
}

pub fn region_str(r: &reliq::dynamics::FixedPointRegion) -> String {
    match r {
        reliq::dynamics::FixedPointRegion::Symbol(s) => format!("symbol-{s}"),
        reliq::dynamics::FixedPointRegion::Center => "center".into(),
    }
}

/// Pretty JSON with a trailing newline, the byte-stable form all JSON
/// subcommands emit.
pub fn to_json_text<T: serde::Serialize>(payload: &T) -> Result<String> {
    Ok(format!("{}\n", serde_json::to_string_pretty(payload)?))
}

/// Accumulates a CSV document: schema marker line, header row, data rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new(schema: &str, header: &str) -> Self {
        Csv {
            text: format!("# schema {schema}\n{header}\n"),
        }
    }

    pub fn row(&mut self, fields: &[String]) {
        self.text.push_str(&fields.join(","));
        self.text.push('\n');
    }

    pub fn finish(self) -> String {
        self.text
    }
}

/// Write to `--out PATH` when given, stdout otherwise.
pub fn emit(out: &Option<PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
