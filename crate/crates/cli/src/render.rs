//! Deterministic text output: every real number is printed with seventeen
//! significant digits so it parses back to the same `f64`.

use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::Path;

use lpq::simulator::{format_probability, CSV_SCHEMA_LINE};
use serde::{Serialize, Serializer};
use serde_json::value::RawValue;

use crate::CliError;

/// A real number serialized verbatim in `{:.16e}` form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Real(pub f64);

impl Serialize for Real {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        if !self.0.is_finite() {
            return serializer.serialize_none();
        }
        RawValue::from_string(format_probability(self.0))
            .map_err(serde::ser::Error::custom)?
            .serialize(serializer)
    }
}

pub fn real(x: f64) -> String {
    format_probability(x)
}

pub fn opt_real(x: Option<f64>) -> String {
    x.map(real).unwrap_or_default()
}

pub fn verdict(pass: bool) -> &'static str {
    if pass {
        "pass"
    } else {
        "fail"
    }
}

/// CSV text: schema line, optional `# key=value` comment lines, header, rows.
pub struct Csv {
    text: String,
}

impl Csv {
    pub fn new() -> Self {
        Self {
            text: format!("{CSV_SCHEMA_LINE}\n"),
        }
    }

    pub fn comment(&mut self, pairs: &[(&str, String)]) -> &mut Self {
        let body: Vec<String> = pairs.iter().map(|(k, v)| format!("{k}={v}")).collect();
        let _ = writeln!(self.text, "# {}", body.join(" "));
        self
    }

    pub fn row<S: AsRef<str>>(&mut self, fields: &[S]) -> &mut Self {
        let line: Vec<&str> = fields.iter().map(|f| f.as_ref()).collect();
        let _ = writeln!(self.text, "{}", line.join(","));
        self
    }

    pub fn finish(&mut self) -> String {
        std::mem::take(&mut self.text)
    }
}

pub fn json<T: Serialize>(value: &T) -> Result<String, CliError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Validation(e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Writes to `out`, or standard output when absent.
pub fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| CliError::Validation(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .and_then(|_| stdout.flush())
                .map_err(|e| CliError::Validation(format!("cannot write output: {e}")))
        }
    }
}
