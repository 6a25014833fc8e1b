//! CSV import/export of paths and jump records, and JSON rendering with
//! fixed 17-significant-digit floats so that fixture files are byte-stable.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{DiscretePath, SamplingScheme};

/// Render a float with 17 significant digits (round-trip exact for f64).
pub fn fmt_f64(value: f64) -> String {
    format!("{:.16e}", value)
}

/// Write the path as `t,x` rows.
pub fn write_path_csv<W: Write>(path: &DiscretePath, mut out: W) -> Result<()> {
    writeln!(out, "t,x")?;
    let scheme = path.scheme();
    for (k, &x) in path.values().iter().enumerate() {
        writeln!(out, "{},{}", fmt_f64(scheme.time(k)), fmt_f64(x))?;
    }
    Ok(())
}

/// Write the latent jump record as `k,s` rows (interval index, jump time).
pub fn write_jumps_csv<W: Write>(path: &DiscretePath, mut out: W) -> Result<()> {
    writeln!(out, "k,s")?;
    if let Some(record) = path.latent() {
        for k in 0..record.intervals() {
            for &s in record.times(k) {
                writeln!(out, "{},{}", k, fmt_f64(s))?;
            }
        }
    }
    Ok(())
}

/// Read a `t,x` CSV back into a path observed at step size `delta`.
///
/// Line numbers in errors are 1-based and count the header.
pub fn read_path_csv<R: BufRead>(reader: R, delta: f64) -> Result<DiscretePath> {
    let mut values = Vec::new();
    let mut lines = reader.lines().enumerate();
    match lines.next() {
        Some((_, Ok(header))) if header.trim() == "t,x" => {}
        Some((_, Ok(header))) => {
            return Err(Error::Csv {
                line: 1,
                reason: format!("expected header `t,x`, found `{}`", header.trim()),
            })
        }
        Some((_, Err(e))) => return Err(e.into()),
        None => {
            return Err(Error::Csv {
                line: 1,
                reason: "empty file".to_string(),
            })
        }
    }
    for (idx, line) in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let mut fields = trimmed.split(',');
        let (t_field, x_field) = match (fields.next(), fields.next(), fields.next()) {
            (Some(t), Some(x), None) => (t, x),
            _ => {
                return Err(Error::Csv {
                    line: idx + 1,
                    reason: "expected exactly two comma-separated fields".to_string(),
                })
            }
        };
        let _t: f64 = t_field.trim().parse().map_err(|_| Error::Csv {
            line: idx + 1,
            reason: format!("invalid time value `{}`", t_field.trim()),
        })?;
        let x: f64 = x_field.trim().parse().map_err(|_| Error::Csv {
            line: idx + 1,
            reason: format!("invalid observation value `{}`", x_field.trim()),
        })?;
        values.push(x);
    }
    if values.len() < 2 {
        return Err(Error::Csv {
            line: values.len() + 1,
            reason: "need at least two observations".to_string(),
        });
    }
    let x0 = values[0];
    let scheme = SamplingScheme::new(values.len() - 1, delta, x0)?;
    DiscretePath::new(scheme, values, None)
}

struct SigDigitFormatter;

impl serde_json::ser::Formatter for SigDigitFormatter {
    fn write_f64<W>(&mut self, writer: &mut W, value: f64) -> std::io::Result<()>
    where
        W: ?Sized + std::io::Write,
    {
        if value.is_finite() {
            write!(writer, "{:.16e}", value)
        } else {
            writer.write_all(b"null")
        }
    }
}

/// Serialize to JSON with every float rendered at 17 significant digits.
pub fn to_json_string<T: Serialize>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, SigDigitFormatter);
    value
        .serialize(&mut ser)
        .map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))?;
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}
