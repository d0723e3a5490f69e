use std::io::Write;

use serde::Serialize;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

/// `x` with `digits` significant digits, trailing zeros removed.
pub fn sig(x: f64, digits: usize) -> String {
    if x == 0.0 {
        return "0".into();
    }
    if !x.is_finite() {
        return format!("{x}");
    }
    let sci = format!("{:.*e}", digits - 1, x);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-5..digits as i32).contains(&exp) {
        let decimals = (digits as i32 - 1 - exp).max(0) as usize;
        trim_zeros(format!("{x:.decimals$}"))
    } else {
        format!("{}e{exp}", trim_zeros(mantissa.to_string()))
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

/// CSV rendering of a float, nine significant digits.
pub fn csv_num(x: f64) -> String {
    sig(x, 9)
}

/// One effective-rate result.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateRow {
    pub snr_db: f64,
    pub vary: Option<f64>,
    pub rate: f64,
    pub j: f64,
    pub method: &'static str,
    pub err: f64,
}

pub const RATE_HEADER: &str = "snr_db,vary,rate,j,method,err";

impl RateRow {
    fn csv(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            csv_num(self.snr_db),
            self.vary.map(csv_num).unwrap_or_default(),
            csv_num(self.rate),
            csv_num(self.j),
            self.method,
            csv_num(self.err)
        )
    }
}

/// A two-column `(x, value)` row of an MGF or density grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointRow {
    pub x: f64,
    pub value: f64,
}

/// Writes `#`-prefixed comment lines (CSV only), a header and the rows.
pub fn write_rate_rows<W: Write>(
    out: &mut W,
    rows: &[RateRow],
    format: Format,
    comments: &[String],
) -> Result<()> {
    match format {
        Format::Csv => {
            for c in comments {
                writeln!(out, "# {c}")?;
            }
            writeln!(out, "{RATE_HEADER}")?;
            for r in rows {
                writeln!(out, "{}", r.csv())?;
            }
        }
        Format::Jsonl => {
            for r in rows {
                serde_json::to_writer(&mut *out, r)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

/// Rows of a grid, with column names `x_name` and `value_name`.
pub fn write_point_rows<W: Write>(
    out: &mut W,
    rows: &[PointRow],
    format: Format,
    x_name: &str,
    value_name: &str,
) -> Result<()> {
    match format {
        Format::Csv => {
            writeln!(out, "{x_name},{value_name}")?;
            for r in rows {
                writeln!(out, "{},{}", csv_num(r.x), csv_num(r.value))?;
            }
        }
        Format::Jsonl => {
            for r in rows {
                let mut obj = serde_json::Map::new();
                obj.insert(x_name.into(), json_num(r.x)?);
                obj.insert(value_name.into(), json_num(r.value)?);
                serde_json::to_writer(&mut *out, &obj)?;
                writeln!(out)?;
            }
        }
    }
    Ok(())
}

fn json_num(x: f64) -> Result<serde_json::Value> {
    serde_json::Number::from_f64(x)
        .map(serde_json::Value::Number)
        .ok_or_else(|| CliError::usage(format!("non-finite value {x} cannot be written as JSON")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn significant_digits() {
        assert_eq!(sig(0.693728066374985, 9), "0.693728066");
        assert_eq!(sig(1.0, 9), "1");
        assert_eq!(sig(-10.0, 9), "-10");
        assert_eq!(sig(30.0, 9), "30");
        assert_eq!(sig(6.775699167e-13, 9), "6.77569917e-13");
        assert_eq!(sig(1.5e-5, 9), "0.000015");
        assert_eq!(sig(123456789.4, 9), "123456789");
        assert_eq!(sig(1234567894.0, 9), "1.23456789e9");
        assert_eq!(sig(0.0, 9), "0");
    }

    #[test]
    fn csv_layout() {
        let rows = [RateRow {
            snr_db: 0.0,
            vary: None,
            rate: 0.5,
            j: 0.25,
            method: "quadrature",
            err: 1e-12,
        }];
        let mut buf = Vec::new();
        write_rate_rows(&mut buf, &rows, Format::Csv, &["A=2".into()]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "# A=2\nsnr_db,vary,rate,j,method,err\n0,,0.5,0.25,quadrature,1e-12\n"
        );
    }

    #[test]
    fn jsonl_layout() {
        let rows = [RateRow {
            snr_db: 10.0,
            vary: Some(2.0),
            rate: 0.5,
            j: 0.25,
            method: "closed_form",
            err: 0.0,
        }];
        let mut buf = Vec::new();
        write_rate_rows(&mut buf, &rows, Format::Jsonl, &[]).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "{\"snr_db\":10.0,\"vary\":2.0,\"rate\":0.5,\"j\":0.25,\"method\":\"closed_form\",\"err\":0.0}\n"
        );
    }
}
