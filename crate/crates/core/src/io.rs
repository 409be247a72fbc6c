//! Text formats: weight-matrix CSV and the fixed numeric formatting shared by
//! the CLI outputs.

use std::io::Write;

use crate::error::{Error, Result};
use crate::visibility::WeightMatrix;

pub const SIGNIFICANT_DIGITS: usize = 9;

/// Formats like C's `%.9g`: nine significant digits, trailing zeros
/// removed, `inf` for infinity.
pub fn format_sig(value: f64) -> String {
    if value.is_nan() {
        return "nan".into();
    }
    if value.is_infinite() {
        return if value > 0.0 { "inf" } else { "-inf" }.into();
    }
    if value == 0.0 {
        return "0".into();
    }
    let sci = format!("{:.*e}", SIGNIFICANT_DIGITS - 1, value);
    let (mantissa, exp) = sci.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..SIGNIFICANT_DIGITS as i32).contains(&exp) {
        let decimals = (SIGNIFICANT_DIGITS as i32 - 1 - exp) as usize;
        trim_zeros(format!("{value:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!(
            "{}e{sign}{:02}",
            trim_zeros(mantissa.to_string()),
            exp.abs()
        )
    }
}

fn trim_zeros(s: String) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn parse_number(token: &str) -> Result<f64> {
    match token.trim() {
        "inf" => Ok(f64::INFINITY),
        t => t
            .parse::<f64>()
            .map_err(|_| Error::Argument(format!("`{t}` is not a number"))),
    }
}

/// Writes the matrix as `n` comma-separated lines with LF endings.
pub fn write_matrix_csv(w: &WeightMatrix, mut out: impl Write) -> std::io::Result<()> {
    let mut line = String::new();
    for row in w.rows() {
        line.clear();
        for (j, &v) in row.iter().enumerate() {
            if j > 0 {
                line.push(',');
            }
            line.push_str(&format_sig(v));
        }
        line.push('\n');
        out.write_all(line.as_bytes())?;
    }
    Ok(())
}

pub fn matrix_csv_string(w: &WeightMatrix) -> String {
    let mut buf = Vec::new();
    write_matrix_csv(w, &mut buf).expect("writing to memory cannot fail");
    String::from_utf8(buf).expect("ASCII output")
}

pub fn parse_matrix_csv(text: &str) -> Result<WeightMatrix> {
    let rows = text
        .lines()
        .filter(|l| !l.trim().is_empty())
        .map(|line| {
            line.split(',')
                .map(parse_number)
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    WeightMatrix::from_rows(&rows)
}
