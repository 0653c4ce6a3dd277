//! Plain-text matrix I/O: one row per line, whitespace-separated entries,
//! complex values written as `a+bi` / `a-bi`. Real-only entries parse too.

use crate::error::{Error, Result};
use crate::C64;
use nalgebra::DMatrix;
use std::fmt::Write as _;

fn format_complex(z: C64) -> String {
    if z.im >= 0.0 {
        format!("{:.16e}+{:.16e}i", z.re, z.im)
    } else {
        format!("{:.16e}-{:.16e}i", z.re, -z.im)
    }
}

pub fn write_matrix(m: &DMatrix<C64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        for j in 0..m.ncols() {
            if j > 0 {
                out.push(' ');
            }
            let _ = write!(out, "{}", format_complex(m[(i, j)]));
        }
        out.push('\n');
    }
    out
}

/// Parse a single `a+bi` / `a-bi` / `a` / `bi` token.
pub fn parse_complex(token: &str) -> Result<C64> {
    let t = token.trim();
    if t.is_empty() {
        return Err(Error::Parse("empty complex token".into()));
    }
    let bad = || Error::Parse(format!("cannot parse complex number {t:?}"));
    if let Some(body) = t.strip_suffix(['i', 'I']) {
        // Find the sign splitting real and imaginary parts: the last
        // '+'/'-' that is not the leading sign and not an exponent sign.
        let bytes = body.as_bytes();
        let mut split = None;
        for k in (1..bytes.len()).rev() {
            let c = bytes[k];
            if (c == b'+' || c == b'-') && !matches!(bytes[k - 1], b'e' | b'E') {
                split = Some(k);
                break;
            }
        }
        match split {
            Some(k) => {
                let re: f64 = body[..k].parse().map_err(|_| bad())?;
                let im_str = &body[k..];
                let im: f64 = if im_str == "+" || im_str == "-" {
                    format!("{im_str}1").parse().map_err(|_| bad())?
                } else {
                    im_str.parse().map_err(|_| bad())?
                };
                Ok(C64::new(re, im))
            }
            None => {
                let im: f64 = match body {
                    "" | "+" => 1.0,
                    "-" => -1.0,
                    _ => body.parse().map_err(|_| bad())?,
                };
                Ok(C64::new(0.0, im))
            }
        }
    } else {
        let re: f64 = t.parse().map_err(|_| bad())?;
        Ok(C64::new(re, 0.0))
    }
}

pub fn read_matrix(text: &str) -> Result<DMatrix<C64>> {
    let mut rows: Vec<Vec<C64>> = Vec::new();
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let row: Result<Vec<C64>> = line.split_whitespace().map(parse_complex).collect();
        rows.push(row?);
    }
    if rows.is_empty() {
        return Err(Error::Parse("matrix text contains no rows".into()));
    }
    let ncols = rows[0].len();
    if rows.iter().any(|r| r.len() != ncols) {
        return Err(Error::Parse("matrix rows have inconsistent lengths".into()));
    }
    let nrows = rows.len();
    Ok(DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]))
}
