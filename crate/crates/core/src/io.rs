//! Plain-text matrix serialization.
//!
//! The format is line-oriented: an optional leading block of `#` comments,
//! then the dimension `n` on its own line, then `n` rows of `n` whitespace
//! separated entries. An entry is either `re` or `re,im`. Writers emit 17
//! significant digits so a write/read round trip is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hpd::PdMatrix;

/// Formats one float with enough digits to round-trip exactly.
pub fn format_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn format_entry(v: Complex64) -> String {
    if v.im == 0.0 {
        format_f64(v.re)
    } else {
        format!("{},{}", format_f64(v.re), format_f64(v.im))
    }
}

/// Renders a matrix in the text format.
pub fn format_matrix(m: &DMatrix<Complex64>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{}", m.nrows());
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_entry(m[(i, j)])).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

fn parse_entry(token: &str, line_no: usize) -> Result<Complex64> {
    let mut parts = token.split(',');
    let re_part = parts.next().unwrap_or("");
    let im_part = parts.next();
    if parts.next().is_some() {
        return Err(Error::InvalidInput(format!(
            "line {line_no}: entry '{token}' has more than two components"
        )));
    }
    let re: f64 = re_part.parse().map_err(|_| {
        Error::InvalidInput(format!("line {line_no}: cannot parse '{re_part}' as a number"))
    })?;
    let im: f64 = match im_part {
        Some(s) => s.parse().map_err(|_| {
            Error::InvalidInput(format!("line {line_no}: cannot parse '{s}' as a number"))
        })?,
        None => 0.0,
    };
    Ok(Complex64::new(re, im))
}

/// Parses the text format into a dense complex matrix.
pub fn parse_matrix(text: &str) -> Result<DMatrix<Complex64>> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));

    let (no, header) = lines
        .next()
        .ok_or_else(|| Error::InvalidInput("empty matrix text".into()))?;
    let n: usize = header.parse().map_err(|_| {
        Error::InvalidInput(format!(
            "line {no}: expected the dimension as a single integer, got '{header}'"
        ))
    })?;
    if n == 0 {
        return Err(Error::InvalidInput(format!("line {no}: dimension must be positive")));
    }

    let mut mat = DMatrix::<Complex64>::zeros(n, n);
    for i in 0..n {
        let (no, row) = lines
            .next()
            .ok_or_else(|| Error::InvalidInput(format!("missing row {} of {n}", i + 1)))?;
        let tokens: Vec<&str> = row.split_whitespace().collect();
        if tokens.len() != n {
            return Err(Error::InvalidInput(format!(
                "line {no}: expected {n} entries, found {}",
                tokens.len()
            )));
        }
        for (j, tok) in tokens.iter().enumerate() {
            mat[(i, j)] = parse_entry(tok, no)?;
        }
    }
    if let Some((no, extra)) = lines.next() {
        return Err(Error::InvalidInput(format!(
            "line {no}: unexpected trailing content '{extra}'"
        )));
    }
    Ok(mat)
}

/// Reads a raw complex matrix from a file.
pub fn read_matrix_file<P: AsRef<Path>>(path: P) -> Result<DMatrix<Complex64>> {
    let text = std::fs::read_to_string(path.as_ref()).map_err(|e| {
        Error::InvalidInput(format!("cannot read {}: {e}", path.as_ref().display()))
    })?;
    parse_matrix(&text)
}

/// Reads a file and validates it as Hermitian positive definite.
pub fn read_pd_file<P: AsRef<Path>>(path: P) -> Result<PdMatrix> {
    let mat = read_matrix_file(path.as_ref())?;
    PdMatrix::from_matrix(mat).map_err(|e| match e {
        Error::InvalidMatrix(msg) => {
            Error::InvalidMatrix(format!("{}: {msg}", path.as_ref().display()))
        }
        other => other,
    })
}

/// Writes a matrix file in the text format.
pub fn write_matrix_file<P: AsRef<Path>>(path: P, m: &DMatrix<Complex64>) -> Result<()> {
    std::fs::write(path.as_ref(), format_matrix(m))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn round_trip_is_exact() {
        let m = DMatrix::from_row_slice(
            2,
            2,
            &[
                c(1.0 / 3.0, 0.0),
                c(0.1, -2.0e-17),
                c(0.1, 2.0e-17),
                c(7.25, 0.0),
            ],
        );
        let text = format_matrix(&m);
        let back = parse_matrix(&text).unwrap();
        assert_eq!(m, back);
    }

    #[test]
    fn parses_comments_and_real_entries() {
        let text = "# weights example\n2\n1 0.5\n0.5 2\n";
        let m = parse_matrix(text).unwrap();
        assert_eq!(m[(0, 1)], c(0.5, 0.0));
        assert_eq!(m[(1, 1)], c(2.0, 0.0));
    }

    #[test]
    fn reports_line_numbers_on_bad_tokens() {
        let text = "2\n1 0.5\n0.5 oops\n";
        let err = parse_matrix(text).unwrap_err();
        assert!(err.to_string().contains("line 3"));
    }

    #[test]
    fn rejects_short_rows() {
        let text = "2\n1\n0.5 2\n";
        assert!(parse_matrix(text).is_err());
    }

    #[test]
    fn rejects_trailing_rows() {
        let text = "1\n1\n2\n";
        assert!(parse_matrix(text).is_err());
    }
}
