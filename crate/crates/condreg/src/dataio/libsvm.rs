//! LIBSVM text format: one row per line, `label index:value ...` with
//! 1-based strictly ascending indices; absent indices are zero. The feature
//! count is the largest index appearing anywhere in the file.

use std::io::{BufRead, BufReader, Read, Write};

use crate::error::{Error, Result};
use crate::mat::RealMat;
use crate::scalar::Scalar;

use super::parse_real;

/// Parses a LIBSVM stream into targets and a dense feature matrix.
pub fn parse_libsvm<T: Scalar>(input: impl Read) -> Result<(Vec<T>, RealMat<T>)> {
    let mut targets: Vec<T> = Vec::new();
    let mut sparse_rows: Vec<Vec<(usize, T)>> = Vec::new();
    let mut width = 0usize;

    for (idx, line) in BufReader::new(input).lines().enumerate() {
        let line = line?;
        let lineno = idx + 1;
        let mut tokens = line.split_whitespace();
        let Some(label) = tokens.next() else {
            continue; // blank line
        };
        targets.push(parse_real::<T>(label, lineno)?);

        let mut row: Vec<(usize, T)> = Vec::new();
        let mut last_index = 0usize;
        for token in tokens {
            let Some((index_text, value_text)) = token.split_once(':') else {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!("expected index:value, got {token:?}"),
                });
            };
            let index: usize = index_text.parse().map_err(|_| Error::Parse {
                line: lineno,
                message: format!("bad feature index {index_text:?}"),
            })?;
            if index == 0 || index <= last_index {
                return Err(Error::Parse {
                    line: lineno,
                    message: format!(
                        "feature indices must be 1-based and strictly ascending, got {index} after {last_index}"
                    ),
                });
            }
            last_index = index;
            width = width.max(index);
            row.push((index - 1, parse_real::<T>(value_text, lineno)?));
        }
        sparse_rows.push(row);
    }

    let m = targets.len();
    let mut dense = vec![T::zero(); m * width];
    for (j, row) in sparse_rows.iter().enumerate() {
        for &(col, value) in row {
            dense[j * width + col] = value;
        }
    }
    Ok((targets, RealMat::from_vec(dense, m, width)?))
}

/// Writes targets and features back out, skipping zero entries.
pub fn serialize_libsvm<T: Scalar>(z: &[T], y: &RealMat<T>, mut out: impl Write) -> Result<()> {
    if z.len() != y.rows() {
        return Err(Error::parameter(format!(
            "target count {} does not match {} feature rows",
            z.len(),
            y.rows()
        )));
    }
    for (target, row) in z.iter().zip(y.iter_rows()) {
        write!(out, "{}", target.to_f64_c())?;
        for (i, v) in row.iter().enumerate() {
            if *v != T::zero() {
                write!(out, " {}:{}", i + 1, v.to_f64_c())?;
            }
        }
        writeln!(out)?;
    }
    Ok(())
}
