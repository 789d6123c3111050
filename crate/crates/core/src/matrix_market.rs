//! Matrix Market coordinate I/O for the banded matrices and vectors.
//!
//! Values are written in shortest-round-trip scientific notation, so an
//! export/import cycle reproduces every entry bit-exactly, subnormals
//! included. The system matrix uses the `symmetric` qualifier with the lower
//! triangle stored; the factor is written as `general` (it is triangular, not
//! symmetric).

use crate::assembly::{BandedSymmetricMatrix, RightHandSide};
use crate::band::{lower_positions, BandStorage};
use crate::cholesky::CholeskyFactor;
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

const BANNER_SYMMETRIC: &str = "%%MatrixMarket matrix coordinate real symmetric";
const BANNER_GENERAL: &str = "%%MatrixMarket matrix coordinate real general";
const BANNER_ARRAY: &str = "%%MatrixMarket matrix array real general";

/// Write the lower triangle of a symmetric band matrix in coordinate format.
pub fn write_symmetric<T: Scalar, W: Write>(a: &BandedSymmetricMatrix<T>, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    let entries: Vec<_> = a.nonzeros().collect();
    writeln!(w, "{BANNER_SYMMETRIC}")?;
    writeln!(w, "{} {} {}", a.n(), a.n(), entries.len())?;
    for (i, j, v) in entries {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a symmetric band matrix to `path`.
pub fn export_matrix_market<T: Scalar>(a: &BandedSymmetricMatrix<T>, path: &Path) -> Result<()> {
    write_symmetric(a, File::create(path)?)
}

/// Read a symmetric coordinate file back into band storage. The bandwidth is
/// the largest `|i - j|` seen in the file.
pub fn read_symmetric<T: Scalar, R: BufRead>(r: R) -> Result<BandedSymmetricMatrix<T>> {
    let mut lines = r.lines();
    let banner = lines
        .next()
        .ok_or_else(|| Error::Format("empty Matrix Market file".to_string()))??;
    if !banner.trim_end().eq_ignore_ascii_case(BANNER_SYMMETRIC) {
        return Err(Error::Format(format!(
            "unsupported banner {banner:?} (expected {BANNER_SYMMETRIC:?})"
        )));
    }

    let mut size_line = None;
    for line in lines.by_ref() {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        size_line = Some(line);
        break;
    }
    let size_line = size_line.ok_or_else(|| Error::Format("missing size line".to_string()))?;
    let dims: Vec<&str> = size_line.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(Error::Format(format!("bad size line {size_line:?}")));
    }
    let rows: usize = parse_field(dims[0], "row count")?;
    let cols: usize = parse_field(dims[1], "column count")?;
    let nnz: usize = parse_field(dims[2], "nonzero count")?;
    if rows != cols {
        return Err(Error::Format(format!(
            "matrix is not square: {rows} x {cols}"
        )));
    }
    if rows == 0 {
        return Err(Error::Format("empty matrix".to_string()));
    }

    let mut entries: Vec<(usize, usize, T)> = Vec::with_capacity(nnz);
    let mut bandwidth = 0usize;
    for line in lines {
        let line = line?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Format(format!("bad entry line {trimmed:?}")));
        }
        let i: usize = parse_field(fields[0], "row index")?;
        let j: usize = parse_field(fields[1], "column index")?;
        if i == 0 || j == 0 || i > rows || j > rows {
            return Err(Error::Format(format!("index out of range in {trimmed:?}")));
        }
        // accept either triangle, store lower
        let (i, j) = if i >= j {
            (i - 1, j - 1)
        } else {
            (j - 1, i - 1)
        };
        let v = T::parse_decimal(fields[2])
            .ok_or_else(|| Error::Format(format!("bad value in {trimmed:?}")))?;
        bandwidth = bandwidth.max(i - j);
        entries.push((i, j, v));
    }
    if entries.len() != nnz {
        return Err(Error::Format(format!(
            "declared {nnz} entries, found {}",
            entries.len()
        )));
    }

    let mut storage = BandStorage::new(rows, bandwidth, T::zero());
    for (i, j, v) in entries {
        storage.set(i, j, v);
    }
    Ok(BandedSymmetricMatrix::from_storage(storage))
}

/// Read a symmetric band matrix from `path`.
pub fn import_matrix_market<T: Scalar>(path: &Path) -> Result<BandedSymmetricMatrix<T>> {
    read_symmetric(BufReader::new(File::open(path)?))
}

/// Write a factor (lower triangular) in general coordinate format.
pub fn write_factor<T: Scalar, W: Write>(l: &CholeskyFactor<T>, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    let nnz = lower_positions(l.n(), l.bandwidth())
        .filter(|&(i, j, _)| l.value(i, j) != T::zero())
        .count();
    writeln!(w, "{BANNER_GENERAL}")?;
    writeln!(w, "{} {} {}", l.n(), l.n(), nnz)?;
    for (i, j, v) in l.nonzeros() {
        writeln!(w, "{} {} {:e}", i + 1, j + 1, v)?;
    }
    w.flush()?;
    Ok(())
}

/// Write a factor to `path`.
pub fn export_factor<T: Scalar>(l: &CholeskyFactor<T>, path: &Path) -> Result<()> {
    write_factor(l, File::create(path)?)
}

/// Write a right-hand side as a dense array column.
pub fn write_vector<T: Scalar, W: Write>(rhs: &RightHandSide<T>, w: W) -> Result<()> {
    let mut w = BufWriter::new(w);
    writeln!(w, "{BANNER_ARRAY}")?;
    writeln!(w, "{} 1", rhs.len())?;
    for v in rhs.values() {
        writeln!(w, "{v:e}")?;
    }
    w.flush()?;
    Ok(())
}

/// Write a right-hand side to `path`.
pub fn export_vector<T: Scalar>(rhs: &RightHandSide<T>, path: &Path) -> Result<()> {
    write_vector(rhs, File::create(path)?)
}

fn parse_field<T: std::str::FromStr>(s: &str, what: &str) -> Result<T> {
    s.parse()
        .map_err(|_| Error::Format(format!("bad {what}: {s:?}")))
}
