//! MatrixMarket file I/O: coordinate files for matrices, array files for
//! right-hand sides and solutions.
//!
//! Reads `real` data in `general` or `symmetric` storage (the symmetric
//! half is expanded to the full pattern); writes always use `general`.
//! Indices are 1-based on disk. Values are written in Rust's shortest
//! round-trip form, so a write/read cycle reproduces them exactly.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use amgrid::{CsrMatrix, Scalar, Triplet};

#[derive(Debug, thiserror::Error)]
pub enum MtxError {
    #[error("{path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {detail}")]
    Malformed {
        path: String,
        line: usize,
        detail: String,
    },

    #[error("{path}: unsupported MatrixMarket flavor: {detail}")]
    Unsupported { path: String, detail: String },

    #[error(transparent)]
    Assembly(#[from] amgrid::Error),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
}

struct Header {
    layout: Layout,
    symmetry: Symmetry,
}

fn io_err(path: &Path, source: std::io::Error) -> MtxError {
    MtxError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn malformed(path: &Path, line: usize, detail: impl Into<String>) -> MtxError {
    MtxError::Malformed {
        path: path.display().to_string(),
        line,
        detail: detail.into(),
    }
}

fn unsupported(path: &Path, detail: impl Into<String>) -> MtxError {
    MtxError::Unsupported {
        path: path.display().to_string(),
        detail: detail.into(),
    }
}

fn parse_header(path: &Path, first: &str) -> Result<Header, MtxError> {
    let mut tokens = first.split_whitespace();
    if tokens.next() != Some("%%MatrixMarket") {
        return Err(malformed(path, 1, "missing %%MatrixMarket header"));
    }
    if tokens.next() != Some("matrix") {
        return Err(malformed(path, 1, "expected object `matrix`"));
    }
    let layout = match tokens.next() {
        Some("coordinate") => Layout::Coordinate,
        Some("array") => Layout::Array,
        other => {
            return Err(malformed(
                path,
                1,
                format!("expected `coordinate` or `array`, found {other:?}"),
            ))
        }
    };
    match tokens.next() {
        Some("real") => {}
        Some(field @ ("complex" | "pattern" | "integer")) => {
            return Err(unsupported(path, format!("field `{field}` (only `real`)")))
        }
        other => return Err(malformed(path, 1, format!("bad field token {other:?}"))),
    }
    let symmetry = match tokens.next() {
        Some("general") => Symmetry::General,
        Some("symmetric") => Symmetry::Symmetric,
        Some(sym @ ("skew-symmetric" | "hermitian")) => {
            return Err(unsupported(
                path,
                format!("symmetry `{sym}` (only `general` or `symmetric`)"),
            ))
        }
        other => return Err(malformed(path, 1, format!("bad symmetry token {other:?}"))),
    };
    Ok(Header { layout, symmetry })
}

/// Lines of a file with their 1-based numbers, comments and blanks skipped.
/// The header line is returned separately.
fn open_lines(path: &Path) -> Result<(Header, Vec<(usize, String)>), MtxError> {
    let file = File::open(path).map_err(|e| io_err(path, e))?;
    let reader = BufReader::new(file);
    let mut header = None;
    let mut data = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let line = line.map_err(|e| io_err(path, e))?;
        let lineno = idx + 1;
        if header.is_none() {
            header = Some(parse_header(path, &line)?);
            continue;
        }
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('%') {
            continue;
        }
        data.push((lineno, trimmed.to_string()));
    }
    let header = header.ok_or_else(|| malformed(path, 1, "empty file"))?;
    Ok((header, data))
}

fn parse_number<S: Scalar>(path: &Path, line: usize, token: &str) -> Result<S, MtxError> {
    let v: f64 = token
        .parse()
        .map_err(|_| malformed(path, line, format!("bad numeric value {token:?}")))?;
    Ok(S::from_f64_lossy(v))
}

fn parse_index(path: &Path, line: usize, token: &str, bound: usize) -> Result<usize, MtxError> {
    let v: usize = token
        .parse()
        .map_err(|_| malformed(path, line, format!("bad index {token:?}")))?;
    if v == 0 || v > bound {
        return Err(malformed(
            path,
            line,
            format!("index {v} outside 1..={bound}"),
        ));
    }
    Ok(v - 1)
}

/// Reads a sparse matrix from a MatrixMarket coordinate file.
pub fn read_matrix_market<S: Scalar>(path: impl AsRef<Path>) -> Result<CsrMatrix<S>, MtxError> {
    let path = path.as_ref();
    let (header, data) = open_lines(path)?;
    if header.layout != Layout::Coordinate {
        return Err(unsupported(path, "array layout (matrices use coordinate)"));
    }
    let (size_line, rest) = data
        .split_first()
        .ok_or_else(|| malformed(path, 1, "missing size line"))?;
    let (lineno, text) = size_line;
    let dims: Vec<&str> = text.split_whitespace().collect();
    if dims.len() != 3 {
        return Err(malformed(path, *lineno, "size line must be `rows cols nnz`"));
    }
    let nrows: usize = dims[0]
        .parse()
        .map_err(|_| malformed(path, *lineno, "bad row count"))?;
    let ncols: usize = dims[1]
        .parse()
        .map_err(|_| malformed(path, *lineno, "bad column count"))?;
    let nnz: usize = dims[2]
        .parse()
        .map_err(|_| malformed(path, *lineno, "bad entry count"))?;
    if rest.len() != nnz {
        return Err(malformed(
            path,
            rest.last().map(|(l, _)| *l).unwrap_or(*lineno),
            format!("expected {nnz} entries, found {}", rest.len()),
        ));
    }

    let mut triplets: Vec<Triplet<S>> = Vec::with_capacity(match header.symmetry {
        Symmetry::General => nnz,
        Symmetry::Symmetric => 2 * nnz,
    });
    for (lineno, text) in rest {
        let mut tok = text.split_whitespace();
        let (i, j, v) = match (tok.next(), tok.next(), tok.next(), tok.next()) {
            (Some(i), Some(j), Some(v), None) => (i, j, v),
            _ => return Err(malformed(path, *lineno, "entry must be `i j value`")),
        };
        let row = parse_index(path, *lineno, i, nrows)?;
        let col = parse_index(path, *lineno, j, ncols)?;
        let value: S = parse_number(path, *lineno, v)?;
        triplets.push(Triplet::new(row, col, value));
        if header.symmetry == Symmetry::Symmetric && row != col {
            triplets.push(Triplet::new(col, row, value));
        }
    }
    Ok(CsrMatrix::from_triplets(&triplets, nrows, ncols)?)
}

/// Reads a vector from a MatrixMarket array file (one column).
pub fn read_rhs<S: Scalar>(path: impl AsRef<Path>) -> Result<Vec<S>, MtxError> {
    let path = path.as_ref();
    let (header, data) = open_lines(path)?;
    if header.layout != Layout::Array {
        return Err(unsupported(path, "coordinate layout (vectors use array)"));
    }
    let (size_line, rest) = data
        .split_first()
        .ok_or_else(|| malformed(path, 1, "missing size line"))?;
    let (lineno, text) = size_line;
    let dims: Vec<&str> = text.split_whitespace().collect();
    if dims.len() != 2 {
        return Err(malformed(path, *lineno, "size line must be `rows cols`"));
    }
    let nrows: usize = dims[0]
        .parse()
        .map_err(|_| malformed(path, *lineno, "bad row count"))?;
    let ncols: usize = dims[1]
        .parse()
        .map_err(|_| malformed(path, *lineno, "bad column count"))?;
    if ncols != 1 {
        return Err(unsupported(
            path,
            format!("{ncols}-column array (right-hand sides have one column)"),
        ));
    }
    let mut values = Vec::with_capacity(nrows);
    for (lineno, text) in rest {
        for token in text.split_whitespace() {
            values.push(parse_number(path, *lineno, token)?);
        }
    }
    if values.len() != nrows {
        return Err(malformed(
            path,
            rest.last().map(|(l, _)| *l).unwrap_or(*lineno),
            format!("expected {nrows} values, found {}", values.len()),
        ));
    }
    Ok(values)
}

/// Writes a sparse matrix as a MatrixMarket coordinate file.
pub fn write_matrix_market<S: Scalar>(
    a: &CsrMatrix<S>,
    path: impl AsRef<Path>,
) -> Result<(), MtxError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix coordinate real general")?;
        writeln!(w, "{} {} {}", a.nrows(), a.ncols(), a.nnz())?;
        for i in 0..a.nrows() {
            let (cols, vals) = a.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                writeln!(w, "{} {} {:?}", i + 1, j + 1, v)?;
            }
        }
        w.flush()
    };
    run().map_err(|e| io_err(path, e))
}

/// Writes a vector as a one-column MatrixMarket array file.
pub fn write_rhs<S: Scalar>(v: &[S], path: impl AsRef<Path>) -> Result<(), MtxError> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| io_err(path, e))?;
    let mut w = BufWriter::new(file);
    let mut run = || -> std::io::Result<()> {
        writeln!(w, "%%MatrixMarket matrix array real general")?;
        writeln!(w, "{} 1", v.len())?;
        for x in v {
            writeln!(w, "{x:?}")?;
        }
        w.flush()
    };
    run().map_err(|e| io_err(path, e))
}
