//! MatrixMarket reader and writer.
//!
//! Reads `coordinate` and `array` files with `real`, `integer`, `complex`
//! or `pattern` fields; `symmetric`, `skew-symmetric` and `hermitian`
//! storage is expanded to general on read. Writes `coordinate ... general`
//! for matrices and `array ... general` for vectors.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use nalgebra::DVector;

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Layout {
    Coordinate,
    Array,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Real,
    Integer,
    Complex,
    Pattern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Symmetry {
    General,
    Symmetric,
    SkewSymmetric,
    Hermitian,
}

struct Header {
    layout: Layout,
    field: Field,
    symmetry: Symmetry,
}

fn parse_err(path: &Path, line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        path: path.to_path_buf(),
        line,
        msg: msg.into(),
    }
}

fn parse_header(path: &Path, line: &str) -> Result<Header> {
    let toks: Vec<String> = line.split_whitespace().map(|s| s.to_ascii_lowercase()).collect();
    if toks.len() != 5 || toks[0] != "%%matrixmarket" || toks[1] != "matrix" {
        return Err(parse_err(path, 1, "expected '%%MatrixMarket matrix <layout> <field> <symmetry>'"));
    }
    let layout = match toks[2].as_str() {
        "coordinate" => Layout::Coordinate,
        "array" => Layout::Array,
        other => return Err(parse_err(path, 1, format!("unsupported layout '{other}'"))),
    };
    let field = match toks[3].as_str() {
        "real" | "double" => Field::Real,
        "integer" => Field::Integer,
        "complex" => Field::Complex,
        "pattern" => Field::Pattern,
        other => return Err(parse_err(path, 1, format!("unsupported field '{other}'"))),
    };
    let symmetry = match toks[4].as_str() {
        "general" => Symmetry::General,
        "symmetric" => Symmetry::Symmetric,
        "skew-symmetric" => Symmetry::SkewSymmetric,
        "hermitian" => Symmetry::Hermitian,
        other => return Err(parse_err(path, 1, format!("unsupported symmetry '{other}'"))),
    };
    if layout == Layout::Array && field == Field::Pattern {
        return Err(parse_err(path, 1, "pattern field is only valid for coordinate layout"));
    }
    Ok(Header {
        layout,
        field,
        symmetry,
    })
}

/// Returns the declared field of a MatrixMarket file.
pub fn peek_field(path: impl AsRef<Path>) -> Result<Field> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let first = text.lines().next().unwrap_or("");
    Ok(parse_header(path, first)?.field)
}

fn parse_num(path: &Path, line: usize, tok: Option<&str>) -> Result<f64> {
    let tok = tok.ok_or_else(|| parse_err(path, line, "missing value"))?;
    let v: f64 = tok
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid number '{tok}'")))?;
    if !v.is_finite() {
        return Err(parse_err(path, line, format!("non-finite value '{tok}'")));
    }
    Ok(v)
}

fn parse_index(path: &Path, line: usize, tok: Option<&str>, bound: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| parse_err(path, line, "missing index"))?;
    let v: usize = tok
        .parse()
        .map_err(|_| parse_err(path, line, format!("invalid index '{tok}'")))?;
    if v == 0 || v > bound {
        return Err(parse_err(path, line, format!("index {v} outside 1..={bound}")));
    }
    Ok(v - 1)
}

fn parse_value<T: Scalar>(path: &Path, line: usize, field: Field, toks: &mut std::str::SplitWhitespace) -> Result<T> {
    let (re, im) = match field {
        Field::Pattern => (1.0, 0.0),
        Field::Real | Field::Integer => (parse_num(path, line, toks.next())?, 0.0),
        Field::Complex => (
            parse_num(path, line, toks.next())?,
            parse_num(path, line, toks.next())?,
        ),
    };
    T::from_parts(re, im).ok_or_else(|| {
        parse_err(path, line, "complex entry cannot be stored in a real matrix")
    })
}

/// Reads a MatrixMarket file into CSR.
pub fn read_matrix<T: Scalar>(path: impl AsRef<Path>) -> Result<SparseMatrix<T>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = match lines.next() {
        Some((_, l)) => parse_header(path, l)?,
        None => return Err(parse_err(path, 1, "empty file")),
    };
    let mut body = lines.filter(|(_, l)| {
        let t = l.trim();
        !t.is_empty() && !t.starts_with('%')
    });
    let (size_line, size) = body
        .next()
        .ok_or_else(|| parse_err(path, 1, "missing size line"))?;
    let mut toks = size.split_whitespace();
    let parse_dim = |t: Option<&str>| -> Result<usize> {
        t.and_then(|s| s.parse().ok())
            .ok_or_else(|| parse_err(path, size_line, "invalid size line"))
    };
    let n_rows = parse_dim(toks.next())?;
    let n_cols = parse_dim(toks.next())?;
    if header.symmetry != Symmetry::General && n_rows != n_cols {
        return Err(parse_err(path, size_line, "symmetric storage requires a square matrix"));
    }

    let mut triplets: Vec<(usize, usize, T)> = Vec::new();
    match header.layout {
        Layout::Coordinate => {
            let nnz = parse_dim(toks.next())?;
            for _ in 0..nnz {
                let (ln, l) = body
                    .next()
                    .ok_or_else(|| parse_err(path, size_line, format!("expected {nnz} entries")))?;
                let mut t = l.split_whitespace();
                let i = parse_index(path, ln, t.next(), n_rows)?;
                let j = parse_index(path, ln, t.next(), n_cols)?;
                let v: T = parse_value(path, ln, header.field, &mut t)?;
                push_expanded(&mut triplets, header.symmetry, i, j, v);
            }
        }
        Layout::Array => {
            // column-major; symmetric variants store the lower triangle only
            for j in 0..n_cols {
                let start = match header.symmetry {
                    Symmetry::General => 0,
                    Symmetry::Symmetric | Symmetry::Hermitian => j,
                    Symmetry::SkewSymmetric => j + 1,
                };
                for i in start..n_rows {
                    let (ln, l) = body
                        .next()
                        .ok_or_else(|| parse_err(path, size_line, "array file ended early"))?;
                    let mut t = l.split_whitespace();
                    let v: T = parse_value(path, ln, header.field, &mut t)?;
                    if v != T::zero() {
                        push_expanded(&mut triplets, header.symmetry, i, j, v);
                    }
                }
            }
        }
    }
    if let Some((ln, _)) = body.next() {
        return Err(parse_err(path, ln, "unexpected trailing data"));
    }
    SparseMatrix::from_triplets(n_rows, n_cols, &triplets)
}

fn push_expanded<T: Scalar>(out: &mut Vec<(usize, usize, T)>, sym: Symmetry, i: usize, j: usize, v: T) {
    out.push((i, j, v));
    if i != j {
        match sym {
            Symmetry::General => {}
            Symmetry::Symmetric => out.push((j, i, v)),
            Symmetry::SkewSymmetric => out.push((j, i, -v)),
            Symmetry::Hermitian => out.push((j, i, v.conjugate())),
        }
    }
}

/// Reads a vector stored as an `n x 1` (or `1 x n`) MatrixMarket matrix.
pub fn read_vector<T: Scalar>(path: impl AsRef<Path>) -> Result<DVector<T>> {
    let path = path.as_ref();
    let m: SparseMatrix<T> = read_matrix(path)?;
    let len = if m.n_cols() == 1 {
        m.n_rows()
    } else if m.n_rows() == 1 {
        m.n_cols()
    } else {
        return Err(Error::dims(format!(
            "{}: expected a vector, found a {}x{} matrix",
            path.display(),
            m.n_rows(),
            m.n_cols()
        )));
    };
    let mut v = DVector::zeros(len);
    for (i, j, x) in m.triplets() {
        v[i.max(j)] = x;
    }
    Ok(v)
}

fn field_name<T: Scalar>() -> &'static str {
    if T::IS_COMPLEX {
        "complex"
    } else {
        "real"
    }
}

fn push_value<T: Scalar>(out: &mut String, v: T) {
    let c = v.to_complex();
    if T::IS_COMPLEX {
        let _ = write!(out, "{:.16e} {:.16e}", c.re, c.im);
    } else {
        let _ = write!(out, "{:.16e}", c.re);
    }
}

pub fn matrix_to_string<T: Scalar>(a: &SparseMatrix<T>) -> String {
    let mut out = format!(
        "%%MatrixMarket matrix coordinate {} general\n{} {} {}\n",
        field_name::<T>(),
        a.n_rows(),
        a.n_cols(),
        a.nnz()
    );
    for (i, j, v) in a.triplets() {
        let _ = write!(out, "{} {} ", i + 1, j + 1);
        push_value(&mut out, v);
        out.push('\n');
    }
    out
}

pub fn vector_to_string<T: Scalar>(v: &DVector<T>) -> String {
    let mut out = format!(
        "%%MatrixMarket matrix array {} general\n{} 1\n",
        field_name::<T>(),
        v.len()
    );
    for &x in v.iter() {
        push_value(&mut out, x);
        out.push('\n');
    }
    out
}

pub fn write_matrix<T: Scalar>(path: impl AsRef<Path>, a: &SparseMatrix<T>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, matrix_to_string(a)).map_err(|e| Error::io(path, e))
}

pub fn write_vector<T: Scalar>(path: impl AsRef<Path>, v: &DVector<T>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, vector_to_string(v)).map_err(|e| Error::io(path, e))
}
