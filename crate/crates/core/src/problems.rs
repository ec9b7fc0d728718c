//! Test problem generators and file-based problem ingestion.
//!
//! Generated problems are real; use [`MatrixPolynomial::to_complex`] for a
//! complex parameter sweep.

use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{mmio, SparseMatrix};
use crate::scalar::Scalar;
use crate::toeplitz::MatrixPolynomial;

/// Name of the manifest file written by [`write_problem`].
pub const MANIFEST_FILE: &str = "manifest.json";

/// A generated or user-supplied problem on disk.
///
/// `paths` lists the coefficient files `A_0 … A_N` followed by the initial
/// vector; relative paths are resolved against the manifest's directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub name: String,
    pub n: usize,
    #[serde(default)]
    pub parameters: BTreeMap<String, f64>,
    #[serde(default)]
    pub paths: Vec<PathBuf>,
}

fn need_size(n: usize, min: usize, what: &str) -> Result<()> {
    if n < min {
        return Err(Error::InvalidArgument(format!("{what} must be at least {min}, got {n}")));
    }
    Ok(())
}

fn tridiagonal(n: usize, lower: f64, diag: f64, upper: f64) -> SparseMatrix<f64> {
    let mut t = Vec::with_capacity(3 * n);
    for i in 0..n {
        if i > 0 && lower != 0.0 {
            t.push((i, i - 1, lower));
        }
        if diag != 0.0 {
            t.push((i, i, diag));
        }
        if i + 1 < n && upper != 0.0 {
            t.push((i, i + 1, upper));
        }
    }
    SparseMatrix::from_triplets(n, n, &t).expect("indices in range")
}

/// `a y_xx + ε y_x` on `[0, 1]`, Dirichlet, central differences on `n`
/// interior points; `y_0(x) = 16((1-x)x)²`.
pub fn gen_advdiff1(n: usize, a: f64) -> Result<(MatrixPolynomial<f64>, DVector<f64>)> {
    need_size(n, 2, "n")?;
    let dx = 1.0 / (n as f64 + 1.0);
    let d = a / (dx * dx);
    let c = 1.0 / (2.0 * dx);
    let a0 = tridiagonal(n, d, -2.0 * d, d);
    let a1 = tridiagonal(n, c, 0.0, -c);
    let u0 = DVector::from_fn(n, |i, _| {
        let x = (i + 1) as f64 * dx;
        16.0 * ((1.0 - x) * x).powi(2)
    });
    Ok((MatrixPolynomial::new(vec![a0, a1])?, u0))
}

/// [`gen_advdiff1`] plus the feedback term `ε² b y(t, 1-x)`: `A_2 = b J`
/// with `J` the exchange (anti-identity) matrix.
pub fn gen_advdiff2(n: usize, a: f64, b: f64) -> Result<(MatrixPolynomial<f64>, DVector<f64>)> {
    let (p, u0) = gen_advdiff1(n, a)?;
    let t: Vec<_> = (0..n).map(|i| (i, n - 1 - i, b)).collect();
    let a2 = SparseMatrix::from_triplets(n, n, &t)?;
    let mut coeffs = p.coeffs().to_vec();
    coeffs.push(a2);
    Ok((MatrixPolynomial::new(coeffs)?, u0))
}

/// Damped wave equation on the unit cube with `m` interior points per
/// dimension, in first-order form with state `(u, u')` of size `2m³`:
///
/// ```text
/// A_0 = [ 0    I     ]    A_1 = [ 0  0   ]
///       [ -K  -γ₁C₁  ]          [ 0  -C₂ ]
/// ```
///
/// `K` is the 7-point Laplacian stencil (6 on the diagonal, -1 per
/// neighbour, Dirichlet), the mass matrix is the identity, `C₁` damps the
/// nodes on the face `x = 0` and `C₂` those on the face `x = 1`. The
/// parameter `ε` plays the role of `γ₂`. Nodes are ordered x-fastest; the
/// initial displacement is `sin πx sin πy sin πz` with zero velocity.
pub fn gen_wave(m: usize, gamma1: f64) -> Result<(MatrixPolynomial<f64>, DVector<f64>)> {
    need_size(m, 3, "points per dimension")?;
    let nodes = m * m * m;
    let idx = |x: usize, y: usize, z: usize| x + m * (y + m * z);
    let mut a0 = Vec::with_capacity(9 * nodes);
    let mut a1 = Vec::with_capacity(m * m);
    for z in 0..m {
        for y in 0..m {
            for x in 0..m {
                let i = idx(x, y, z);
                let row = nodes + i;
                a0.push((i, nodes + i, 1.0));
                a0.push((row, i, -6.0));
                let mut nb = |j: usize| a0.push((row, j, 1.0));
                if x > 0 {
                    nb(idx(x - 1, y, z));
                }
                if x + 1 < m {
                    nb(idx(x + 1, y, z));
                }
                if y > 0 {
                    nb(idx(x, y - 1, z));
                }
                if y + 1 < m {
                    nb(idx(x, y + 1, z));
                }
                if z > 0 {
                    nb(idx(x, y, z - 1));
                }
                if z + 1 < m {
                    nb(idx(x, y, z + 1));
                }
                if x == 0 && gamma1 != 0.0 {
                    a0.push((row, row, -gamma1));
                }
                if x + 1 == m {
                    a1.push((row, row, -1.0));
                }
            }
        }
    }
    let dim = 2 * nodes;
    let a0 = SparseMatrix::from_triplets(dim, dim, &a0)?;
    let a1 = SparseMatrix::from_triplets(dim, dim, &a1)?;
    let h = 1.0 / (m as f64 + 1.0);
    let s = |i: usize| (PI * (i + 1) as f64 * h).sin();
    let mut u0 = DVector::zeros(dim);
    for z in 0..m {
        for y in 0..m {
            for x in 0..m {
                u0[idx(x, y, z)] = s(x) * s(y) * s(z);
            }
        }
    }
    Ok((MatrixPolynomial::new(vec![a0, a1])?, u0))
}

/// Loads coefficient files `A_0 … A_N` and the initial vector.
pub fn load_problem_files<T: Scalar>(
    coeffs: &[PathBuf],
    u0: &Path,
) -> Result<(MatrixPolynomial<T>, DVector<T>)> {
    if coeffs.is_empty() {
        return Err(Error::InvalidArgument("no coefficient files given".into()));
    }
    let mut mats = Vec::with_capacity(coeffs.len());
    for path in coeffs {
        let a: SparseMatrix<T> = mmio::read_matrix(path)?;
        let (r, c) = (a.n_rows(), a.n_cols());
        let n = mats.first().map_or(r, |m: &SparseMatrix<T>| m.n_rows());
        if r != c || r != n {
            return Err(Error::dims(format!(
                "{}: expected a {n}x{n} matrix, found {r}x{c}",
                path.display()
            )));
        }
        mats.push(a);
    }
    let v: DVector<T> = mmio::read_vector(u0)?;
    let n = mats[0].n_rows();
    if v.len() != n {
        return Err(Error::dims(format!(
            "{}: initial vector has length {}, expected {n}",
            u0.display(),
            v.len()
        )));
    }
    Ok((MatrixPolynomial::new(mats)?, v))
}

/// Parses a manifest and resolves its paths against the manifest's
/// directory.
pub fn read_manifest(manifest: &Path) -> Result<Manifest> {
    let text = fs::read_to_string(manifest).map_err(|e| Error::io(manifest, e))?;
    let mut m: Manifest = serde_json::from_str(&text).map_err(|e| Error::Manifest {
        path: manifest.to_path_buf(),
        msg: e.to_string(),
    })?;
    if m.paths.len() < 2 {
        return Err(Error::Manifest {
            path: manifest.to_path_buf(),
            msg: "paths must list at least one coefficient file and the initial vector".into(),
        });
    }
    let base = manifest.parent().unwrap_or(Path::new("."));
    m.paths = m.paths.iter().map(|p| base.join(p)).collect();
    Ok(m)
}

/// Reads a manifest and the files it lists. The returned manifest holds
/// the resolved paths.
pub fn load_problem<T: Scalar>(manifest: &Path) -> Result<(Manifest, MatrixPolynomial<T>, DVector<T>)> {
    let m = read_manifest(manifest)?;
    let resolved = &m.paths;
    let (coeffs, u0) = resolved.split_at(resolved.len() - 1);
    let (poly, v) = load_problem_files(coeffs, &u0[0])?;
    if poly.dim() != m.n {
        return Err(Error::Manifest {
            path: manifest.to_path_buf(),
            msg: format!("declares n = {} but the matrices are {d}x{d}", m.n, d = poly.dim()),
        });
    }
    Ok((m, poly, v))
}

/// Writes `A0.mtx … AN.mtx`, `u0.mtx` and the manifest into `dir`
/// (created if missing). Returns the manifest path.
pub fn write_problem<T: Scalar>(
    dir: &Path,
    name: &str,
    parameters: BTreeMap<String, f64>,
    poly: &MatrixPolynomial<T>,
    u0: &DVector<T>,
) -> Result<PathBuf> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for (l, a) in poly.coeffs().iter().enumerate() {
        let file = PathBuf::from(format!("A{l}.mtx"));
        mmio::write_matrix(dir.join(&file), a)?;
        paths.push(file);
    }
    let file = PathBuf::from("u0.mtx");
    mmio::write_vector(dir.join(&file), u0)?;
    paths.push(file);
    let manifest = Manifest {
        name: name.to_string(),
        n: poly.dim(),
        parameters,
        paths,
    };
    let path = dir.join(MANIFEST_FILE);
    let json = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    fs::write(&path, json + "\n").map_err(|e| Error::io(&path, e))?;
    Ok(path)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::two_norm_estimate;
    use num_complex::Complex64;

    #[test]
    fn advdiff1_five_point_stencil() {
        let (p, u0) = gen_advdiff1(5, 1.0).unwrap();
        // dx = 1/6
        let a0 = p.coeff(0).to_dense();
        let a1 = p.coeff(1).to_dense();
        assert_eq!(a0[(0, 0)], -72.0);
        assert_eq!(a0[(2, 1)], 36.0);
        assert_eq!(a0[(2, 3)], 36.0);
        assert_eq!(a0[(0, 2)], 0.0);
        assert_eq!(a1[(2, 1)], 3.0);
        assert_eq!(a1[(2, 3)], -3.0);
        assert_eq!(a1[(2, 2)], 0.0);
        assert_eq!(a0, a0.transpose());
        assert_eq!(a1, -a1.transpose());
        for i in 1..4 {
            assert_eq!(a0.row(i).sum(), 0.0);
            assert_eq!(a1.row(i).sum(), 0.0);
        }
        let x: f64 = 3.0 / 6.0;
        assert!((u0[2] - 16.0 * ((1.0 - x) * x).powi(2)).abs() < 1e-15);
    }

    #[test]
    fn advdiff2_feedback_is_scaled_exchange() {
        let (p, _) = gen_advdiff2(5, 1.0, 3.0).unwrap();
        assert_eq!(p.degree(), 2);
        let a2 = p.coeff(2).to_dense();
        assert_eq!(a2[(0, 4)], 3.0);
        assert_eq!(a2[(4, 0)], 3.0);
        assert_eq!(a2[(2, 2)], 3.0);
        assert_eq!(p.coeff(2).nnz(), 5);
        assert_eq!(&a2 * &a2, nalgebra::DMatrix::identity(5, 5) * 9.0);
        assert!((two_norm_estimate(p.coeff(2), 1e-10).unwrap() - 3.0).abs() < 1e-8);
    }

    #[test]
    fn wave_structure() {
        let m = 3;
        let (p, u0) = gen_wave(m, 2.0).unwrap();
        let nodes = 27;
        assert_eq!(p.dim(), 2 * nodes);
        let a0 = p.coeff(0).to_dense();
        let a1 = p.coeff(1).to_dense();
        for i in 0..nodes {
            for j in 0..nodes {
                assert_eq!(a0[(i, nodes + j)], if i == j { 1.0 } else { 0.0 });
                assert_eq!(a0[(i, j)], 0.0);
            }
        }
        // centre node (1,1,1) = 13 has six neighbours
        let row = nodes + 13;
        assert_eq!(a0[(row, 13)], -6.0);
        assert_eq!((0..nodes).filter(|&j| a0[(row, j)] == 1.0).count(), 6);
        // node 0 sits on x = 0: damped by γ₁; node 2 on x = 1: damped by C₂
        assert_eq!(a0[(nodes, nodes)], -2.0);
        assert_eq!(a1[(nodes + 2, nodes + 2)], -1.0);
        assert_eq!(p.coeff(1).nnz(), m * m);
        assert!(u0.rows(nodes, nodes).iter().all(|&v| v == 0.0));
        assert!((u0[13] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn generators_reject_tiny_sizes() {
        assert!(gen_advdiff1(1, 1.0).is_err());
        assert!(gen_advdiff2(1, 1.0, 1.0).is_err());
        assert!(gen_wave(2, 1.0).is_err());
    }

    #[test]
    fn round_trip_through_files() {
        let dir = tempfile::tempdir().unwrap();
        let (p, u0) = gen_advdiff2(10, 1.0, 2.0).unwrap();
        let params = BTreeMap::from([("a".to_string(), 1.0), ("b".to_string(), 2.0)]);
        let path = write_problem(dir.path(), "advdiff2", params.clone(), &p, &u0).unwrap();
        let (m, q, v) = load_problem::<f64>(&path).unwrap();
        assert_eq!(m.name, "advdiff2");
        assert_eq!(m.parameters, params);
        assert_eq!(m.paths.len(), 4);
        assert_eq!(q.coeffs(), p.coeffs());
        assert_eq!(v, u0);
        // real files load as complex too
        let (_, qc, _) = load_problem::<Complex64>(&path).unwrap();
        assert_eq!(qc.coeff(1).get(0, 1), Complex64::new(p.coeff(1).get(0, 1), 0.0));
    }

    #[test]
    fn complex_files_are_accepted() {
        let dir = tempfile::tempdir().unwrap();
        let a = SparseMatrix::from_triplets(2, 2, &[(0, 1, Complex64::new(1.0, -2.0))]).unwrap();
        let p = MatrixPolynomial::new(vec![a.clone(), a]).unwrap();
        let u0 = DVector::from_vec(vec![Complex64::new(0.0, 1.0), Complex64::new(1.0, 0.0)]);
        let path = write_problem(dir.path(), "file", BTreeMap::new(), &p, &u0).unwrap();
        let (_, q, v) = load_problem::<Complex64>(&path).unwrap();
        assert_eq!(q.coeff(0).get(0, 1), Complex64::new(1.0, -2.0));
        assert_eq!(v, u0);
    }

    #[test]
    fn errors_name_the_file() {
        let dir = tempfile::tempdir().unwrap();
        let missing = dir.path().join("nope.mtx");
        let err = load_problem_files::<f64>(std::slice::from_ref(&missing), &missing).unwrap_err();
        assert!(err.to_string().contains("nope.mtx"));

        let (p, u0) = gen_advdiff1(4, 1.0).unwrap();
        let (q, _) = gen_advdiff1(5, 1.0).unwrap();
        mmio::write_matrix(dir.path().join("a.mtx"), p.coeff(0)).unwrap();
        mmio::write_matrix(dir.path().join("b.mtx"), q.coeff(0)).unwrap();
        mmio::write_vector(dir.path().join("u.mtx"), &u0).unwrap();
        let err = load_problem_files::<f64>(
            &[dir.path().join("a.mtx"), dir.path().join("b.mtx")],
            &dir.path().join("u.mtx"),
        )
        .unwrap_err();
        assert!(matches!(err, Error::DimensionMismatch(_)));
        assert!(err.to_string().contains("b.mtx"));
    }

    #[test]
    fn malformed_manifest() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join(MANIFEST_FILE);
        fs::write(&path, "{\"name\": 3}").unwrap();
        assert!(matches!(load_problem::<f64>(&path), Err(Error::Manifest { .. })));
    }
}
