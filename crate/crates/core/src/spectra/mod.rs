//! Discrete inf-sup constants from the saddle-point blocks.
//!
//! `beta^2` is the smallest eigenvalue of `S q = lambda Mp q` with the
//! pressure Schur complement `S = B A^{-1} B^T`, taken over pressures that are
//! `Mp`-orthogonal to the constant. `A` is factored once; with
//! `A = P^T L D L^T P` the Schur complement is formed as `Y^T D^{-1} Y`,
//! `Y = L^{-1} P B^T`, which is symmetric positive semidefinite by
//! construction.

mod ldlt;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rayon::prelude::*;
use serde::Serialize;

pub use ldlt::{reverse_cuthill_mckee, Ldlt};

use crate::assemble::{CsrMatrix, Saddle, SymMatrix};

pub const DEFAULT_K: usize = 5;

/// Admissible eigen-residual `|S q - lambda Mp q| / (|S| |q|)`.
pub const RESIDUAL_TOL: f64 = 1e-8;

/// Eigenvalues below `-NEGATIVE_TOL * |S|` indicate an assembly error.
pub const NEGATIVE_TOL: f64 = 1e-10;

#[derive(Debug, thiserror::Error)]
pub enum SpectraError {
    #[error("velocity stiffness is numerically singular (pivot {pivot:e} at unknown {row})")]
    FactorizationFailure { row: usize, pivot: f64 },
    #[error("pressure mass matrix is not positive definite")]
    MassNotDefinite,
    #[error("negative generalized eigenvalue {0:e}")]
    NegativeEigenvalue(f64),
    #[error("empty velocity or pressure subspace")]
    EmptySubspace,
    #[error("decay fit needs at least three positive samples")]
    NonPositiveInput,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct InfSupResult {
    pub beta: f64,
    /// Smallest generalized eigenvalues after deflation, ascending.
    pub eigenvalues: Vec<f64>,
    pub n_v: usize,
    pub n_p: usize,
    /// Relative eigen-residual of the smallest eigenpair.
    pub residual: f64,
    /// Largest over smallest pivot of the stiffness factorization.
    pub cond_estimate: f64,
}

/// Dense `B A^{-1} B^T` together with the factorization's condition estimate.
pub fn schur_complement(a: &SymMatrix, b: &CsrMatrix) -> Result<(DMatrix<f64>, f64), SpectraError> {
    if b.ncols() != a.dim() {
        return Err(SpectraError::DimensionMismatch(format!(
            "B has {} columns, A has dimension {}",
            b.ncols(),
            a.dim()
        )));
    }
    let np = b.nrows();
    if a.dim() == 0 {
        return Ok((DMatrix::zeros(np, np), 1.0));
    }
    let f = Ldlt::factor(a)?;
    let n = a.dim();
    let columns: Vec<Vec<f64>> = (0..np)
        .into_par_iter()
        .map(|i| {
            let mut row = vec![0.0; n];
            let (cols, vals) = b.row(i);
            for (&j, &v) in cols.iter().zip(vals) {
                row[j] = v;
            }
            f.forward(&row)
        })
        .collect();
    let d = f.pivots();
    let mut s = DMatrix::zeros(np, np);
    for i in 0..np {
        for j in 0..=i {
            let v: f64 = columns[i]
                .iter()
                .zip(&columns[j])
                .zip(d)
                .map(|((x, y), d)| x * y / d)
                .sum();
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok((s, f.cond_estimate()))
}

/// Orthonormal basis (columns) of the orthogonal complement of `y`.
fn complement_basis(y: &DVector<f64>) -> DMatrix<f64> {
    let n = y.len();
    let norm = y.norm();
    let mut u = y / norm;
    // reflector mapping y/|y| to -sign(u_0) e_0
    let s = if u[0] >= 0.0 { 1.0 } else { -1.0 };
    u[0] += s;
    let unorm2 = u.norm_squared();
    let mut p = DMatrix::<f64>::identity(n, n);
    p -= (&u * u.transpose()) * (2.0 / unorm2);
    p.columns(1, n - 1).into_owned()
}

struct Eigenpairs {
    values: Vec<f64>,
    /// Eigenvector of the smallest eigenvalue, in the original coordinates.
    vector: DVector<f64>,
}

/// Smallest eigenpairs of `S q = lambda M q`, optionally restricted to the
/// `M`-orthogonal complement of `deflate`.
fn generalized_smallest(
    s: &DMatrix<f64>,
    m: &DMatrix<f64>,
    deflate: Option<&[f64]>,
    k: usize,
) -> Result<Eigenpairs, SpectraError> {
    let n = m.nrows();
    // diagonal scaling keeps the mass matrix well conditioned on strongly
    // graded meshes
    let mut scale = DVector::zeros(n);
    for i in 0..n {
        if !(m[(i, i)] > 0.0) {
            return Err(SpectraError::MassNotDefinite);
        }
        scale[i] = 1.0 / m[(i, i)].sqrt();
    }
    let sm = DMatrix::from_fn(n, n, |i, j| m[(i, j)] * scale[i] * scale[j]);
    let ss = DMatrix::from_fn(n, n, |i, j| s[(i, j)] * scale[i] * scale[j]);
    let chol = sm.cholesky().ok_or(SpectraError::MassNotDefinite)?;
    let l = chol.l();
    let x = l
        .solve_lower_triangular(&ss)
        .ok_or(SpectraError::MassNotDefinite)?;
    let c = l
        .solve_lower_triangular(&x.transpose())
        .ok_or(SpectraError::MassNotDefinite)?;
    let c = (&c + c.transpose()) * 0.5;

    let (c, basis) = match deflate {
        Some(v) => {
            // coefficients in the scaled basis are v_i / scale_i
            let vs = DVector::from_fn(n, |i, _| v[i] / scale[i]);
            let y0 = l.transpose() * vs;
            let q = complement_basis(&y0);
            let reduced = q.transpose() * &c * &q;
            (reduced, Some(q))
        }
        None => (c, None),
    };
    if c.nrows() == 0 {
        return Err(SpectraError::EmptySubspace);
    }
    let eig = SymmetricEigen::new(c);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values: Vec<f64> = order.iter().take(k.max(1)).map(|&i| eig.eigenvalues[i]).collect();
    let z = eig.eigenvectors.column(order[0]).into_owned();
    let y = match basis {
        Some(q) => q * z,
        None => z,
    };
    let w = l
        .transpose()
        .solve_upper_triangular(&y)
        .ok_or(SpectraError::MassNotDefinite)?;
    let vector = DVector::from_fn(n, |i, _| w[i] * scale[i]);
    Ok(Eigenpairs { values, vector })
}

fn relative_residual(s: &DMatrix<f64>, m: &DMatrix<f64>, lambda: f64, q: &DVector<f64>) -> f64 {
    let r = s * q - m * q * lambda;
    let denom = s.norm() * q.norm();
    if denom == 0.0 {
        r.norm()
    } else {
        r.norm() / denom
    }
}

/// Inf-sup constant of the full saddle problem, with the constant pressure
/// deflated. Returns the `k` smallest generalized eigenvalues.
pub fn compute_infsup(saddle: &Saddle, k: usize) -> Result<InfSupResult, SpectraError> {
    let (s, cond) = schur_complement(&saddle.a, &saddle.b)?;
    let m = saddle.mp.to_dense();
    let pairs = generalized_smallest(&s, &m, Some(&saddle.one_p), k)?;
    let lambda = pairs.values[0];
    let snorm = s.norm();
    if lambda < -NEGATIVE_TOL * snorm {
        return Err(SpectraError::NegativeEigenvalue(lambda));
    }
    let residual = relative_residual(&s, &m, lambda, &pairs.vector);
    Ok(InfSupResult {
        beta: lambda.max(0.0).sqrt(),
        eigenvalues: pairs.values,
        n_v: saddle.n_v(),
        n_p: saddle.n_p(),
        residual,
        cond_estimate: cond,
    })
}

/// Smallest eigenvalues of `S q = lambda Mp q` without deflation; the first
/// one is zero because `B` annihilates constants.
pub fn undeflated_eigenvalues(saddle: &Saddle, k: usize) -> Result<Vec<f64>, SpectraError> {
    let (s, _) = schur_complement(&saddle.a, &saddle.b)?;
    Ok(generalized_smallest(&s, &saddle.mp.to_dense(), None, k)?.values)
}

/// Inf-sup constant over `span{velocity unknowns in v_sub} x span{columns of q_sub}`.
pub fn infsup_on_subspaces(
    saddle: &Saddle,
    v_sub: &[usize],
    q_sub: &DMatrix<f64>,
) -> Result<f64, SpectraError> {
    if v_sub.is_empty() || q_sub.ncols() == 0 {
        return Err(SpectraError::EmptySubspace);
    }
    if q_sub.nrows() != saddle.n_p() {
        return Err(SpectraError::DimensionMismatch(format!(
            "pressure basis has {} rows, expected {}",
            q_sub.nrows(),
            saddle.n_p()
        )));
    }
    let a = saddle.a.principal(v_sub);
    let rows: Vec<usize> = (0..saddle.n_p()).collect();
    let b = saddle.b.submatrix(&rows, v_sub);
    let (s, _) = schur_complement(&a, &b)?;
    let sq = q_sub.transpose() * s * q_sub;
    let mq = q_sub.transpose() * saddle.mp.to_dense() * q_sub;
    let sq = (&sq + sq.transpose()) * 0.5;
    let mq = (&mq + mq.transpose()) * 0.5;
    let pairs = generalized_smallest(&sq, &mq, None, 1)?;
    Ok(pairs.values[0].max(0.0).sqrt())
}

/// Columns spanning the pressures `Mp`-orthogonal to the constant.
pub fn zero_mean_basis(saddle: &Saddle) -> DMatrix<f64> {
    let n = saddle.n_p();
    let m1 = saddle.mp.mul_vec(&saddle.one_p);
    let total: f64 = m1.iter().zip(&saddle.one_p).map(|(a, b)| a * b).sum();
    // q - (1^T Mp q / |w|) 1 for each unit vector q
    DMatrix::from_fn(n, n - 1, |i, j| {
        let e = if i == j { 1.0 } else { 0.0 };
        e - m1[j] / total * saddle.one_p[i]
    })
}

/// Least-squares slope of `log beta` against `log h`.
pub fn fit_decay(h: &[f64], beta: &[f64]) -> Result<f64, SpectraError> {
    if h.len() != beta.len() {
        return Err(SpectraError::DimensionMismatch(format!(
            "{} mesh sizes for {} constants",
            h.len(),
            beta.len()
        )));
    }
    if h.len() < 3 || h.iter().chain(beta).any(|&v| !(v > 0.0)) {
        return Err(SpectraError::NonPositiveInput);
    }
    let n = h.len() as f64;
    let x: Vec<f64> = h.iter().map(|v| v.ln()).collect();
    let y: Vec<f64> = beta.iter().map(|v| v.ln()).collect();
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(&y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decay_of_reference_columns() {
        let h = [1e-1, 1e-2, 1e-3, 1e-4, 1e-5];
        let linear = [7.12e-2, 7.83e-3, 7.90e-4, 7.90e-5, 7.91e-6];
        assert!((fit_decay(&h, &linear).unwrap() - 1.0).abs() < 0.02);
        let sqrt = [4.01e-1, 1.82e-1, 6.07e-2, 1.93e-2, 6.11e-3];
        assert!((fit_decay(&h, &sqrt).unwrap() - 0.5).abs() < 0.05);
        assert_eq!(fit_decay(&h, &[0.3; 5]).unwrap(), 0.0);
    }

    #[test]
    fn decay_rejects_bad_input() {
        assert!(matches!(
            fit_decay(&[1.0, 0.1], &[1.0, 1.0]),
            Err(SpectraError::NonPositiveInput)
        ));
        assert!(matches!(
            fit_decay(&[1.0, 0.1, 0.01], &[1.0, 0.0, 1.0]),
            Err(SpectraError::NonPositiveInput)
        ));
    }

    #[test]
    fn complement_basis_is_orthonormal() {
        let y = DVector::from_vec(vec![1.0, -2.0, 0.5, 3.0]);
        let q = complement_basis(&y);
        let g = q.transpose() * &q;
        assert!((g - DMatrix::identity(3, 3)).norm() < 1e-14);
        assert!((q.transpose() * y).norm() < 1e-14);
    }

    #[test]
    fn generalized_problem_matches_known_pencil() {
        // S = diag(2, 6), M = diag(1, 2) -> eigenvalues 2 and 3
        let s = DMatrix::from_diagonal(&DVector::from_vec(vec![2.0, 6.0]));
        let m = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0, 2.0]));
        let p = generalized_smallest(&s, &m, None, 2).unwrap();
        assert!((p.values[0] - 2.0).abs() < 1e-14 && (p.values[1] - 3.0).abs() < 1e-14);
        assert!(relative_residual(&s, &m, p.values[0], &p.vector) < 1e-14);
        // deflating the first unit vector leaves the second eigenvalue
        let d = generalized_smallest(&s, &m, Some(&[1.0, 0.0]), 1).unwrap();
        assert!((d.values[0] - 3.0).abs() < 1e-14);
    }
}
