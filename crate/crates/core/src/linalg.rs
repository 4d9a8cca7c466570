//! Dense eigenvalue helpers on top of faer.
//!
//! faer's global parallelism is pinned to sequential the first time any
//! helper runs: sweeps parallelize over frequencies instead, and results
//! must not depend on the thread count.

use std::sync::Once;

use faer::Side;
use faer::{c64, Mat, MatRef};

use crate::{Error, Result};

static INIT: Once = Once::new();

pub fn init() {
    INIT.call_once(|| {
        faer::set_global_parallelism(faer::Par::Seq);
    });
}

/// Eigenvalues of a general complex matrix.
pub fn complex_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<c64>> {
    init();
    debug_assert_eq!(m.nrows(), m.ncols());
    if m.nrows() == 0 {
        return Ok(Vec::new());
    }
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    m.eigenvalues().map_err(|_| Error::EigenFailure)
}

/// Spectral radius of a general complex matrix.
pub fn spectral_radius(m: MatRef<'_, c64>) -> Result<f64> {
    let eigs = complex_eigenvalues(m)?;
    Ok(eigs.iter().map(|z| z.norm()).fold(0.0, f64::max))
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: MatRef<'_, c64>) -> Result<Vec<f64>> {
    init();
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)].re]);
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)
}

/// Full eigendecomposition of a Hermitian matrix: ascending values and the
/// unitary matrix of eigenvectors (one per column).
pub fn hermitian_eigen(m: MatRef<'_, c64>) -> Result<(Vec<f64>, Mat<c64>)> {
    init();
    if m.nrows() == 1 {
        return Ok((vec![m[(0, 0)].re], Mat::identity(1, 1)));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let values = evd
        .S()
        .column_vector()
        .iter()
        .map(|z: &c64| z.re)
        .collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigendecomposition of a real symmetric matrix.
pub fn symmetric_eigen(m: MatRef<'_, f64>) -> Result<(Vec<f64>, Mat<f64>)> {
    init();
    if m.nrows() == 1 {
        return Ok((vec![m[(0, 0)]], Mat::identity(1, 1)));
    }
    let evd = m
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| Error::EigenFailure)?;
    let values = evd.S().column_vector().iter().copied().collect();
    Ok((values, evd.U().to_owned()))
}

/// Eigenvalues of a real symmetric matrix, ascending.
pub fn symmetric_eigenvalues(m: MatRef<'_, f64>) -> Result<Vec<f64>> {
    init();
    if m.nrows() == 1 {
        return Ok(vec![m[(0, 0)]]);
    }
    m.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| Error::EigenFailure)
}

/// `m^k` by repeated multiplication; `k = 0` yields the identity.
pub fn mat_pow(m: MatRef<'_, c64>, k: usize) -> Mat<c64> {
    let n = m.nrows();
    let mut out = Mat::<c64>::identity(n, n);
    for _ in 0..k {
        out = &out * m;
    }
    out
}

#[cfg_attr(not(test), allow(dead_code))]
pub fn max_abs_diff(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> f64 {
    let mut worst = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            worst = worst.max((a[(i, j)] - b[(i, j)]).norm());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn complex_eig_of_diagonal() {
        let m = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                c64::new(i as f64 + 1.0, -(i as f64))
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let mut eigs = complex_eigenvalues(m.as_ref()).unwrap();
        eigs.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((eigs[2] - c64::new(3.0, -2.0)).norm() < 1e-12);
    }

    #[test]
    fn spectral_radius_rotation() {
        // 2x2 rotation-like matrix has |eig| = 1
        let m = Mat::from_fn(2, 2, |i, j| match (i, j) {
            (0, 1) => c64::new(-1.0, 0.0),
            (1, 0) => c64::new(1.0, 0.0),
            _ => c64::new(0.0, 0.0),
        });
        assert!((spectral_radius(m.as_ref()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn hermitian_eigen_reconstructs() {
        let h = Mat::from_fn(3, 3, |i, j| {
            let re = 1.0 / (1.0 + i as f64 + j as f64);
            let im = if i > j {
                0.1
            } else if i < j {
                -0.1
            } else {
                0.0
            };
            c64::new(re, im)
        });
        let (vals, u) = hermitian_eigen(h.as_ref()).unwrap();
        let lam = Mat::from_fn(3, 3, |i, j| {
            if i == j {
                c64::new(vals[i], 0.0)
            } else {
                c64::new(0.0, 0.0)
            }
        });
        let rebuilt = &u * &lam * u.adjoint();
        assert!(max_abs_diff(h.as_ref(), rebuilt.as_ref()) < 1e-12);
    }
}
