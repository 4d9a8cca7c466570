//! Error-propagation symbols for weighted Jacobi and Chebyshev
//! semi-iterative smoothers.
//!
//! Both smoothers act on the Jacobi-preconditioned operator
//! `J(θ) = (Qᵀ diag(A_e) Q)^{-1} Ã(θ)`. The Chebyshev target interval
//! `[λ_min, λ_max]` is set from an estimate of the largest eigenvalue of
//! `J`, obtained by sampling a small set of frequencies.

use faer::{c64, Mat};

use crate::linalg;
use crate::symbol::{diagonal_symbol, operator_symbol, Localization, OperatorSymbol};
use crate::weakform::ElementOperator;
use crate::{Error, Result};

/// Smoother family and tuning parameters. Chebyshev bounds are expressed as
/// factors of the estimated maximal eigenvalue of the Jacobi-preconditioned
/// operator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SmootherKind {
    Jacobi {
        omega: f64,
    },
    Chebyshev {
        order: usize,
        lower_factor: f64,
        upper_factor: f64,
    },
}

/// A smoother with its number of passes; two-grid cycles apply the same
/// spec before and after coarse correction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmootherSpec {
    pub kind: SmootherKind,
    pub passes: usize,
}

impl SmootherSpec {
    pub fn jacobi(omega: f64, passes: usize) -> Result<Self> {
        if omega < 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Jacobi weight must be nonnegative, got {omega}"
            )));
        }
        Ok(SmootherSpec {
            kind: SmootherKind::Jacobi { omega },
            passes,
        })
    }

    pub fn chebyshev(order: usize, lower_factor: f64, upper_factor: f64, passes: usize) -> Result<Self> {
        if order == 0 {
            return Err(Error::InvalidArgument(
                "Chebyshev order must be at least 1".into(),
            ));
        }
        if !(lower_factor > 0.0 && lower_factor < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "lower eigenvalue factor must lie in (0, 1), got {lower_factor}"
            )));
        }
        if upper_factor < 1.0 {
            return Err(Error::InvalidArgument(format!(
                "upper eigenvalue factor must be at least 1, got {upper_factor}"
            )));
        }
        Ok(SmootherSpec {
            kind: SmootherKind::Chebyshev {
                order,
                lower_factor,
                upper_factor,
            },
            passes,
        })
    }
}

/// Recurrence coefficients of the Chebyshev semi-iterative method on the
/// interval `[α - c, α + c]`:
/// `γ_0 = -α`, `β_0 = -c²/(2α)`, `γ_j = -(α + β_{j-1})`, `β_j = (c/2)²/γ_j`.
#[derive(Debug, Clone)]
pub struct ChebyshevCoefficients {
    pub alpha: f64,
    pub half_width: f64,
    /// `β_0 .. β_{k-2}`
    pub beta: Vec<f64>,
    /// `γ_0 .. γ_{k-1}`
    pub gamma: Vec<f64>,
}

pub fn chebyshev_coefficients(
    order: usize,
    lambda_min: f64,
    lambda_max: f64,
) -> Result<ChebyshevCoefficients> {
    if order == 0 {
        return Err(Error::InvalidArgument(
            "Chebyshev order must be at least 1".into(),
        ));
    }
    if !(lambda_min >= 0.0 && lambda_min < lambda_max) {
        return Err(Error::InvalidArgument(format!(
            "empty eigenvalue interval [{lambda_min}, {lambda_max}]"
        )));
    }
    let alpha = (lambda_max + lambda_min) / 2.0;
    let half_width = (lambda_max - lambda_min) / 2.0;
    let mut gamma = vec![-alpha];
    let mut beta = Vec::new();
    for j in 1..order {
        let beta_prev = if j == 1 {
            -half_width * half_width / (2.0 * alpha)
        } else {
            (half_width / 2.0) * (half_width / 2.0) / gamma[j - 1]
        };
        beta.push(beta_prev);
        gamma.push(-(alpha + beta_prev));
    }
    Ok(ChebyshevCoefficients {
        alpha,
        half_width,
        beta,
        gamma,
    })
}

impl ChebyshevCoefficients {
    pub fn order(&self) -> usize {
        self.gamma.len()
    }

    /// Scalar error polynomial `e_k(λ)` of the recurrence, with `e_k(0) = 1`.
    pub fn error_polynomial(&self, lambda: f64) -> f64 {
        let k = self.order();
        let mut prev = 1.0;
        let mut cur = 1.0 - lambda / self.alpha;
        for j in 2..=k {
            let next = ((lambda - self.alpha) * cur - self.beta[j - 2] * prev) / self.gamma[j - 1];
            prev = cur;
            cur = next;
        }
        cur
    }

    /// Coefficients of `e_k` in the monomial basis, constant term first.
    /// Exact polynomial arithmetic on the recurrence; used by optimality
    /// checks.
    pub fn polynomial_coefficients(&self) -> Vec<f64> {
        let k = self.order();
        let mut prev = vec![1.0];
        let mut cur = vec![1.0, -1.0 / self.alpha];
        for j in 2..=k {
            let mut next = vec![0.0; j + 1];
            // λ·cur
            for (i, &v) in cur.iter().enumerate() {
                next[i + 1] += v;
            }
            for (i, &v) in cur.iter().enumerate() {
                next[i] -= self.alpha * v;
            }
            for (i, &v) in prev.iter().enumerate() {
                next[i] -= self.beta[j - 2] * v;
            }
            for v in &mut next {
                *v /= self.gamma[j - 1];
            }
            prev = cur;
            cur = next;
        }
        cur
    }
}

/// Smoother with its eigenvalue interval pinned to absolute values, acting
/// as a scalar polynomial on eigenvalues of the preconditioned operator.
#[derive(Debug, Clone)]
pub(crate) enum ResolvedSmoother {
    Jacobi { omega: f64 },
    Chebyshev(ChebyshevCoefficients),
}

impl ResolvedSmoother {
    pub(crate) fn resolve(kind: &SmootherKind, lambda_hat_max: f64) -> Result<ResolvedSmoother> {
        match *kind {
            SmootherKind::Jacobi { omega } => Ok(ResolvedSmoother::Jacobi { omega }),
            SmootherKind::Chebyshev {
                order,
                lower_factor,
                upper_factor,
            } => Ok(ResolvedSmoother::Chebyshev(chebyshev_coefficients(
                order,
                lower_factor * lambda_hat_max,
                upper_factor * lambda_hat_max,
            )?)),
        }
    }

    /// Eigenvalue of one smoothing pass at preconditioned-operator
    /// eigenvalue `λ`.
    pub(crate) fn one_pass(&self, lambda: f64) -> f64 {
        match self {
            ResolvedSmoother::Jacobi { omega } => 1.0 - omega * lambda,
            ResolvedSmoother::Chebyshev(coeffs) => coeffs.error_polynomial(lambda),
        }
    }
}

/// Frequency samples used for the maximal-eigenvalue estimate: every
/// combination of `{-π/2, 0, π/2, π}` per dimension.
pub fn lambda_max_sample_frequencies(dim: usize) -> Vec<Vec<f64>> {
    use std::f64::consts::{FRAC_PI_2, PI};
    let values = [-FRAC_PI_2, 0.0, FRAC_PI_2, PI];
    let mut samples = vec![Vec::new()];
    for _ in 0..dim {
        let mut grown = Vec::with_capacity(samples.len() * values.len());
        for prefix in &samples {
            for &v in &values {
                let mut theta = prefix.clone();
                theta.push(v);
                grown.push(theta);
            }
        }
        samples = grown;
    }
    samples
}

/// Estimate the spectral radius of the Jacobi-preconditioned operator
/// symbol by sampling the listed frequencies.
pub fn estimate_lambda_max_at(
    symbol: &OperatorSymbol,
    diag: &[f64],
    frequencies: &[Vec<f64>],
) -> Result<f64> {
    let scale: Vec<f64> = diag.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let mut worst = 0.0f64;
    for theta in frequencies {
        let a = symbol.evaluate(theta);
        let n = a.nrows();
        let h = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale[i] * scale[j]);
        let eigs = linalg::hermitian_eigenvalues(h.as_ref())?;
        for lambda in eigs {
            worst = worst.max(lambda.abs());
        }
    }
    Ok(worst)
}

/// `λ̂_max` over the default sample set.
pub fn estimate_lambda_max(symbol: &OperatorSymbol, diag: &[f64]) -> Result<f64> {
    estimate_lambda_max_at(symbol, diag, &lambda_max_sample_frequencies(symbol.dim()))
}

fn preconditioned_symbol(ae: &ElementOperator, loc: &Localization, theta: &[f64]) -> Result<Mat<c64>> {
    let diag = diagonal_symbol(ae, loc)?;
    let symbol = operator_symbol(ae, loc)?;
    let a = symbol.evaluate(theta);
    let n = a.nrows();
    Ok(Mat::from_fn(n, n, |i, j| a[(i, j)] / diag[i]))
}

/// Symbol of `ν` passes of weighted Jacobi:
/// `(I - ω (Qᵀ diag(A_e) Q)^{-1} Ã(θ))^ν`.
pub fn jacobi_error_symbol(
    ae: &ElementOperator,
    loc: &Localization,
    omega: f64,
    passes: usize,
    theta: &[f64],
) -> Result<Mat<c64>> {
    let j = preconditioned_symbol(ae, loc, theta)?;
    let n = j.nrows();
    let one_pass = Mat::from_fn(n, n, |i, jj| {
        let delta = if i == jj { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
        delta - omega * j[(i, jj)]
    });
    Ok(linalg::mat_pow(one_pass.as_ref(), passes))
}

/// Symbol of `ν` passes of the order-`k` Chebyshev smoother on
/// `[λ_min, λ_max]`, via the error recurrence
/// `Ẽ_k = (J Ẽ_{k-1} - α Ẽ_{k-1} - β_{k-2} Ẽ_{k-2}) / γ_{k-1}`.
/// `k = 0` is permitted and yields the identity.
pub fn chebyshev_error_symbol(
    ae: &ElementOperator,
    loc: &Localization,
    order: usize,
    passes: usize,
    lambda_min: f64,
    lambda_max: f64,
    theta: &[f64],
) -> Result<Mat<c64>> {
    let j = preconditioned_symbol(ae, loc, theta)?;
    let n = j.nrows();
    let identity = Mat::<c64>::identity(n, n);
    if order == 0 {
        return Ok(identity);
    }
    let coeffs = chebyshev_coefficients(order, lambda_min, lambda_max)?;
    let mut prev = identity.clone();
    let inv_alpha = c64::new(1.0 / coeffs.alpha, 0.0);
    let mut cur = Mat::from_fn(n, n, |r, c| {
        let delta = if r == c { c64::new(1.0, 0.0) } else { c64::new(0.0, 0.0) };
        delta - inv_alpha * j[(r, c)]
    });
    for step in 2..=order {
        let jcur = &j * &cur;
        let next = Mat::from_fn(n, n, |r, c| {
            (jcur[(r, c)] - coeffs.alpha * cur[(r, c)] - coeffs.beta[step - 2] * prev[(r, c)])
                / coeffs.gamma[step - 1]
        });
        prev = cur;
        cur = next;
    }
    Ok(linalg::mat_pow(cur.as_ref(), passes))
}

/// Eigenvalues of the preconditioned-operator symbol over a frequency grid:
/// `ω J(θ)` for Jacobi and `I - Ẽ_k(θ)` for Chebyshev. Eigenvalues are real
/// for symmetric element operators.
pub fn smoother_spectrum_sweep(
    ae: &ElementOperator,
    loc: &Localization,
    spec: &SmootherSpec,
    resolution: usize,
) -> Result<Vec<(Vec<f64>, Vec<f64>)>> {
    let diag = diagonal_symbol(ae, loc)?;
    let symbol = operator_symbol(ae, loc)?;
    let resolved = match spec.kind {
        SmootherKind::Jacobi { .. } => ResolvedSmoother::resolve(&spec.kind, 1.0)?,
        SmootherKind::Chebyshev { .. } => {
            let lambda_hat = estimate_lambda_max(&symbol, &diag)?;
            ResolvedSmoother::resolve(&spec.kind, lambda_hat)?
        }
    };
    let scale: Vec<f64> = diag.iter().map(|&v| 1.0 / v.sqrt()).collect();
    let grid = crate::twogrid::frequency_grid(symbol.dim(), resolution);
    let mut out = Vec::with_capacity(grid.len());
    for theta in grid {
        let a = symbol.evaluate(&theta);
        let n = a.nrows();
        let h = Mat::from_fn(n, n, |i, j| a[(i, j)] * scale[i] * scale[j]);
        let lambdas = linalg::hermitian_eigenvalues(h.as_ref())?;
        let values: Vec<f64> = lambdas
            .iter()
            .map(|&lambda| match &resolved {
                ResolvedSmoother::Jacobi { omega } => omega * lambda,
                ResolvedSmoother::Chebyshev(_) => 1.0 - resolved.one_pass(lambda),
            })
            .collect();
        out.push((theta, values));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::ElementBasis;
    use crate::symbol::localization;
    use crate::weakform::{element_operator, laplacian_weakform};

    fn laplacian_parts(p: usize, d: usize) -> (ElementOperator, Localization) {
        let basis = ElementBasis::lagrange(p, d).unwrap();
        let op = element_operator(&laplacian_weakform(d, 1.0), &basis).unwrap();
        let loc = localization(p, d, 1);
        (op, loc)
    }

    #[test]
    fn lambda_max_linear_laplacian() {
        let (op, loc) = laplacian_parts(1, 1);
        let diag = diagonal_symbol(&op, &loc).unwrap();
        let symbol = operator_symbol(&op, &loc).unwrap();
        let lambda = estimate_lambda_max(&symbol, &diag).unwrap();
        assert!((lambda - 2.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_max_identity_operator() {
        let (mut op, loc) = laplacian_parts(2, 1);
        op.matrix = Mat::<f64>::identity(3, 3);
        let diag = diagonal_symbol(&op, &loc).unwrap();
        let symbol = operator_symbol(&op, &loc).unwrap();
        // identity element couples no neighbors: J(θ) = I for all θ
        let lambda = estimate_lambda_max(&symbol, &diag).unwrap();
        assert!((lambda - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lambda_max_matches_dense_sweep_quadratic() {
        let (op, loc) = laplacian_parts(2, 1);
        let diag = diagonal_symbol(&op, &loc).unwrap();
        let symbol = operator_symbol(&op, &loc).unwrap();
        let sampled = estimate_lambda_max(&symbol, &diag).unwrap();
        let dense: Vec<Vec<f64>> = (0..1001)
            .map(|i| vec![-std::f64::consts::PI + i as f64 * 2.0 * std::f64::consts::PI / 1000.0])
            .collect();
        let brute = estimate_lambda_max_at(&symbol, &diag, &dense).unwrap();
        assert!((sampled - brute).abs() <= 0.01 * brute, "{sampled} vs {brute}");
    }

    #[test]
    fn lambda_max_monotone_in_samples() {
        let (op, loc) = laplacian_parts(3, 1);
        let diag = diagonal_symbol(&op, &loc).unwrap();
        let symbol = operator_symbol(&op, &loc).unwrap();
        let mut samples: Vec<Vec<f64>> = vec![vec![std::f64::consts::PI]];
        let mut last = 0.0;
        for extra in [0.0, -std::f64::consts::FRAC_PI_2, 1.1, 2.3] {
            samples.push(vec![extra]);
            let estimate = estimate_lambda_max_at(&symbol, &diag, &samples).unwrap();
            assert!(estimate >= last - 1e-15);
            last = estimate;
        }
    }

    #[test]
    fn chebyshev_coefficients_example() {
        let c = chebyshev_coefficients(3, 0.0, 2.0).unwrap();
        assert!((c.alpha - 1.0).abs() < 1e-15);
        assert!((c.half_width - 1.0).abs() < 1e-15);
        assert!((c.gamma[0] + 1.0).abs() < 1e-15);
        assert!((c.beta[0] + 0.5).abs() < 1e-15);
        assert!((c.gamma[1] + 0.5).abs() < 1e-15);
        assert!((c.beta[1] + 0.5).abs() < 1e-15);
        assert_eq!(c.beta.len(), 2);
        assert_eq!(c.gamma.len(), 3);
    }

    #[test]
    fn chebyshev_rejects_empty_interval() {
        assert!(chebyshev_coefficients(2, 1.0, 1.0).is_err());
        assert!(chebyshev_coefficients(2, 2.0, 1.0).is_err());
    }

    #[test]
    fn error_polynomial_normalized_at_zero() {
        for k in 1..=6 {
            let c = chebyshev_coefficients(k, 0.2, 2.0).unwrap();
            assert!((c.error_polynomial(0.0) - 1.0).abs() < 1e-12);
            let coeffs = c.polynomial_coefficients();
            assert_eq!(coeffs.len(), k + 1);
            assert!((coeffs[0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn polynomial_coefficients_match_recurrence() {
        let c = chebyshev_coefficients(4, 0.3, 2.5).unwrap();
        let coeffs = c.polynomial_coefficients();
        for &lambda in &[0.1, 0.8, 1.7, 2.4] {
            let horner: f64 = coeffs.iter().rev().fold(0.0, |acc, &v| acc * lambda + v);
            assert!((horner - c.error_polynomial(lambda)).abs() < 1e-12);
        }
    }

    #[test]
    fn jacobi_symbol_zero_weight_is_identity() {
        let (op, loc) = laplacian_parts(2, 1);
        let s = jacobi_error_symbol(&op, &loc, 0.0, 3, &[0.7]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - c64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn jacobi_symbol_linear_closed_form() {
        let (op, loc) = laplacian_parts(1, 1);
        for theta in [0.3, std::f64::consts::PI, -1.2] {
            let s = jacobi_error_symbol(&op, &loc, 2.0 / 3.0, 1, &[theta]).unwrap();
            let expected = 1.0 - 2.0 / 3.0 * (1.0 - theta.cos());
            assert!((s[(0, 0)].re - expected).abs() < 1e-13);
        }
        let s = jacobi_error_symbol(&op, &loc, 2.0 / 3.0, 1, &[std::f64::consts::PI]).unwrap();
        assert!((s[(0, 0)].re + 1.0 / 3.0).abs() < 1e-13);
    }

    #[test]
    fn jacobi_passes_are_matrix_powers() {
        let (op, loc) = laplacian_parts(3, 1);
        for theta in [-0.4, 0.9, 2.5] {
            let s1 = jacobi_error_symbol(&op, &loc, 0.8, 1, &[theta]).unwrap();
            let s2 = jacobi_error_symbol(&op, &loc, 0.8, 2, &[theta]).unwrap();
            let sq = &s1 * &s1;
            assert!(crate::linalg::max_abs_diff(s2.as_ref(), sq.as_ref()) < 1e-12);
        }
    }

    #[test]
    fn chebyshev_order_one_equals_classical_jacobi() {
        let (op, loc) = laplacian_parts(2, 1);
        let diag = diagonal_symbol(&op, &loc).unwrap();
        let symbol = operator_symbol(&op, &loc).unwrap();
        let lambda_hat = estimate_lambda_max(&symbol, &diag).unwrap();
        let (lmin, lmax) = (0.1 * lambda_hat, 1.0 * lambda_hat);
        let alpha = (lmin + lmax) / 2.0;
        for theta in [-1.0, 0.2, 2.8] {
            let cheb = chebyshev_error_symbol(&op, &loc, 1, 1, lmin, lmax, &[theta]).unwrap();
            let jac = jacobi_error_symbol(&op, &loc, 1.0 / alpha, 1, &[theta]).unwrap();
            assert!(crate::linalg::max_abs_diff(cheb.as_ref(), jac.as_ref()) < 1e-12);
        }
    }

    #[test]
    fn chebyshev_order_zero_is_identity() {
        let (op, loc) = laplacian_parts(2, 1);
        let s = chebyshev_error_symbol(&op, &loc, 0, 1, 0.1, 1.0, &[0.3]).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert!((s[(i, j)] - c64::new(expected, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn chebyshev_symbol_matches_scalar_recurrence_on_modes() {
        // p = 1: the symbol is 1x1, so the matrix recurrence must reproduce
        // a hand-rolled scalar recurrence exactly.
        let (op, loc) = laplacian_parts(1, 1);
        let theta = std::f64::consts::PI;
        let lambda = 1.0 - theta.cos(); // J(θ) for the linear Laplacian
        let (lmin, lmax) = (0.2, 2.0);
        let alpha = (lmin + lmax) / 2.0;
        let c = (lmax - lmin) / 2.0;
        // hand oracle: e_0 = 1, e_1 = 1 - λ/α, three-term recurrence
        let beta0 = -c * c / (2.0 * alpha);
        let gamma0 = -alpha;
        let gamma1 = -(alpha + beta0);
        let _ = gamma0;
        let e0 = 1.0;
        let e1 = 1.0 - lambda / alpha;
        let e2 = ((lambda - alpha) * e1 - beta0 * e0) / gamma1;
        let s = chebyshev_error_symbol(&op, &loc, 2, 1, lmin, lmax, &[theta]).unwrap();
        assert!((s[(0, 0)].re - e2).abs() < 1e-13, "{} vs {e2}", s[(0, 0)].re);
    }

    #[test]
    fn chebyshev_passes_are_matrix_powers() {
        let (op, loc) = laplacian_parts(3, 1);
        for theta in [-0.8, 1.7] {
            let s1 = chebyshev_error_symbol(&op, &loc, 3, 1, 0.3, 3.0, &[theta]).unwrap();
            let s2 = chebyshev_error_symbol(&op, &loc, 3, 2, 0.3, 3.0, &[theta]).unwrap();
            let sq = &s1 * &s1;
            assert!(crate::linalg::max_abs_diff(s2.as_ref(), sq.as_ref()) < 1e-12);
        }
    }

    #[test]
    fn jacobi_stability_threshold_linear() {
        // |1 - ω(1 - cos θ)| ≤ 1 on a 1001-point grid iff ω ≤ 1
        let stable = |omega: f64| {
            (0..=1000).all(|i| {
                let theta = -std::f64::consts::PI
                    + i as f64 * 2.0 * std::f64::consts::PI / 1000.0;
                (1.0 - omega * (1.0 - theta.cos())).abs() <= 1.0 + 1e-12
            })
        };
        assert!(stable(0.5));
        assert!(stable(1.0));
        assert!(!stable(1.05));
    }

    #[test]
    fn spectrum_sweep_linear_jacobi_curve() {
        let (op, loc) = laplacian_parts(1, 1);
        let spec = SmootherSpec::jacobi(1.0, 1).unwrap();
        let rows = smoother_spectrum_sweep(&op, &loc, &spec, 64).unwrap();
        assert_eq!(rows.len(), 64);
        for (theta, values) in rows {
            assert_eq!(values.len(), 1);
            let expected = 1.0 - theta[0].cos();
            assert!((values[0] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn spectrum_sweep_counts_modes() {
        let (op, loc) = laplacian_parts(3, 1);
        let spec = SmootherSpec::chebyshev(2, 0.1, 1.0, 1).unwrap();
        let rows = smoother_spectrum_sweep(&op, &loc, &spec, 16).unwrap();
        assert_eq!(rows.len(), 16);
        for (_, values) in rows {
            assert_eq!(values.len(), 3);
        }
    }
}
