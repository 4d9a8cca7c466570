//! One-dimensional Lagrange bases on Gauss-Lobatto nodes with Gauss-Legendre
//! quadrature, and their tensor-product extensions.

use faer::Mat;

use crate::util::{kron_all, unrank};
use crate::{Error, Result};

const NEWTON_TOL: f64 = 1e-14;
const NEWTON_MAX_ITER: usize = 100;

/// Quadrature rule on the reference interval `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub points: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Tensor-product Lagrange basis of degree `p` in `dim` dimensions,
/// evaluated at the Gauss-Legendre quadrature points.
///
/// `interp` has one row per quadrature point and one column per node;
/// `grad` stacks `dim` blocks of the same shape, where block `a` holds the
/// derivative along tensor axis `a` (axis 0 is the slowest-varying node
/// index, matching the Kronecker factor order).
#[derive(Debug, Clone)]
pub struct ElementBasis {
    pub degree: usize,
    pub dim: usize,
    pub nodes1d: Vec<f64>,
    pub quadrature: QuadratureRule,
    pub interp: Mat<f64>,
    pub grad: Mat<f64>,
}

/// Legendre polynomial value and derivative at `x` by the three-term
/// recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    for k in 2..=n {
        let next = ((2 * k - 1) as f64 * x * cur - (k - 1) as f64 * prev) / k as f64;
        prev = cur;
        cur = next;
    }
    // (1 - x^2) P_n' = n (P_{n-1} - x P_n)
    let deriv = if (x * x - 1.0).abs() < 1e-300 {
        // endpoint limit: P_n'(±1) = ±^{n+1} n(n+1)/2
        let sign = if x > 0.0 { 1.0 } else { (-1.0f64).powi(n as i32 + 1) };
        sign * (n * (n + 1)) as f64 / 2.0
    } else {
        (n as f64) * (prev - x * cur) / (1.0 - x * x)
    };
    (cur, deriv)
}

/// `q`-point Gauss-Legendre rule on `[-1, 1]`, exact for polynomials of
/// degree `2q - 1`.
pub fn gauss_legendre_rule(q: usize) -> Result<QuadratureRule> {
    if q == 0 {
        return Err(Error::InvalidArgument(
            "quadrature size must be at least 1".into(),
        ));
    }
    let mut points = vec![0.0; q];
    let mut weights = vec![0.0; q];
    let half = q / 2;
    for i in 0..half {
        // i-th root in the negative half, via Newton from the Chebyshev guess
        let mut x = -(std::f64::consts::PI * (i as f64 + 0.75) / (q as f64 + 0.5)).cos();
        let mut iter = 0;
        loop {
            let (value, deriv) = legendre_with_derivative(q, x);
            let step = value / deriv;
            x -= step;
            iter += 1;
            if step.abs() < NEWTON_TOL || iter >= NEWTON_MAX_ITER {
                break;
            }
        }
        let (_, deriv) = legendre_with_derivative(q, x);
        let w = 2.0 / ((1.0 - x * x) * deriv * deriv);
        points[i] = x;
        points[q - 1 - i] = -x;
        weights[i] = w;
        weights[q - 1 - i] = w;
    }
    if q % 2 == 1 {
        let (_, deriv) = legendre_with_derivative(q, 0.0);
        points[half] = 0.0;
        weights[half] = 2.0 / (deriv * deriv);
    }
    Ok(QuadratureRule { points, weights })
}

/// `count` Gauss-Lobatto points on `[-1, 1]`: both endpoints plus the roots
/// of `P'_{count-1}`.
pub fn gauss_lobatto_points(count: usize) -> Result<Vec<f64>> {
    if count < 2 {
        return Err(Error::InvalidArgument(
            "Gauss-Lobatto needs at least 2 points".into(),
        ));
    }
    let n = count - 1;
    let mut points = vec![0.0; count];
    points[0] = -1.0;
    points[n] = 1.0;
    let interior = count - 2;
    let half = interior / 2;
    for i in 0..half {
        // interior root of P'_n near the Chebyshev-Lobatto point
        let mut x = -(std::f64::consts::PI * (i + 1) as f64 / n as f64).cos();
        let mut iter = 0;
        loop {
            let (value, deriv) = legendre_with_derivative(n, x);
            // P_n'' from the Legendre ODE
            let second = (2.0 * x * deriv - (n * (n + 1)) as f64 * value) / (1.0 - x * x);
            let step = deriv / second;
            x -= step;
            iter += 1;
            if step.abs() < NEWTON_TOL || iter >= NEWTON_MAX_ITER {
                break;
            }
        }
        points[1 + i] = x;
        points[n - 1 - i] = -x;
    }
    if interior % 2 == 1 {
        points[1 + half] = 0.0;
    }
    Ok(points)
}

/// Interpolation and differentiation matrices for the Lagrange cardinal
/// functions on `nodes`, evaluated at `eval_points`:
/// `interp[i][j] = ℓ_j(e_i)` and `grad[i][j] = ℓ'_j(e_i)`.
pub fn lagrange_matrices(nodes: &[f64], eval_points: &[f64]) -> Result<(Mat<f64>, Mat<f64>)> {
    let n = nodes.len();
    for j in 0..n {
        for k in 0..j {
            if (nodes[j] - nodes[k]).abs() < 1e-14 {
                return Err(Error::InvalidArgument(format!(
                    "duplicate interpolation nodes at index {k} and {j}"
                )));
            }
        }
    }
    let m = eval_points.len();
    let mut interp = Mat::<f64>::zeros(m, n);
    let mut grad = Mat::<f64>::zeros(m, n);
    for (i, &x) in eval_points.iter().enumerate() {
        for j in 0..n {
            let mut value = 1.0;
            for k in 0..n {
                if k != j {
                    value *= (x - nodes[k]) / (nodes[j] - nodes[k]);
                }
            }
            interp[(i, j)] = value;
            let mut deriv = 0.0;
            for l in 0..n {
                if l == j {
                    continue;
                }
                let mut term = 1.0 / (nodes[j] - nodes[l]);
                for k in 0..n {
                    if k != j && k != l {
                        term *= (x - nodes[k]) / (nodes[j] - nodes[k]);
                    }
                }
                deriv += term;
            }
            grad[(i, j)] = deriv;
        }
    }
    Ok((interp, grad))
}

/// Extend a one-dimensional basis to `dim` dimensions by Kronecker products.
/// Gradient block `a` replaces factor `a` with the 1D differentiation
/// matrix, so block 0 differentiates the slowest-varying node index.
pub fn tensor_basis(basis1d: &ElementBasis, dim: usize) -> Result<ElementBasis> {
    if basis1d.dim != 1 {
        return Err(Error::InvalidArgument(
            "tensor_basis expects a one-dimensional basis".into(),
        ));
    }
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!(
            "dimension must be 1, 2, or 3, got {dim}"
        )));
    }
    let q = basis1d.quadrature.points.len();
    let node_count = basis1d.nodes1d.len().pow(dim as u32);
    let quad_count = q.pow(dim as u32);

    let factors: Vec<&Mat<f64>> = vec![&basis1d.interp; dim];
    let interp = kron_all(&factors);

    let mut grad = Mat::<f64>::zeros(dim * quad_count, node_count);
    for a in 0..dim {
        let factors: Vec<&Mat<f64>> = (0..dim)
            .map(|t| if t == a { &basis1d.grad } else { &basis1d.interp })
            .collect();
        let block = kron_all(&factors);
        for i in 0..quad_count {
            for j in 0..node_count {
                grad[(a * quad_count + i, j)] = block[(i, j)];
            }
        }
    }

    Ok(ElementBasis {
        degree: basis1d.degree,
        dim,
        nodes1d: basis1d.nodes1d.clone(),
        quadrature: basis1d.quadrature.clone(),
        interp,
        grad,
    })
}

impl ElementBasis {
    /// Degree-`p` Lagrange basis on Gauss-Lobatto nodes with `p + 1`-point
    /// Gauss-Legendre quadrature per dimension.
    pub fn lagrange(degree: usize, dim: usize) -> Result<Self> {
        if degree == 0 {
            return Err(Error::InvalidArgument("degree must be positive".into()));
        }
        let nodes1d = gauss_lobatto_points(degree + 1)?;
        let quadrature = gauss_legendre_rule(degree + 1)?;
        let (interp, grad) = lagrange_matrices(&nodes1d, &quadrature.points)?;
        let basis1d = ElementBasis {
            degree,
            dim: 1,
            nodes1d,
            quadrature,
            interp,
            grad,
        };
        if dim == 1 {
            Ok(basis1d)
        } else {
            tensor_basis(&basis1d, dim)
        }
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.degree + 1
    }

    pub fn node_count(&self) -> usize {
        self.nodes_per_dim().pow(self.dim as u32)
    }

    pub fn quad_count(&self) -> usize {
        self.quadrature.points.len().pow(self.dim as u32)
    }

    /// Node coordinates normalized to `[0, 1]^d`, indexed big-endian.
    pub fn node_coords(&self, linear: usize) -> Vec<f64> {
        unrank(linear, self.dim, self.nodes_per_dim())
            .iter()
            .map(|&digit| (self.nodes1d[digit] + 1.0) / 2.0)
            .collect()
    }

    /// Reference coordinates of quadrature point `linear` in `[-1, 1]^d`.
    pub fn quad_coords(&self, linear: usize) -> Vec<f64> {
        unrank(linear, self.dim, self.quadrature.points.len())
            .iter()
            .map(|&digit| self.quadrature.points[digit])
            .collect()
    }

    /// Tensor-product quadrature weight of quadrature point `linear`.
    pub fn quad_weight(&self, linear: usize) -> f64 {
        unrank(linear, self.dim, self.quadrature.points.len())
            .iter()
            .map(|&digit| self.quadrature.weights[digit])
            .product()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn monomial_integral(k: usize) -> f64 {
        if k % 2 == 1 {
            0.0
        } else {
            2.0 / (k as f64 + 1.0)
        }
    }

    #[test]
    fn gauss_legendre_small_rules() {
        let r1 = gauss_legendre_rule(1).unwrap();
        assert_eq!(r1.points, vec![0.0]);
        assert_eq!(r1.weights, vec![2.0]);

        let r2 = gauss_legendre_rule(2).unwrap();
        assert!((r2.points[0] + 1.0 / 3.0f64.sqrt()).abs() < 1e-14);
        assert!((r2.points[1] - 1.0 / 3.0f64.sqrt()).abs() < 1e-14);
        assert!((r2.weights[0] - 1.0).abs() < 1e-14);

        let r3 = gauss_legendre_rule(3).unwrap();
        assert!((r3.points[0] + (3.0f64 / 5.0).sqrt()).abs() < 1e-14);
        assert!((r3.points[1]).abs() < 1e-14);
        assert!((r3.weights[0] - 5.0 / 9.0).abs() < 1e-14);
        assert!((r3.weights[1] - 8.0 / 9.0).abs() < 1e-14);
    }

    #[test]
    fn gauss_legendre_exactness() {
        for q in 1..=17 {
            let rule = gauss_legendre_rule(q).unwrap();
            assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-12);
            for w in rule.points.windows(2) {
                assert!(w[0] < w[1], "points must increase");
            }
            assert!(rule.weights.iter().all(|&w| w > 0.0));
            for k in 0..=(2 * q - 1) {
                let approx: f64 = rule
                    .points
                    .iter()
                    .zip(&rule.weights)
                    .map(|(&x, &w)| w * x.powi(k as i32))
                    .sum();
                assert!(
                    (approx - monomial_integral(k)).abs() < 1e-12,
                    "q={q} k={k}"
                );
            }
        }
    }

    #[test]
    fn gauss_legendre_rejects_zero() {
        assert!(gauss_legendre_rule(0).is_err());
    }

    #[test]
    fn lobatto_small_counts() {
        assert_eq!(gauss_lobatto_points(2).unwrap(), vec![-1.0, 1.0]);
        let p3 = gauss_lobatto_points(3).unwrap();
        assert!((p3[1]).abs() < 1e-14);
        let p5 = gauss_lobatto_points(5).unwrap();
        let root = (3.0f64 / 7.0).sqrt();
        assert!((p5[1] + root).abs() < 1e-13);
        assert!((p5[3] - root).abs() < 1e-13);
        assert!(p5[2].abs() < 1e-14);
    }

    #[test]
    fn lobatto_points_are_derivative_roots() {
        for count in 2..=17 {
            let pts = gauss_lobatto_points(count).unwrap();
            assert_eq!(pts[0], -1.0);
            assert_eq!(pts[count - 1], 1.0);
            for w in pts.windows(2) {
                assert!(w[0] < w[1], "points must increase");
            }
            for &x in &pts[1..count - 1] {
                let (_, deriv) = legendre_with_derivative(count - 1, x);
                assert!(deriv.abs() < 1e-10, "count={count} x={x} P'={deriv}");
            }
        }
    }

    #[test]
    fn lobatto_rejects_unit_count() {
        assert!(gauss_lobatto_points(1).is_err());
    }

    #[test]
    fn lagrange_linear_midpoint() {
        let (interp, grad) = lagrange_matrices(&[-1.0, 1.0], &[0.0]).unwrap();
        assert!((interp[(0, 0)] - 0.5).abs() < 1e-15);
        assert!((interp[(0, 1)] - 0.5).abs() < 1e-15);
        assert!((grad[(0, 0)] + 0.5).abs() < 1e-15);
        assert!((grad[(0, 1)] - 0.5).abs() < 1e-15);
    }

    #[test]
    fn lagrange_cardinal_property() {
        let (interp, _) = lagrange_matrices(&[-1.0, 0.0, 1.0], &[0.0]).unwrap();
        assert!((interp[(0, 0)]).abs() < 1e-15);
        assert!((interp[(0, 1)] - 1.0).abs() < 1e-15);
        assert!((interp[(0, 2)]).abs() < 1e-15);
    }

    #[test]
    fn lagrange_partition_of_unity() {
        let x = 1.0 / 3.0f64.sqrt();
        let (interp, grad) = lagrange_matrices(&[-1.0, 0.0, 1.0], &[-x, x]).unwrap();
        for i in 0..2 {
            let row_sum: f64 = (0..3).map(|j| interp[(i, j)]).sum();
            let grad_sum: f64 = (0..3).map(|j| grad[(i, j)]).sum();
            assert!((row_sum - 1.0).abs() < 1e-12);
            assert!(grad_sum.abs() < 1e-12);
        }
    }

    #[test]
    fn lagrange_rejects_duplicates() {
        assert!(lagrange_matrices(&[0.0, 0.0, 1.0], &[0.5]).is_err());
    }

    #[test]
    fn tensor_degenerate_matches_1d() {
        let b = ElementBasis::lagrange(3, 1).unwrap();
        let t = tensor_basis(&b, 1).unwrap();
        for i in 0..b.interp.nrows() {
            for j in 0..b.interp.ncols() {
                assert_eq!(b.interp[(i, j)], t.interp[(i, j)]);
                assert_eq!(b.grad[(i, j)], t.grad[(i, j)]);
            }
        }
    }

    #[test]
    fn tensor_2d_row_sums() {
        let b = ElementBasis::lagrange(1, 2).unwrap();
        assert_eq!(b.interp.nrows(), 4);
        assert_eq!(b.interp.ncols(), 4);
        assert_eq!(b.grad.nrows(), 8);
        for i in 0..4 {
            let s: f64 = (0..4).map(|j| b.interp[(i, j)]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
        for i in 0..8 {
            let s: f64 = (0..4).map(|j| b.grad[(i, j)]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn tensor_2d_matches_explicit_bilinear() {
        // p=1, d=2 interpolation against the four bilinear shape functions
        let b = ElementBasis::lagrange(1, 2).unwrap();
        let q = &b.quadrature.points;
        for (qi, (&y, &x)) in q
            .iter()
            .flat_map(|y| q.iter().map(move |x| (y, x)))
            .enumerate()
        {
            // node order big-endian: (y, x) in {-1,1}^2 with x fastest
            let shapes = [
                (1.0 - y) / 2.0 * (1.0 - x) / 2.0,
                (1.0 - y) / 2.0 * (1.0 + x) / 2.0,
                (1.0 + y) / 2.0 * (1.0 - x) / 2.0,
                (1.0 + y) / 2.0 * (1.0 + x) / 2.0,
            ];
            for j in 0..4 {
                assert!((b.interp[(qi, j)] - shapes[j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn partition_of_unity_high_order() {
        for (p, d) in [(4, 1), (4, 2), (2, 3), (16, 1)] {
            let b = ElementBasis::lagrange(p, d).unwrap();
            for i in 0..b.quad_count() {
                let s: f64 = (0..b.node_count()).map(|j| b.interp[(i, j)]).sum();
                assert!((s - 1.0).abs() < 1e-12, "p={p} d={d}");
            }
            for i in 0..b.grad.nrows() {
                let s: f64 = (0..b.node_count()).map(|j| b.grad[(i, j)]).sum();
                assert!(s.abs() < 1e-12, "p={p} d={d}");
            }
        }
    }
}
