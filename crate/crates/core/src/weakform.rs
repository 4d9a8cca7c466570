//! Pointwise weak-form blocks and dense element operators `A_e = Bᵀ D B`.
//!
//! A weak form supplies, at every quadrature point, the block matrix
//! `[[f00, f01], [f10, f11]]` acting on `(u, ∇u)` stacked per component:
//! the first `n` slots hold component values, the remaining `n·d` slots hold
//! gradients in component-major order. Blocks include the quadrature weight
//! and all affine change-of-coordinates factors for the element size, so the
//! basis matrices stay purely reference-element quantities.

use std::sync::Arc;

use faer::Mat;

use crate::basis::ElementBasis;
use crate::{Error, Result};

type BlockBuilder = dyn Fn(&[f64], f64, f64) -> Mat<f64> + Send + Sync;

/// A second-order PDE in pointwise quadrature-block form.
#[derive(Clone)]
pub struct WeakForm {
    components: usize,
    dim: usize,
    element_size: f64,
    axis_symmetric: bool,
    scale: f64,
    builder: Arc<BlockBuilder>,
}

impl std::fmt::Debug for WeakForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("WeakForm")
            .field("components", &self.components)
            .field("dim", &self.dim)
            .field("element_size", &self.element_size)
            .finish()
    }
}

impl WeakForm {
    /// Wrap a pointwise block builder `(point, weight, h) -> block` of shape
    /// `n(1+d) × n(1+d)`. `axis_symmetric` declares invariance under
    /// simultaneous permutation of coordinate axes and components, which
    /// frequency sweeps may exploit.
    pub fn from_builder(
        components: usize,
        dim: usize,
        element_size: f64,
        axis_symmetric: bool,
        builder: Arc<BlockBuilder>,
    ) -> Self {
        WeakForm {
            components,
            dim,
            element_size,
            axis_symmetric,
            scale: 1.0,
            builder,
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn element_size(&self) -> f64 {
        self.element_size
    }

    pub fn axis_symmetric(&self) -> bool {
        self.axis_symmetric
    }

    /// Number of slots per quadrature point, `n(1+d)`.
    pub fn block_size(&self) -> usize {
        self.components * (1 + self.dim)
    }

    /// Evaluate the weak-form block at a reference point with the given
    /// tensor-product quadrature weight.
    pub fn block(&self, point: &[f64], weight: f64) -> Mat<f64> {
        let mut block = (self.builder)(point, weight, self.element_size);
        if self.scale != 1.0 {
            for j in 0..block.ncols() {
                for i in 0..block.nrows() {
                    block[(i, j)] *= self.scale;
                }
            }
        }
        block
    }

    /// Same PDE rediscretized on elements of size `h`.
    pub fn with_element_size(&self, h: f64) -> WeakForm {
        let mut out = self.clone();
        out.element_size = h;
        out
    }

    /// Multiply the whole bilinear form by `s` (spectral predictions are
    /// invariant under this).
    pub fn scaled(&self, s: f64) -> WeakForm {
        let mut out = self.clone();
        out.scale *= s;
        out
    }
}

/// Scalar Laplacian on elements of size `h`: `f11 = w (h/2)^d (2/h)^2 I_d`.
pub fn laplacian_weakform(dim: usize, h: f64) -> WeakForm {
    WeakForm::from_builder(
        1,
        dim,
        h,
        true,
        Arc::new(move |_point, weight, h| {
            let d = dim;
            let factor = weight * (h / 2.0).powi(d as i32) * (2.0 / h) * (2.0 / h);
            let mut block = Mat::<f64>::zeros(1 + d, 1 + d);
            for a in 0..d {
                block[(1 + a, 1 + a)] = factor;
            }
            block
        }),
    )
}

/// Isotropic linear elasticity material: Young's modulus and Poisson's
/// ratio with the derived Lamé parameters.
#[derive(Debug, Clone, Copy)]
pub struct ElasticityModel {
    pub young: f64,
    pub poisson: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ElasticityModel {
    pub fn new(young: f64, poisson: f64) -> Result<Self> {
        if young <= 0.0 {
            return Err(Error::InvalidArgument(
                "Young's modulus must be positive".into(),
            ));
        }
        if poisson <= 0.0 || poisson >= 0.5 {
            return Err(Error::InvalidArgument(format!(
                "Poisson's ratio must lie in (0, 0.5), got {poisson}"
            )));
        }
        let lambda = young * poisson / ((1.0 + poisson) * (1.0 - 2.0 * poisson));
        let mu = young / (2.0 * (1.0 + poisson));
        Ok(ElasticityModel {
            young,
            poisson,
            lambda,
            mu,
        })
    }
}

/// Linear elasticity with one vector component per coordinate axis:
/// `σ = C : ε(u)` contracted against `∇v`, with `ε = (∇u + ∇uᵀ)/2` and the
/// Voigt matrix `C` (diagonal `λ + 2μ`, shear diagonal `μ`) contracted
/// against the tensor strain components, so `σ_ab = μ ε_ab` for `a ≠ b`.
pub fn elasticity_weakform(model: &ElasticityModel, dim: usize, h: f64) -> Result<WeakForm> {
    if !(1..=3).contains(&dim) {
        return Err(Error::InvalidArgument(format!(
            "dimension must be 1, 2, or 3, got {dim}"
        )));
    }
    let lambda = model.lambda;
    let mu = model.mu;
    Ok(WeakForm::from_builder(
        dim,
        dim,
        h,
        true,
        Arc::new(move |_point, weight, h| {
            let d = dim;
            let n = dim;
            let factor = weight * (h / 2.0).powi(d as i32) * (2.0 / h) * (2.0 / h);
            let size = n * (1 + d);
            let mut block = Mat::<f64>::zeros(size, size);
            let grad_slot = |c: usize, a: usize| n + c * d + a;
            // coupling of ∂_b u_j against ∂_a v_i
            for i in 0..n {
                for a in 0..d {
                    for j in 0..n {
                        for b in 0..d {
                            let mut value = 0.0;
                            if a == i && b == j {
                                value += lambda;
                            }
                            if i == a && j == b {
                                // normal stress: σ_ii picks up 2μ ε_ii
                                if i == j {
                                    value += 2.0 * mu;
                                }
                            } else if i != a && j != b {
                                // shear stress: σ_ia = μ ε_ia = μ(∂_a u_i + ∂_i u_a)/2
                                if i == j && a == b {
                                    value += mu / 2.0;
                                }
                                if i == b && j == a {
                                    value += mu / 2.0;
                                }
                            }
                            block[(grad_slot(i, a), grad_slot(j, b))] = factor * value;
                        }
                    }
                }
            }
            block
        }),
    ))
}

/// Dense element operator with its normalized node coordinates.
///
/// Rows and columns are ordered components-outermost, nodes big-endian
/// within each component. `degree` is the per-dimension node count minus
/// one; for macro-elements this is `m·p` rather than a polynomial degree.
#[derive(Debug, Clone)]
pub struct ElementOperator {
    pub matrix: Mat<f64>,
    pub coords: Vec<Vec<f64>>,
    pub components: usize,
    pub degree: usize,
    pub dim: usize,
    pub element_size: f64,
}

impl ElementOperator {
    pub fn size(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn nodes_per_dim(&self) -> usize {
        self.degree + 1
    }
}

/// Assemble `A_e = Bᵀ D B` for a weak form and basis that agree on the
/// dimension.
pub fn element_operator(wf: &WeakForm, basis: &ElementBasis) -> Result<ElementOperator> {
    if wf.dim() != basis.dim {
        return Err(Error::DimensionMismatch(format!(
            "weak form dimension {} vs basis dimension {}",
            wf.dim(),
            basis.dim
        )));
    }
    let n = wf.components();
    let d = basis.dim;
    let node_count = basis.node_count();
    let quad_count = basis.quad_count();
    let kinds = 1 + d;

    let blocks: Vec<Mat<f64>> = (0..quad_count)
        .map(|q| {
            let block = wf.block(&basis.quad_coords(q), basis.quad_weight(q));
            assert_eq!(
                block.nrows(),
                wf.block_size(),
                "weak form block has wrong size"
            );
            block
        })
        .collect();

    // slot (c, κ): κ = 0 is the value, κ = 1 + a the derivative along axis a
    let slot = |c: usize, kind: usize| {
        if kind == 0 {
            c
        } else {
            n + c * d + (kind - 1)
        }
    };
    let kind_rows = |kind: usize| -> faer::MatRef<'_, f64> {
        if kind == 0 {
            basis.interp.as_ref()
        } else {
            basis
                .grad
                .as_ref()
                .submatrix((kind - 1) * quad_count, 0, quad_count, node_count)
        }
    };

    let total = n * node_count;
    let mut matrix = Mat::<f64>::zeros(total, total);
    let mut scaled = Mat::<f64>::zeros(quad_count, node_count);
    for c_row in 0..n {
        for kind_row in 0..kinds {
            for c_col in 0..n {
                for kind_col in 0..kinds {
                    let coeffs: Vec<f64> = blocks
                        .iter()
                        .map(|b| b[(slot(c_row, kind_row), slot(c_col, kind_col))])
                        .collect();
                    if coeffs.iter().all(|&v| v == 0.0) {
                        continue;
                    }
                    let cols = kind_rows(kind_col);
                    for q in 0..quad_count {
                        for j in 0..node_count {
                            scaled[(q, j)] = coeffs[q] * cols[(q, j)];
                        }
                    }
                    let contribution = kind_rows(kind_row).transpose() * scaled.as_ref();
                    for j in 0..node_count {
                        for i in 0..node_count {
                            matrix[(c_row * node_count + i, c_col * node_count + j)] +=
                                contribution[(i, j)];
                        }
                    }
                }
            }
        }
    }

    let coords: Vec<Vec<f64>> = (0..total)
        .map(|row| basis.node_coords(row % node_count))
        .collect();

    Ok(ElementOperator {
        matrix,
        coords,
        components: n,
        degree: basis.degree,
        dim: d,
        element_size: wf.element_size(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_matrix(p: usize, d: usize, h: f64) -> Mat<f64> {
        let basis = ElementBasis::lagrange(p, d).unwrap();
        element_operator(&laplacian_weakform(d, h), &basis)
            .unwrap()
            .matrix
    }

    #[test]
    fn laplacian_1d_linear() {
        let a = laplacian_matrix(1, 1, 1.0);
        let expected = [[1.0, -1.0], [-1.0, 1.0]];
        for i in 0..2 {
            for j in 0..2 {
                assert!((a[(i, j)] - expected[i][j]).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn laplacian_1d_quadratic_matches_printed_matrix() {
        let a = laplacian_matrix(2, 1, 1.0);
        let expected = [
            [7.0 / 3.0, -8.0 / 3.0, 1.0 / 3.0],
            [-8.0 / 3.0, 16.0 / 3.0, -8.0 / 3.0],
            [1.0 / 3.0, -8.0 / 3.0, 7.0 / 3.0],
        ];
        for i in 0..3 {
            for j in 0..3 {
                assert!((a[(i, j)] - expected[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn laplacian_2d_linear_matches_printed_matrix() {
        let a = laplacian_matrix(1, 2, 1.0);
        let expected = [
            [2.0, -0.5, -0.5, -1.0],
            [-0.5, 2.0, -1.0, -0.5],
            [-0.5, -1.0, 2.0, -0.5],
            [-1.0, -0.5, -0.5, 2.0],
        ];
        for i in 0..4 {
            for j in 0..4 {
                assert!((a[(i, j)] - expected[i][j] / 3.0).abs() < 1e-13);
            }
        }
    }

    #[test]
    fn laplacian_scales_inversely_with_h_in_1d() {
        let a1 = laplacian_matrix(3, 1, 1.0);
        let ah = laplacian_matrix(3, 1, 0.25);
        for i in 0..4 {
            for j in 0..4 {
                assert!((ah[(i, j)] - a1[(i, j)] / 0.25).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn lame_parameters() {
        let m = ElasticityModel::new(1.0, 0.3).unwrap();
        assert!((m.lambda - 0.3 / (1.3 * 0.4)).abs() < 1e-15);
        assert!((m.mu - 1.0 / 2.6).abs() < 1e-15);
        assert!(ElasticityModel::new(1.0, 0.5).is_err());
        assert!(ElasticityModel::new(1.0, -0.1).is_err());
        assert!(ElasticityModel::new(0.0, 0.3).is_err());
    }

    #[test]
    fn elasticity_symmetric_zero_row_sums() {
        let model = ElasticityModel::new(1.0, 0.3).unwrap();
        let wf = elasticity_weakform(&model, 3, 1.0).unwrap();
        let basis = ElementBasis::lagrange(1, 3).unwrap();
        let op = element_operator(&wf, &basis).unwrap();
        let a = &op.matrix;
        let size = op.size();
        for i in 0..size {
            for j in 0..size {
                assert!((a[(i, j)] - a[(j, i)]).abs() < 1e-12);
            }
        }
        // rigid translation per component
        for c in 0..3 {
            for i in 0..size {
                let s: f64 = (0..8).map(|j| a[(i, c * 8 + j)]).sum();
                assert!(s.abs() < 1e-12);
            }
        }
    }

    #[test]
    fn elasticity_rotation_nullspace() {
        let model = ElasticityModel::new(1.0, 0.3).unwrap();
        let wf = elasticity_weakform(&model, 3, 1.0).unwrap();
        let basis = ElementBasis::lagrange(2, 3).unwrap();
        let op = element_operator(&wf, &basis).unwrap();
        let nodes = basis.node_count();
        // infinitesimal rotation about axis 2: u = (x1, -x0, 0)
        let mut u = vec![0.0; op.size()];
        for ell in 0..nodes {
            let xc = basis.node_coords(ell);
            u[ell] = xc[1];
            u[nodes + ell] = -xc[0];
        }
        for i in 0..op.size() {
            let mut dot = 0.0;
            for j in 0..op.size() {
                dot += op.matrix[(i, j)] * u[j];
            }
            assert!(dot.abs() < 1e-10, "row {i} residual {dot}");
        }
    }

    #[test]
    fn quadratic_form_positive_semidefinite() {
        let a = laplacian_matrix(4, 2, 1.0);
        let nodes = a.nrows();
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = move || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
        };
        for _ in 0..100 {
            let v: Vec<f64> = (0..nodes).map(|_| next()).collect();
            let mut quad = 0.0;
            for i in 0..nodes {
                for j in 0..nodes {
                    quad += v[i] * a[(i, j)] * v[j];
                }
            }
            assert!(quad >= -1e-12);
        }
    }

    #[test]
    fn scaled_weakform_scales_operator() {
        let wf = laplacian_weakform(1, 1.0);
        let basis = ElementBasis::lagrange(2, 1).unwrap();
        let a = element_operator(&wf, &basis).unwrap().matrix;
        let b = element_operator(&wf.scaled(3.5), &basis).unwrap().matrix;
        for i in 0..3 {
            for j in 0..3 {
                assert!((b[(i, j)] - 3.5 * a[(i, j)]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let wf = laplacian_weakform(2, 1.0);
        let basis = ElementBasis::lagrange(2, 1).unwrap();
        assert!(element_operator(&wf, &basis).is_err());
    }
}
