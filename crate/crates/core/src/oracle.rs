//! Periodic-grid reference implementation.
//!
//! Assembling `N^d` elements with periodic node identification yields a
//! block-circulant operator whose spectrum must equal the union of the
//! symbol eigenvalues over the discrete frequencies `2πk/N`: this is the
//! primary correctness oracle for the symbol machinery. The same assembly
//! drives an actual two-grid iteration to measure convergence factors
//! against LFA predictions.

use faer::Mat;

use crate::basis::ElementBasis;
use crate::linalg;
use crate::smoother::{ResolvedSmoother, SmootherKind};
use crate::symbol::OperatorSymbol;
use crate::transfer::TransferPair;
use crate::twogrid::{Coarsening, TwoGrid, TwoGridSpec};
use crate::util::{multi_indices, rank, unrank};
use crate::weakform::{element_operator, ElementOperator, WeakForm};
use crate::{Error, Result};

/// Dense assembly cap: the oracle is a reference implementation, not a
/// production solver.
pub const MAX_PERIODIC_UNKNOWNS: usize = 20_000;

/// A PDE operator assembled on a periodic grid of `elements^d` elements.
#[derive(Debug, Clone)]
pub struct PeriodicProblem {
    pub matrix: Mat<f64>,
    pub elements: usize,
    /// Per-dimension node count of one element cell, minus one.
    pub degree: usize,
    pub dim: usize,
    pub components: usize,
}

impl PeriodicProblem {
    /// Unknowns per component, `(N·p)^d`.
    pub fn nodes_per_component(&self) -> usize {
        (self.elements * self.degree).pow(self.dim as u32)
    }

    pub fn size(&self) -> usize {
        self.components * self.nodes_per_component()
    }
}

/// Assemble a weak form over `elements^d` periodic elements.
pub fn assemble_periodic(
    wf: &WeakForm,
    basis: &ElementBasis,
    elements: usize,
) -> Result<PeriodicProblem> {
    let ae = element_operator(wf, basis)?;
    assemble_periodic_operator(&ae, elements)
}

/// Assemble copies of an element operator (possibly a macro-element) over a
/// periodic grid.
pub fn assemble_periodic_operator(
    ae: &ElementOperator,
    elements: usize,
) -> Result<PeriodicProblem> {
    if elements < 3 {
        return Err(Error::InvalidArgument(
            "periodic assembly needs at least 3 elements per dimension".into(),
        ));
    }
    let d = ae.dim;
    let n = ae.components;
    let p = ae.degree;
    let grid = elements * p;
    let nodes_per_component = grid.pow(d as u32);
    let size = n * nodes_per_component;
    if size > MAX_PERIODIC_UNKNOWNS {
        return Err(Error::InvalidArgument(format!(
            "periodic problem has {size} unknowns, above the cap of {MAX_PERIODIC_UNKNOWNS}"
        )));
    }
    let element_nodes = ae.nodes_per_dim().pow(d as u32);
    let mut matrix = Mat::<f64>::zeros(size, size);
    for cell in multi_indices(d, elements) {
        let global: Vec<usize> = (0..element_nodes)
            .map(|local| {
                let digits = unrank(local, d, p + 1);
                let global_digits: Vec<usize> = digits
                    .iter()
                    .zip(&cell)
                    .map(|(&i, &e)| (e * p + i) % grid)
                    .collect();
                rank(&global_digits, grid)
            })
            .collect();
        for ci in 0..n {
            for cj in 0..n {
                for (i, &gi) in global.iter().enumerate() {
                    for (j, &gj) in global.iter().enumerate() {
                        matrix[(ci * nodes_per_component + gi, cj * nodes_per_component + gj)] +=
                            ae.matrix[(ci * element_nodes + i, cj * element_nodes + j)];
                    }
                }
            }
        }
    }
    Ok(PeriodicProblem {
        matrix,
        elements,
        degree: p,
        dim: d,
        components: n,
    })
}

/// Compare the eigenvalue multiset of the assembled operator against the
/// union of symbol eigenvalues over the discrete frequencies `2πk/N`, and
/// return the largest mismatch between the sorted lists.
pub fn circulant_eig_check(problem: &PeriodicProblem, symbol: &OperatorSymbol) -> Result<f64> {
    if symbol.mode_count() * problem.elements.pow(problem.dim as u32) != problem.size() {
        return Err(Error::DimensionMismatch(format!(
            "symbol modes {} incompatible with assembled size {}",
            symbol.mode_count(),
            problem.size()
        )));
    }
    let mut assembled = linalg::symmetric_eigenvalues(problem.matrix.as_ref())?;
    assembled.sort_by(|a, b| a.partial_cmp(b).unwrap());

    let mut predicted = Vec::with_capacity(problem.size());
    for k in multi_indices(problem.dim, problem.elements) {
        let theta: Vec<f64> = k
            .iter()
            .map(|&ki| 2.0 * std::f64::consts::PI * ki as f64 / problem.elements as f64)
            .collect();
        let a = symbol.evaluate(&theta);
        predicted.extend(linalg::hermitian_eigenvalues(a.as_ref())?);
    }
    predicted.sort_by(|a, b| a.partial_cmp(b).unwrap());

    Ok(assembled
        .iter()
        .zip(&predicted)
        .map(|(a, p)| (a - p).abs())
        .fold(0.0, f64::max))
}

/// Assemble the global prolongation from an element transfer pair: each of
/// the `cells^d` cells scatters `P_e`, and the multiplicity scaling makes
/// shared-node contributions sum to the coarse-basis interpolant.
fn assemble_prolongation(tp: &TransferPair, cells: usize, dim: usize, components: usize) -> Mat<f64> {
    let fine_deg = tp.fine_loc.degree;
    let coarse_deg = tp.coarse_loc.degree;
    let fine_grid = cells * fine_deg;
    let coarse_grid = cells * coarse_deg;
    let fine_per_component = fine_grid.pow(dim as u32);
    let coarse_per_component = coarse_grid.pow(dim as u32);
    let fine_nodes_el = (fine_deg + 1).pow(dim as u32);
    let coarse_nodes_el = (coarse_deg + 1).pow(dim as u32);

    let mut out = Mat::<f64>::zeros(
        components * fine_per_component,
        components * coarse_per_component,
    );
    for cell in multi_indices(dim, cells) {
        for i in 0..fine_nodes_el {
            let fine_digits = unrank(i, dim, fine_deg + 1);
            let gf = rank(
                &fine_digits
                    .iter()
                    .zip(&cell)
                    .map(|(&ii, &e)| (e * fine_deg + ii) % fine_grid)
                    .collect::<Vec<_>>(),
                fine_grid,
            );
            for j in 0..coarse_nodes_el {
                let coarse_digits = unrank(j, dim, coarse_deg + 1);
                let gc = rank(
                    &coarse_digits
                        .iter()
                        .zip(&cell)
                        .map(|(&jj, &e)| (e * coarse_deg + jj) % coarse_grid)
                        .collect::<Vec<_>>(),
                    coarse_grid,
                );
                for c in 0..components {
                    out[(c * fine_per_component + gf, c * coarse_per_component + gc)] +=
                        tp.matrix[(c * fine_nodes_el + i, c * coarse_nodes_el + j)];
                }
            }
        }
    }
    out
}

/// Measured asymptotic two-grid convergence on the periodic problem.
#[derive(Debug, Clone)]
pub struct MeasuredFactor {
    /// Worst geometric-mean factor over the trials.
    pub factor: f64,
    pub per_trial: Vec<f64>,
    pub elements: usize,
    pub iterations: usize,
}

struct SplitMix64(u64);

impl SplitMix64 {
    fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    /// Uniform in [-0.5, 0.5).
    fn next_centered(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    }
}

fn matvec(m: &Mat<f64>, v: &[f64], out: &mut [f64]) {
    for (i, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for (j, &vj) in v.iter().enumerate() {
            acc += m[(i, j)] * vj;
        }
        *o = acc;
    }
}

fn matvec_transpose(m: &Mat<f64>, v: &[f64], out: &mut [f64]) {
    out.iter_mut().for_each(|o| *o = 0.0);
    for (j, &vj) in v.iter().enumerate() {
        if vj != 0.0 {
            for (i, o) in out.iter_mut().enumerate() {
                *o += m[(j, i)] * vj;
            }
        }
    }
}

fn project_constants(e: &mut [f64], components: usize) {
    let per = e.len() / components;
    for c in 0..components {
        let slice = &mut e[c * per..(c + 1) * per];
        let mean = slice.iter().sum::<f64>() / per as f64;
        for v in slice {
            *v -= mean;
        }
    }
}

fn norm(e: &[f64]) -> f64 {
    e.iter().map(|v| v * v).sum::<f64>().sqrt()
}

struct AssembledSmoother {
    inv_diag: Vec<f64>,
    resolved: ResolvedSmoother,
    passes: usize,
}

impl AssembledSmoother {
    fn apply(&self, matrix: &Mat<f64>, e: &mut Vec<f64>, work: &mut Vec<f64>) {
        let n = e.len();
        for _ in 0..self.passes {
            match &self.resolved {
                ResolvedSmoother::Jacobi { omega } => {
                    matvec(matrix, e, work);
                    for i in 0..n {
                        e[i] -= omega * self.inv_diag[i] * work[i];
                    }
                }
                ResolvedSmoother::Chebyshev(coeffs) => {
                    let k = coeffs.order();
                    let mut prev = e.clone();
                    matvec(matrix, e, work);
                    let mut cur: Vec<f64> = (0..n)
                        .map(|i| e[i] - self.inv_diag[i] * work[i] / coeffs.alpha)
                        .collect();
                    for step in 2..=k {
                        matvec(matrix, &cur, work);
                        let next: Vec<f64> = (0..n)
                            .map(|i| {
                                (self.inv_diag[i] * work[i]
                                    - coeffs.alpha * cur[i]
                                    - coeffs.beta[step - 2] * prev[i])
                                    / coeffs.gamma[step - 1]
                            })
                            .collect();
                        prev = cur;
                        cur = next;
                    }
                    *e = cur;
                }
            }
        }
    }
}

/// Run the actual two-grid cycle (smooth, restrict the residual, solve the
/// coarse problem by pseudo-inverse, prolong, smooth) on a random initial
/// error with zero right-hand side, projecting out the per-component
/// constant nullspace each iteration. Returns the geometric mean of the
/// last five error ratios, maximized over trials.
pub fn measured_two_grid_factor(
    spec: &TwoGridSpec,
    elements: usize,
    iterations: usize,
    trials: usize,
) -> Result<MeasuredFactor> {
    if iterations < 20 {
        return Err(Error::InvalidArgument(
            "need at least 20 iterations for an asymptotic estimate".into(),
        ));
    }
    if trials == 0 {
        return Err(Error::InvalidArgument("need at least one trial".into()));
    }
    let d = spec.weak_form.dim();
    let n = spec.weak_form.components();

    // element-level pieces matching the LFA configuration
    let engine = TwoGrid::new(spec)?;
    let (fine, coarse, prolong) = match spec.coarsening {
        Coarsening::PDegree(pc) => {
            let fine_basis = ElementBasis::lagrange(spec.fine_degree, d)?;
            let fine = assemble_periodic(&spec.weak_form, &fine_basis, elements)?;
            let coarse_basis = ElementBasis::lagrange(pc, d)?;
            let coarse = assemble_periodic(&spec.weak_form, &coarse_basis, elements)?;
            let tp = crate::transfer::p_transfer(pc, spec.fine_degree, d, n)?;
            let prolong = assemble_prolongation(&tp, elements, d, n);
            (fine, coarse, prolong)
        }
        Coarsening::HSubElements(m) => {
            let basis = ElementBasis::lagrange(spec.fine_degree, d)?;
            let h = spec.weak_form.element_size();
            let sub_form = spec.weak_form.with_element_size(h / m as f64);
            let ae_sub = element_operator(&sub_form, &basis)?;
            let fine = assemble_periodic_operator(&ae_sub, elements * m)?;
            let coarse = assemble_periodic(&spec.weak_form, &basis, elements)?;
            let tp = crate::transfer::h_transfer(spec.fine_degree, m, d, n)?;
            let prolong = assemble_prolongation(&tp, elements, d, n);
            (fine, coarse, prolong)
        }
    };

    let size = fine.size();
    let diag: Vec<f64> = (0..size).map(|i| fine.matrix[(i, i)]).collect();
    if diag.iter().any(|&v| v == 0.0) {
        return Err(Error::SingularDiagonal);
    }
    let resolved = match spec.smoother.kind {
        SmootherKind::Jacobi { .. } => ResolvedSmoother::resolve(&spec.smoother.kind, 1.0)?,
        SmootherKind::Chebyshev { .. } => {
            // interval pinned from the LFA eigenvalue estimate, as a solver
            // stack would configure its Chebyshev smoother
            ResolvedSmoother::resolve(&spec.smoother.kind, engine.lambda_hat_max()?)?
        }
    };
    let smoother = AssembledSmoother {
        inv_diag: diag.iter().map(|&v| 1.0 / v).collect(),
        resolved,
        passes: spec.smoother.passes,
    };

    // nullspace-aware coarse solve
    let (w, v) = linalg::symmetric_eigen(coarse.matrix.as_ref())?;
    let wmax = w.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
    let inv_w: Vec<f64> = w
        .iter()
        .map(|&x| if x.abs() > 1e-10 * wmax { 1.0 / x } else { 0.0 })
        .collect();
    let coarse_size = coarse.size();

    let mut per_trial = Vec::with_capacity(trials);
    for trial in 0..trials {
        let mut rng = SplitMix64(0x5eed + trial as u64);
        let mut e: Vec<f64> = (0..size).map(|_| rng.next_centered()).collect();
        project_constants(&mut e, n);
        let scale = norm(&e);
        e.iter_mut().for_each(|x| *x /= scale);

        let mut work = vec![0.0; size];
        let mut residual = vec![0.0; size];
        let mut coarse_rhs = vec![0.0; coarse_size];
        let mut coarse_tmp = vec![0.0; coarse_size];
        let mut coarse_sol = vec![0.0; coarse_size];
        let mut ratios: Vec<f64> = Vec::with_capacity(iterations);

        for _ in 0..iterations {
            smoother.apply(&fine.matrix, &mut e, &mut work);
            matvec(&fine.matrix, &e, &mut residual);
            matvec_transpose(&prolong, &residual, &mut coarse_rhs);
            // pseudo-inverse via the symmetric eigendecomposition
            matvec_transpose(&v, &coarse_rhs, &mut coarse_tmp);
            for (t, iw) in coarse_tmp.iter_mut().zip(&inv_w) {
                *t *= iw;
            }
            matvec(&v, &coarse_tmp, &mut coarse_sol);
            matvec(&prolong, &coarse_sol, &mut work);
            for i in 0..size {
                e[i] -= work[i];
            }
            smoother.apply(&fine.matrix, &mut e, &mut work);
            project_constants(&mut e, n);
            let ratio = norm(&e);
            ratios.push(ratio);
            if ratio >= 1e12 {
                break;
            }
            if ratio > 0.0 {
                e.iter_mut().for_each(|x| *x /= ratio);
            }
        }
        let tail = ratios.iter().rev().take(5).collect::<Vec<_>>();
        let factor =
            (tail.iter().map(|r| r.ln()).sum::<f64>() / tail.len() as f64).exp();
        per_trial.push(factor);
    }

    let factor = per_trial.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    Ok(MeasuredFactor {
        factor,
        per_trial,
        elements,
        iterations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::smoother::SmootherSpec;
    use crate::symbol::{localization, operator_symbol};
    use crate::weakform::laplacian_weakform;

    #[test]
    fn periodic_linear_laplacian_is_circulant() {
        let basis = ElementBasis::lagrange(1, 1).unwrap();
        let problem = assemble_periodic(&laplacian_weakform(1, 1.0), &basis, 4).unwrap();
        let expected = [2.0, -1.0, 0.0, -1.0];
        for j in 0..4 {
            assert!((problem.matrix[(0, j)] - expected[j]).abs() < 1e-13);
        }
        // rows are rotations
        for i in 0..4 {
            for j in 0..4 {
                assert!(
                    (problem.matrix[(i, j)] - expected[(j + 4 - i) % 4]).abs() < 1e-13
                );
            }
        }
        let eigs = linalg::symmetric_eigenvalues(problem.matrix.as_ref()).unwrap();
        let expected_eigs = [0.0, 2.0, 2.0, 4.0];
        for (a, b) in eigs.iter().zip(expected_eigs) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn periodic_rows_sum_to_zero() {
        let basis = ElementBasis::lagrange(3, 1).unwrap();
        let problem = assemble_periodic(&laplacian_weakform(1, 1.0), &basis, 5).unwrap();
        for i in 0..problem.size() {
            let s: f64 = (0..problem.size()).map(|j| problem.matrix[(i, j)]).sum();
            assert!(s.abs() < 1e-12);
        }
    }

    #[test]
    fn circulant_check_1d() {
        for (p, n_el) in [(1, 8), (4, 6)] {
            let basis = ElementBasis::lagrange(p, 1).unwrap();
            let problem = assemble_periodic(&laplacian_weakform(1, 1.0), &basis, n_el).unwrap();
            let ae = element_operator(&laplacian_weakform(1, 1.0), &basis).unwrap();
            let loc = localization(p, 1, 1);
            let symbol = operator_symbol(&ae, &loc).unwrap();
            let mismatch = circulant_eig_check(&problem, &symbol).unwrap();
            assert!(mismatch < 1e-10, "p={p} N={n_el}: {mismatch}");
        }
    }

    #[test]
    fn circulant_check_2d() {
        let basis = ElementBasis::lagrange(2, 2).unwrap();
        let problem = assemble_periodic(&laplacian_weakform(2, 1.0), &basis, 4).unwrap();
        let ae = element_operator(&laplacian_weakform(2, 1.0), &basis).unwrap();
        let loc = localization(2, 2, 1);
        let symbol = operator_symbol(&ae, &loc).unwrap();
        let mismatch = circulant_eig_check(&problem, &symbol).unwrap();
        assert!(mismatch < 1e-9, "{mismatch}");
    }

    #[test]
    fn circulant_check_macro_element() {
        // a periodic chain of N macro-elements is the same operator as
        // N*m sub-elements, so the macro symbol must reproduce its spectrum
        let basis = ElementBasis::lagrange(2, 1).unwrap();
        let ae_sub = element_operator(&laplacian_weakform(1, 0.5), &basis).unwrap();
        let problem = assemble_periodic_operator(&ae_sub, 10).unwrap();
        let macro_op = crate::transfer::h_macro_element(&ae_sub, 2).unwrap();
        let loc = localization(4, 1, 1);
        let symbol = operator_symbol(&macro_op, &loc).unwrap();
        // five macro cells of four modes each
        let macro_problem = PeriodicProblem {
            matrix: problem.matrix.clone(),
            elements: 5,
            degree: 4,
            dim: 1,
            components: 1,
        };
        let mismatch = circulant_eig_check(&macro_problem, &symbol).unwrap();
        assert!(mismatch < 1e-10, "{mismatch}");
    }

    #[test]
    fn measured_factor_3d_low_order() {
        let spec = TwoGridSpec::new(
            laplacian_weakform(3, 1.0),
            2,
            Coarsening::PDegree(1),
            SmootherSpec::jacobi(1.0, 1).unwrap(),
        );
        let measured = measured_two_grid_factor(&spec, 4, 40, 2).unwrap();
        assert!(
            (measured.factor - 0.312).abs() <= 0.03,
            "measured {}",
            measured.factor
        );
    }

    #[test]
    fn assembled_prolongation_preserves_constants() {
        let tp = crate::transfer::p_transfer(2, 4, 1, 1).unwrap();
        let p = assemble_prolongation(&tp, 5, 1, 1);
        for i in 0..p.nrows() {
            let s: f64 = (0..p.ncols()).map(|j| p[(i, j)]).sum();
            assert!((s - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn size_cap_enforced() {
        let basis = ElementBasis::lagrange(8, 2).unwrap();
        let err = assemble_periodic(&laplacian_weakform(2, 1.0), &basis, 20).unwrap_err();
        let text = err.to_string();
        assert!(text.contains("20000"), "{text}");
    }

    #[test]
    fn measured_factor_matches_lfa_linear_case() {
        let spec = TwoGridSpec::new(
            laplacian_weakform(1, 1.0),
            2,
            Coarsening::PDegree(1),
            SmootherSpec::jacobi(0.63, 1).unwrap(),
        );
        let predicted = crate::twogrid::convergence_factor(&spec).unwrap().factor;
        let measured = measured_two_grid_factor(&spec, 32, 50, 3).unwrap();
        assert!(
            (measured.factor - predicted).abs() <= 0.02 + 0.05 * predicted,
            "measured {} vs predicted {predicted}",
            measured.factor
        );
    }

    #[test]
    fn measured_factor_h_multigrid() {
        let spec = TwoGridSpec::new(
            laplacian_weakform(1, 1.0),
            1,
            Coarsening::HSubElements(2),
            SmootherSpec::jacobi(2.0 / 3.0, 1).unwrap(),
        );
        let predicted = crate::twogrid::convergence_factor(&spec).unwrap().factor;
        let measured = measured_two_grid_factor(&spec, 16, 50, 3).unwrap();
        assert!(
            (measured.factor - predicted).abs() <= 0.02 + 0.05 * predicted,
            "measured {} vs predicted {predicted}",
            measured.factor
        );
    }

    #[test]
    fn divergent_configuration_measures_above_one() {
        let spec = TwoGridSpec::new(
            laplacian_weakform(1, 1.0),
            4,
            Coarsening::PDegree(2),
            SmootherSpec::jacobi(1.0, 1).unwrap(),
        );
        let measured = measured_two_grid_factor(&spec, 16, 40, 1).unwrap();
        assert!(measured.factor > 1.0, "factor {}", measured.factor);
    }

    #[test]
    fn projection_keeps_error_orthogonal_to_constants() {
        let mut rng = SplitMix64(7);
        let mut e: Vec<f64> = (0..64).map(|_| rng.next_centered()).collect();
        project_constants(&mut e, 2);
        for c in 0..2 {
            let mean: f64 = e[c * 32..(c + 1) * 32].iter().sum::<f64>() / 32.0;
            assert!(mean.abs() < 1e-10);
        }
    }
}
