//! Two-grid error-propagation symbols and LFA convergence factors.
//!
//! The two-grid symbol is
//! `Ẽ(θ) = S̃(θ) (I - P̃(θ) Ã_c^{-1}(θ) R̃(θ) Ã_f(θ)) S̃(θ)`
//! and the predicted convergence factor is the maximum spectral radius over
//! the frequency grid on `[-π/2, 3π/2)^d`. Sweeps share per-frequency work
//! across smoother configurations: with `J = D̃^{-1}Ã_f` diagonalized once,
//! every polynomial smoother acts diagonally in its eigenbasis, and
//! `ρ(S̃ C S̃) = ρ(C' Λ_s^{2ν})` needs one general eigensolve per
//! configuration.

use std::sync::OnceLock;

use faer::{c64, Mat};
use rayon::prelude::*;

use crate::basis::ElementBasis;
use crate::linalg;
use crate::smoother::{
    chebyshev_error_symbol, jacobi_error_symbol, ResolvedSmoother, SmootherKind, SmootherSpec,
};
use crate::symbol::{diagonal_symbol, localization, operator_symbol, Localization, OperatorSymbol};
use crate::transfer::{
    h_macro_element, h_transfer, p_transfer, prolongation_symbol, restriction_symbol, TransferPair,
};
use crate::util::permutations;
use crate::weakform::{element_operator, ElementOperator, WeakForm};
use crate::{Error, Result};

/// Coarsening strategy: lower the polynomial degree on the same element, or
/// merge `m^d` sub-elements into one macro-element.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coarsening {
    PDegree(usize),
    HSubElements(usize),
}

/// Layout of the frequency grid on `[-π/2, 3π/2)^d`.
///
/// `CellCentered` shifts samples half a step off the endpoints, so `θ = 0`
/// (where coarse symbols of second-order operators are singular) is never
/// hit, but neither is any other axis frequency. `Endpoint` starts exactly
/// at `-π/2` and keeps on-axis frequencies such as `(0, π)`, where several
/// configurations attain their worst mode; only a small ball around the
/// origin is excluded. Published convergence-factor tables use endpoint
/// sampling.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    CellCentered,
    Endpoint,
}

/// Radius of the origin ball excluded from endpoint grids; inside it every
/// coarse symbol in this problem family is singular or near-singular.
pub const ORIGIN_EXCLUSION_RADIUS: f64 = std::f64::consts::PI / 128.0;

/// Full configuration of a two-grid analysis.
#[derive(Debug, Clone)]
pub struct TwoGridSpec {
    pub weak_form: WeakForm,
    pub fine_degree: usize,
    pub coarsening: Coarsening,
    pub smoother: SmootherSpec,
    /// Frequency-grid points per dimension.
    pub resolution: usize,
    /// Relative cutoff on the smallest coarse-symbol singular value below
    /// which a frequency is excluded.
    pub cutoff: f64,
    pub grid: GridKind,
}

/// Default grid resolution per dimension: 256 in 1D, 64 in 2D, 16 in 3D.
pub fn default_resolution(dim: usize) -> usize {
    match dim {
        1 => 256,
        2 => 64,
        _ => 16,
    }
}

impl TwoGridSpec {
    pub fn new(
        weak_form: WeakForm,
        fine_degree: usize,
        coarsening: Coarsening,
        smoother: SmootherSpec,
    ) -> Self {
        let resolution = default_resolution(weak_form.dim());
        TwoGridSpec {
            weak_form,
            fine_degree,
            coarsening,
            smoother,
            resolution,
            cutoff: 1e-10,
            grid: GridKind::CellCentered,
        }
    }

    pub fn with_resolution(mut self, resolution: usize) -> Self {
        self.resolution = resolution;
        self
    }

    pub fn with_grid(mut self, grid: GridKind) -> Self {
        self.grid = grid;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.fine_degree == 0 {
            return Err(Error::InvalidArgument("fine degree must be positive".into()));
        }
        match self.coarsening {
            Coarsening::PDegree(pc) => {
                if pc == 0 || pc > self.fine_degree {
                    return Err(Error::InvalidArgument(format!(
                        "coarse degree {pc} must lie in 1..=fine degree {}",
                        self.fine_degree
                    )));
                }
            }
            Coarsening::HSubElements(m) => {
                if m < 2 {
                    return Err(Error::InvalidArgument(
                        "h-coarsening needs at least 2 sub-elements".into(),
                    ));
                }
            }
        }
        if self.resolution < 8 || self.resolution % 2 != 0 {
            return Err(Error::InvalidArgument(format!(
                "resolution must be even and at least 8, got {}",
                self.resolution
            )));
        }
        if !(self.cutoff > 0.0) {
            return Err(Error::InvalidArgument(
                "singular-frequency cutoff must be positive".into(),
            ));
        }
        Ok(())
    }
}

/// Outcome of a frequency sweep for one smoother configuration.
#[derive(Debug, Clone)]
pub struct SweepResult {
    /// `(θ, ρ)` for every non-excluded grid point, in row-major grid order.
    pub table: Vec<(Vec<f64>, f64)>,
    /// `μ = max ρ` over the table.
    pub factor: f64,
    /// Frequency attaining the maximum (first in grid order on ties).
    pub attaining: Vec<f64>,
    /// Number of grid points excluded by the coarse-singularity cutoff.
    pub excluded: usize,
}

/// Cell-centered frequency grid on `[-π/2, 3π/2)^d` in row-major order;
/// avoids sampling `θ = 0` where coarse symbols are singular.
pub fn frequency_grid(dim: usize, resolution: usize) -> Vec<Vec<f64>> {
    let total = resolution.pow(dim as u32);
    (0..total)
        .map(|flat| {
            theta_of_index(
                &crate::util::unrank(flat, dim, resolution),
                resolution,
                GridKind::CellCentered,
            )
        })
        .collect()
}

fn theta_of_index(idx: &[usize], resolution: usize, kind: GridKind) -> Vec<f64> {
    let shift = match kind {
        GridKind::CellCentered => 0.5,
        GridKind::Endpoint => 0.0,
    };
    idx.iter()
        .map(|&j| {
            -std::f64::consts::FRAC_PI_2
                + (j as f64 + shift) * 2.0 * std::f64::consts::PI / resolution as f64
        })
        .collect()
}

fn grid_point_excluded(theta: &[f64], kind: GridKind) -> bool {
    match kind {
        GridKind::CellCentered => false,
        GridKind::Endpoint => {
            let norm: f64 = theta.iter().map(|t| t * t).sum::<f64>().sqrt();
            norm <= ORIGIN_EXCLUSION_RADIUS
        }
    }
}

/// Two-grid analysis engine: element operators, symbols, and transfers are
/// built once, then shared across frequencies and smoother settings.
pub struct TwoGrid {
    smoother: SmootherSpec,
    resolution: usize,
    cutoff: f64,
    grid: GridKind,
    dim: usize,
    axis_symmetric: bool,
    fine_op: ElementOperator,
    fine_loc: Localization,
    fine_symbol: OperatorSymbol,
    fine_diag: Vec<f64>,
    coarse_symbol: OperatorSymbol,
    transfer: TransferPair,
    lambda_hat: OnceLock<f64>,
}

impl TwoGrid {
    pub fn new(spec: &TwoGridSpec) -> Result<TwoGrid> {
        spec.validate()?;
        let d = spec.weak_form.dim();
        let n = spec.weak_form.components();

        let (fine_op, coarse_op, transfer) = match spec.coarsening {
            Coarsening::PDegree(pc) => {
                let fine_basis = ElementBasis::lagrange(spec.fine_degree, d)?;
                let fine_op = element_operator(&spec.weak_form, &fine_basis)?;
                let coarse_basis = ElementBasis::lagrange(pc, d)?;
                let coarse_op = element_operator(&spec.weak_form, &coarse_basis)?;
                let transfer = p_transfer(pc, spec.fine_degree, d, n)?;
                (fine_op, coarse_op, transfer)
            }
            Coarsening::HSubElements(m) => {
                let basis = ElementBasis::lagrange(spec.fine_degree, d)?;
                let h = spec.weak_form.element_size();
                let sub_form = spec.weak_form.with_element_size(h / m as f64);
                let ae_sub = element_operator(&sub_form, &basis)?;
                let fine_op = h_macro_element(&ae_sub, m)?;
                let coarse_op = element_operator(&spec.weak_form, &basis)?;
                let transfer = h_transfer(spec.fine_degree, m, d, n)?;
                (fine_op, coarse_op, transfer)
            }
        };

        let fine_loc = localization(fine_op.degree, d, n);
        let coarse_loc = localization(coarse_op.degree, d, n);
        let fine_diag = diagonal_symbol(&fine_op, &fine_loc)?;
        let fine_symbol = operator_symbol(&fine_op, &fine_loc)?;
        let coarse_symbol = operator_symbol(&coarse_op, &coarse_loc)?;

        Ok(TwoGrid {
            smoother: spec.smoother,
            resolution: spec.resolution,
            cutoff: spec.cutoff,
            grid: spec.grid,
            dim: d,
            axis_symmetric: spec.weak_form.axis_symmetric(),
            fine_op,
            fine_loc,
            fine_symbol,
            fine_diag,
            coarse_symbol,
            transfer,
            lambda_hat: OnceLock::new(),
        })
    }

    pub fn mode_count(&self) -> usize {
        self.fine_symbol.mode_count()
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    /// Estimated maximal eigenvalue of the Jacobi-preconditioned fine
    /// operator, cached after the first call.
    pub fn lambda_hat_max(&self) -> Result<f64> {
        if let Some(&v) = self.lambda_hat.get() {
            return Ok(v);
        }
        let v = crate::smoother::estimate_lambda_max(&self.fine_symbol, &self.fine_diag)?;
        Ok(*self.lambda_hat.get_or_init(|| v))
    }

    fn resolve_smoother(&self, spec: &SmootherSpec) -> Result<(ResolvedSmoother, usize)> {
        let resolved = match spec.kind {
            SmootherKind::Jacobi { .. } => ResolvedSmoother::resolve(&spec.kind, 1.0)?,
            SmootherKind::Chebyshev { .. } => {
                ResolvedSmoother::resolve(&spec.kind, self.lambda_hat_max()?)?
            }
        };
        Ok((resolved, spec.passes))
    }

    /// Coarse-correction symbol `C = I - P̃ Ã_c^{-1} R̃ Ã_f` at `θ`, or
    /// `None` when the coarse symbol fails the invertibility cutoff.
    fn coarse_correction(&self, theta: &[f64], af: &Mat<c64>) -> Result<Option<Mat<c64>>> {
        let ac = self.coarse_symbol.evaluate(theta);
        let (w, v) = linalg::hermitian_eigen(ac.as_ref())?;
        let wmax = w.iter().fold(0.0f64, |acc, &x| acc.max(x.abs()));
        let wmin = w.iter().fold(f64::INFINITY, |acc, &x| acc.min(x.abs()));
        if wmax == 0.0 || wmin <= self.cutoff * wmax {
            return Ok(None);
        }
        let p = prolongation_symbol(&self.transfer, theta);
        let r = restriction_symbol(&self.transfer, theta);
        let raf = &r * af;
        let mut vh_raf = v.adjoint() * &raf;
        for i in 0..vh_raf.nrows() {
            for j in 0..vh_raf.ncols() {
                vh_raf[(i, j)] /= w[i];
            }
        }
        let correction = &v * &vh_raf;
        let mut c = -(&p * &correction);
        let nf = c.nrows();
        for i in 0..nf {
            c[(i, i)] += c64::new(1.0, 0.0);
        }
        Ok(Some(c))
    }

    /// Per-frequency context: eigenvalues of the Jacobi-preconditioned fine
    /// symbol and the coarse correction transformed into its eigenbasis.
    fn frequency_context(&self, theta: &[f64]) -> Result<Option<FreqContext>> {
        let af = self.fine_symbol.evaluate(theta);
        let Some(c) = self.coarse_correction(theta, &af)? else {
            return Ok(None);
        };
        let nf = af.nrows();
        let sqrt_d: Vec<f64> = self.fine_diag.iter().map(|&v| v.sqrt()).collect();
        let h = Mat::from_fn(nf, nf, |i, j| af[(i, j)] / (sqrt_d[i] * sqrt_d[j]));
        let (lambda, u) = linalg::hermitian_eigen(h.as_ref())?;
        // X = D^{-1/2} U diagonalizes J = D^{-1} Ã_f; C' = X^{-1} C X
        let scaled_c = Mat::from_fn(nf, nf, |i, j| c[(i, j)] * sqrt_d[i] / sqrt_d[j]);
        let cprime = u.adjoint() * &scaled_c * &u;
        Ok(Some(FreqContext { lambda, cprime }))
    }

    fn rho_in_context(
        &self,
        ctx: &FreqContext,
        resolved: &ResolvedSmoother,
        passes: usize,
    ) -> Result<f64> {
        let nf = ctx.lambda.len();
        let m = Mat::from_fn(nf, nf, |i, j| {
            let s = resolved.one_pass(ctx.lambda[j]);
            ctx.cprime[(i, j)] * s.powi(2 * passes as i32)
        });
        linalg::spectral_radius(m.as_ref())
    }

    /// Spectral radius of the two-grid symbol at one frequency for the
    /// engine's smoother; `None` when the frequency is excluded.
    pub fn rho_at(&self, theta: &[f64]) -> Result<Option<f64>> {
        let (resolved, passes) = self.resolve_smoother(&self.smoother)?;
        match self.frequency_context(theta)? {
            None => Ok(None),
            Some(ctx) => Ok(Some(self.rho_in_context(&ctx, &resolved, passes)?)),
        }
    }

    /// The two-grid error-propagation symbol
    /// `S̃ (I - P̃ Ã_c^{-1} R̃ Ã_f) S̃` assembled literally; `None` when the
    /// coarse symbol fails the invertibility cutoff.
    pub fn symbol_at(&self, theta: &[f64]) -> Result<Option<Mat<c64>>> {
        let af = self.fine_symbol.evaluate(theta);
        let Some(c) = self.coarse_correction(theta, &af)? else {
            return Ok(None);
        };
        let s = match self.smoother.kind {
            SmootherKind::Jacobi { omega } => jacobi_error_symbol(
                &self.fine_op,
                &self.fine_loc,
                omega,
                self.smoother.passes,
                theta,
            )?,
            SmootherKind::Chebyshev {
                order,
                lower_factor,
                upper_factor,
            } => {
                let lambda_hat = self.lambda_hat_max()?;
                chebyshev_error_symbol(
                    &self.fine_op,
                    &self.fine_loc,
                    order,
                    self.smoother.passes,
                    lower_factor * lambda_hat,
                    upper_factor * lambda_hat,
                    theta,
                )?
            }
        };
        Ok(Some(&s * &c * &s))
    }

    /// Sweep the frequency grid once and report the convergence factor for
    /// every smoother configuration. Frequencies related by `θ → -θ` (and,
    /// for axis-symmetric problems, coordinate permutations) share one
    /// evaluation.
    pub fn sweep_smoothers(&self, smoothers: &[SmootherSpec]) -> Result<Vec<SweepResult>> {
        let configs: Vec<(ResolvedSmoother, usize)> = smoothers
            .iter()
            .map(|s| self.resolve_smoother(s))
            .collect::<Result<_>>()?;

        let resolution = self.resolution;
        let total = resolution.pow(self.dim as u32);
        let perms = if self.axis_symmetric {
            permutations(self.dim)
        } else {
            vec![(0..self.dim).collect()]
        };

        // canonical representative of each grid point under the symmetry group
        let mut canon_of = vec![0usize; total];
        let mut unique: Vec<usize> = Vec::new();
        let mut slot_of = std::collections::HashMap::new();
        for flat in 0..total {
            let idx = crate::util::unrank(flat, self.dim, resolution);
            let canon = canonical_index(&idx, resolution, self.grid, &perms);
            let canon_flat = crate::util::rank(&canon, resolution);
            let slot = *slot_of.entry(canon_flat).or_insert_with(|| {
                unique.push(canon_flat);
                unique.len() - 1
            });
            canon_of[flat] = slot;
        }

        let evaluated: Vec<Option<Vec<f64>>> = unique
            .par_iter()
            .map(|&canon_flat| {
                let idx = crate::util::unrank(canon_flat, self.dim, resolution);
                let theta = theta_of_index(&idx, resolution, self.grid);
                if grid_point_excluded(&theta, self.grid) {
                    return Ok(None);
                }
                match self.frequency_context(&theta)? {
                    None => Ok(None),
                    Some(ctx) => {
                        let rhos = configs
                            .iter()
                            .map(|(resolved, passes)| self.rho_in_context(&ctx, resolved, *passes))
                            .collect::<Result<Vec<f64>>>()?;
                        Ok(Some(rhos))
                    }
                }
            })
            .collect::<Result<_>>()?;

        let mut results = Vec::with_capacity(configs.len());
        for cfg in 0..configs.len() {
            let mut table = Vec::with_capacity(total);
            let mut excluded = 0usize;
            let mut factor = f64::NEG_INFINITY;
            let mut attaining = Vec::new();
            for flat in 0..total {
                let idx = crate::util::unrank(flat, self.dim, resolution);
                let theta = theta_of_index(&idx, resolution, self.grid);
                match &evaluated[canon_of[flat]] {
                    None => excluded += 1,
                    Some(rhos) => {
                        let rho = rhos[cfg];
                        if rho > factor {
                            factor = rho;
                            attaining = theta.clone();
                        }
                        table.push((theta, rho));
                    }
                }
            }
            if table.is_empty() {
                return Err(Error::AllFrequenciesExcluded);
            }
            results.push(SweepResult {
                table,
                factor,
                attaining,
                excluded,
            });
        }
        Ok(results)
    }
}

struct FreqContext {
    lambda: Vec<f64>,
    cprime: Mat<c64>,
}

fn canonical_index(
    idx: &[usize],
    resolution: usize,
    kind: GridKind,
    perms: &[Vec<usize>],
) -> Vec<usize> {
    // index of -θ on the grid: θ_j = -π/2 + (j + shift)·2π/R
    let mirror = |j: usize| match kind {
        GridKind::CellCentered => (3 * resolution / 2 - 1 - j) % resolution,
        GridKind::Endpoint => (3 * resolution / 2 - j) % resolution,
    };
    let mut best: Option<Vec<usize>> = None;
    for perm in perms {
        let permuted: Vec<usize> = perm.iter().map(|&a| idx[a]).collect();
        let mirrored: Vec<usize> = permuted.iter().map(|&j| mirror(j)).collect();
        for candidate in [permuted, mirrored] {
            if best.as_ref().is_none_or(|b| candidate < *b) {
                best = Some(candidate);
            }
        }
    }
    best.unwrap()
}

/// Two-grid error symbol at one frequency; `None` marks an excluded
/// frequency rather than an error.
pub fn two_grid_symbol(spec: &TwoGridSpec, theta: &[f64]) -> Result<Option<Mat<c64>>> {
    TwoGrid::new(spec)?.symbol_at(theta)
}

/// LFA convergence factor: sweep the grid and maximize the spectral radius.
pub fn convergence_factor(spec: &TwoGridSpec) -> Result<SweepResult> {
    let engine = TwoGrid::new(spec)?;
    Ok(engine.sweep_smoothers(&[spec.smoother])?.pop().unwrap())
}

fn omega_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if step <= 0.0 {
        return Err(Error::InvalidArgument("omega step must be positive".into()));
    }
    if stop < start {
        return Err(Error::InvalidArgument("empty omega grid".into()));
    }
    let count = ((stop - start) / step + 1.0 + 1e-9).floor() as usize;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

fn jacobi_specs(spec: &TwoGridSpec, omegas: &[f64]) -> Result<Vec<SmootherSpec>> {
    if !matches!(spec.smoother.kind, SmootherKind::Jacobi { .. }) {
        return Err(Error::InvalidArgument(
            "omega search requires a Jacobi smoother".into(),
        ));
    }
    omegas
        .iter()
        .map(|&omega| SmootherSpec::jacobi(omega, spec.smoother.passes))
        .collect()
}

/// Evaluate the convergence factor on an ω grid and return `(ω_opt, ρ_min)`,
/// ties broken toward smaller ω.
pub fn optimal_omega(spec: &TwoGridSpec, start: f64, stop: f64, step: f64) -> Result<(f64, f64)> {
    let curve = omega_sweep(spec, start, stop, step)?;
    let mut best = curve[0];
    for &(omega, mu) in &curve[1..] {
        if mu < best.1 {
            best = (omega, mu);
        }
    }
    Ok(best)
}

/// The full `(ω, μ)` curve over the ω grid.
pub fn omega_sweep(spec: &TwoGridSpec, start: f64, stop: f64, step: f64) -> Result<Vec<(f64, f64)>> {
    let omegas = omega_grid(start, stop, step)?;
    let engine = TwoGrid::new(spec)?;
    let sweeps = engine.sweep_smoothers(&jacobi_specs(spec, &omegas)?)?;
    Ok(omegas
        .into_iter()
        .zip(sweeps)
        .map(|(omega, sweep)| (omega, sweep.factor))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weakform::laplacian_weakform;

    fn laplacian_spec(
        p_fine: usize,
        p_coarse: usize,
        dim: usize,
        smoother: SmootherSpec,
    ) -> TwoGridSpec {
        TwoGridSpec::new(
            laplacian_weakform(dim, 1.0),
            p_fine,
            Coarsening::PDegree(p_coarse),
            smoother,
        )
    }

    #[test]
    fn grid_is_cell_centered() {
        let grid = frequency_grid(1, 8);
        assert_eq!(grid.len(), 8);
        let step = 2.0 * std::f64::consts::PI / 8.0;
        assert!((grid[0][0] - (-std::f64::consts::FRAC_PI_2 + 0.5 * step)).abs() < 1e-14);
        for theta in &grid {
            assert!(theta[0].abs() > 1e-12, "grid must avoid θ = 0");
        }
    }

    #[test]
    fn mirror_canonicalization_is_involutive() {
        let resolution = 16;
        let perms = permutations(2);
        for flat in 0..resolution * resolution {
            let idx = crate::util::unrank(flat, 2, resolution);
            let canon = canonical_index(&idx, resolution, GridKind::CellCentered, &perms);
            let canon2 = canonical_index(&canon, resolution, GridKind::CellCentered, &perms);
            assert_eq!(canon, canon2);
        }
    }

    #[test]
    fn zero_smoothing_reduces_to_coarse_correction() {
        let spec = laplacian_spec(2, 1, 1, SmootherSpec::jacobi(0.7, 0).unwrap());
        let engine = TwoGrid::new(&spec).unwrap();
        let theta = [1.1];
        let symbol = engine.symbol_at(&theta).unwrap().unwrap();
        let af = engine.fine_symbol.evaluate(&theta);
        let c = engine.coarse_correction(&theta, &af).unwrap().unwrap();
        assert!(crate::linalg::max_abs_diff(symbol.as_ref(), c.as_ref()) < 1e-13);
    }

    #[test]
    fn matched_degrees_give_exact_solver() {
        let spec = laplacian_spec(3, 3, 1, SmootherSpec::jacobi(0.8, 1).unwrap());
        let result = convergence_factor(&spec).unwrap();
        assert!(result.factor < 1e-10, "mu = {}", result.factor);
    }

    #[test]
    fn fast_path_matches_direct_symbol() {
        for smoother in [
            SmootherSpec::jacobi(0.63, 1).unwrap(),
            SmootherSpec::jacobi(0.8, 2).unwrap(),
            SmootherSpec::chebyshev(3, 0.1, 1.0, 1).unwrap(),
        ] {
            let spec = laplacian_spec(4, 2, 1, smoother);
            let engine = TwoGrid::new(&spec).unwrap();
            for theta in [[0.53], [-1.21], [2.74]] {
                let direct = engine.symbol_at(&theta).unwrap().unwrap();
                let rho_direct = crate::linalg::spectral_radius(direct.as_ref()).unwrap();
                let rho_fast = engine.rho_at(&theta).unwrap().unwrap();
                assert!(
                    (rho_direct - rho_fast).abs() < 1e-10,
                    "θ={theta:?}: {rho_direct} vs {rho_fast}"
                );
            }
        }
    }

    #[test]
    fn fast_path_matches_direct_symbol_2d() {
        let spec = laplacian_spec(2, 1, 2, SmootherSpec::chebyshev(2, 0.1, 1.0, 1).unwrap());
        let engine = TwoGrid::new(&spec).unwrap();
        for theta in [[0.53, -0.9], [2.1, 0.77]] {
            let direct = engine.symbol_at(&theta).unwrap().unwrap();
            let rho_direct = crate::linalg::spectral_radius(direct.as_ref()).unwrap();
            let rho_fast = engine.rho_at(&theta).unwrap().unwrap();
            assert!((rho_direct - rho_fast).abs() < 1e-10);
        }
    }

    #[test]
    fn table1_first_row() {
        let spec = laplacian_spec(2, 1, 1, SmootherSpec::jacobi(0.63, 1).unwrap());
        let result = convergence_factor(&spec).unwrap();
        assert!(
            (result.factor - 0.137).abs() < 0.005,
            "mu = {}",
            result.factor
        );
    }

    #[test]
    fn optimal_omega_first_row() {
        let spec = laplacian_spec(2, 1, 1, SmootherSpec::jacobi(1.0, 1).unwrap());
        let (omega, mu) = optimal_omega(&spec, 0.3, 1.1, 0.01).unwrap();
        assert!((omega - 0.63).abs() < 0.015, "omega = {omega}");
        assert!((mu - 0.137).abs() < 0.005, "mu = {mu}");
    }

    #[test]
    fn omega_zero_gives_unit_factor() {
        for (pf, pc) in [(2, 1), (4, 2)] {
            let spec = laplacian_spec(pf, pc, 1, SmootherSpec::jacobi(0.0, 1).unwrap());
            let result = convergence_factor(&spec).unwrap();
            assert!(
                (result.factor - 1.0).abs() < 1e-9,
                "p{pf}->p{pc}: mu = {}",
                result.factor
            );
        }
    }

    #[test]
    fn sweep_rejects_empty_grid() {
        let spec = laplacian_spec(2, 1, 1, SmootherSpec::jacobi(0.5, 1).unwrap());
        assert!(omega_sweep(&spec, 1.0, 0.5, 0.1).is_err());
        assert!(omega_sweep(&spec, 0.5, 1.0, 0.0).is_err());
    }

    #[test]
    fn scale_invariance_of_factor() {
        let smoother = SmootherSpec::chebyshev(2, 0.1, 1.0, 1).unwrap();
        let base = laplacian_spec(4, 2, 1, smoother).with_resolution(64);
        let mut scaled = base.clone();
        scaled.weak_form = scaled.weak_form.scaled(37.5);
        let mu_base = convergence_factor(&base).unwrap().factor;
        let mu_scaled = convergence_factor(&scaled).unwrap().factor;
        assert!((mu_base - mu_scaled).abs() < 1e-10);
    }

    #[test]
    fn excluded_frequencies_are_counted() {
        // enormous cutoff excludes everything
        let mut spec = laplacian_spec(2, 1, 1, SmootherSpec::jacobi(0.63, 1).unwrap());
        spec.cutoff = 1e6;
        assert!(matches!(
            convergence_factor(&spec),
            Err(Error::AllFrequenciesExcluded)
        ));
    }
}
