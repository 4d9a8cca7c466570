//! Fourier mode localization and symbols of element-localized operators.
//!
//! On the infinite uniform grid, nodes on shared element boundaries carry
//! the same Fourier mode. The localization operator `Q` maps all element
//! nodes onto the `p^d` modes unique to one element; the symbol of an
//! element operator is `Ã(θ) = Qᵀ (A_e ⊙ [e^{i(x_j - x_i)·θ}]) Q` with node
//! coordinates normalized by the element size.

use faer::{c64, Mat};

use crate::util::{rank, unrank};
use crate::weakform::ElementOperator;
use crate::{Error, Result};

/// Node-to-mode localization `Q = I_n ⊗ (Q1d ⊗ … ⊗ Q1d)` where
/// `Q1d` stacks the `p × p` identity over the first unit row.
#[derive(Debug, Clone)]
pub struct Localization {
    map: Vec<usize>,
    node_count: usize,
    mode_count: usize,
    pub components: usize,
    pub degree: usize,
    pub dim: usize,
}

/// Build the localization for `degree` nodes-per-dim minus one, dimension
/// `dim`, and `components` field components.
pub fn localization(degree: usize, dim: usize, components: usize) -> Localization {
    assert!(degree >= 1, "localization requires degree >= 1");
    let nodes = (degree + 1).pow(dim as u32);
    let modes = degree.pow(dim as u32);
    let mut map = Vec::with_capacity(components * nodes);
    for c in 0..components {
        for node in 0..nodes {
            let digits = unrank(node, dim, degree + 1);
            let folded: Vec<usize> = digits.iter().map(|&g| g % degree).collect();
            map.push(c * modes + rank(&folded, degree));
        }
    }
    Localization {
        map,
        node_count: components * nodes,
        mode_count: components * modes,
        components,
        degree,
        dim,
    }
}

impl Localization {
    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn mode_count(&self) -> usize {
        self.mode_count
    }

    /// Mode index of a node row.
    pub fn mode_of(&self, node: usize) -> usize {
        self.map[node]
    }

    /// Dense 0/1 matrix form of `Q`.
    pub fn matrix(&self) -> Mat<f64> {
        let mut q = Mat::<f64>::zeros(self.node_count, self.mode_count);
        for (node, &mode) in self.map.iter().enumerate() {
            q[(node, mode)] = 1.0;
        }
        q
    }

    /// Diagonal of `QᵀQ`: how many element nodes share each mode.
    pub fn multiplicities(&self) -> Vec<f64> {
        let mut mult = vec![0.0; self.mode_count];
        for &mode in &self.map {
            mult[mode] += 1.0;
        }
        mult
    }

    /// `Qᵀ M Q` by scatter-accumulation.
    pub fn fold(&self, m: &Mat<c64>) -> Mat<c64> {
        let mut out = Mat::<c64>::zeros(self.mode_count, self.mode_count);
        for j in 0..self.node_count {
            let mj = self.map[j];
            for i in 0..self.node_count {
                out[(self.map[i], mj)] += m[(i, j)];
            }
        }
        out
    }
}

/// Symbol of an element operator: a matrix-valued, `2π`-periodic function
/// of the frequency `θ`.
#[derive(Debug, Clone)]
pub struct OperatorSymbol {
    matrix: Mat<f64>,
    coords: Vec<Vec<f64>>,
    loc: Localization,
}

/// Localize an element operator; sizes must agree.
pub fn operator_symbol(ae: &ElementOperator, loc: &Localization) -> Result<OperatorSymbol> {
    if ae.size() != loc.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "element operator size {} vs localization node count {}",
            ae.size(),
            loc.node_count()
        )));
    }
    Ok(OperatorSymbol {
        matrix: ae.matrix.clone(),
        coords: ae.coords.clone(),
        loc: loc.clone(),
    })
}

impl OperatorSymbol {
    pub fn mode_count(&self) -> usize {
        self.loc.mode_count()
    }

    pub fn components(&self) -> usize {
        self.loc.components
    }

    pub fn degree(&self) -> usize {
        self.loc.degree
    }

    pub fn dim(&self) -> usize {
        self.loc.dim
    }

    /// Evaluate `Ã(θ)`. Allocates a fresh matrix; safe to call concurrently.
    pub fn evaluate(&self, theta: &[f64]) -> Mat<c64> {
        assert_eq!(theta.len(), self.loc.dim, "theta dimension mismatch");
        let n = self.matrix.nrows();
        // phase vector: entry (i,j) of the pointwise factor is φ_j conj(φ_i)
        let phases: Vec<c64> = (0..n)
            .map(|i| {
                let x = &self.coords[i];
                let arg: f64 = x.iter().zip(theta).map(|(&xi, &ti)| xi * ti).sum();
                c64::new(arg.cos(), arg.sin())
            })
            .collect();
        let mut localized = Mat::<c64>::zeros(n, n);
        for j in 0..n {
            for i in 0..n {
                localized[(i, j)] = self.matrix[(i, j)] * phases[j] * phases[i].conj();
            }
        }
        self.loc.fold(&localized)
    }
}

/// Eigenvalues of the symbol at `θ`, ascending; real because the element
/// operators of self-adjoint forms yield Hermitian symbols.
pub fn symbol_eigenvalues(symbol: &OperatorSymbol, theta: &[f64]) -> Result<Vec<f64>> {
    crate::linalg::hermitian_eigenvalues(symbol.evaluate(theta).as_ref())
}

/// `Qᵀ diag(A_e) Q`: the θ-independent diagonal used by Jacobi smoothing.
/// Returned as the diagonal entries; any zero entry is rejected since it
/// leaves the Jacobi preconditioner undefined.
pub fn diagonal_symbol(ae: &ElementOperator, loc: &Localization) -> Result<Vec<f64>> {
    if ae.size() != loc.node_count() {
        return Err(Error::DimensionMismatch(format!(
            "element operator size {} vs localization node count {}",
            ae.size(),
            loc.node_count()
        )));
    }
    let mut diag = vec![0.0; loc.mode_count()];
    for i in 0..ae.size() {
        diag[loc.mode_of(i)] += ae.matrix[(i, i)];
    }
    if diag.iter().any(|&v| v == 0.0) {
        return Err(Error::SingularDiagonal);
    }
    Ok(diag)
}
