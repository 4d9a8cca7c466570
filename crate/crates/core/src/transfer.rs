//! Grid-transfer element operators and their symbols for p-multigrid and
//! macro-element h-multigrid.
//!
//! Prolongation evaluates the coarse basis at the fine nodes and corrects
//! for node multiplicity across element interfaces:
//! `P_e = D_scale · B_ctof`. Restriction is the transpose. Symbols follow
//! the same localization pattern as operator symbols, with fine and coarse
//! node coordinates expressed in one shared element frame.

use faer::{c64, Mat};

use crate::basis::{gauss_lobatto_points, lagrange_matrices};
use crate::symbol::{localization, Localization};
use crate::util::{kron_all, unrank};
use crate::weakform::ElementOperator;
use crate::{Error, Result};

/// Element prolongation `P_e` together with the localizations and node
/// coordinates needed to form its symbol. Restriction is `P_eᵀ`.
#[derive(Debug, Clone)]
pub struct TransferPair {
    /// `D_scale · B_ctof`, replicated over components.
    pub matrix: Mat<f64>,
    /// Coarse-to-fine interpolation for one component (no scaling).
    pub interpolation: Mat<f64>,
    /// Reciprocal fine-node multiplicities (one component).
    pub scaling: Vec<f64>,
    pub fine_coords: Vec<Vec<f64>>,
    pub coarse_coords: Vec<Vec<f64>>,
    pub fine_loc: Localization,
    pub coarse_loc: Localization,
}

fn node_multiplicity(digits: &[usize], last: usize) -> f64 {
    digits
        .iter()
        .map(|&g| if g == 0 || g == last { 2.0 } else { 1.0 })
        .product()
}

/// Coordinates in `[0, 1]^d` for a tensor grid of per-dimension positions.
fn tensor_coords(positions: &[f64], dim: usize) -> Vec<Vec<f64>> {
    let extent = positions.len();
    (0..extent.pow(dim as u32))
        .map(|linear| {
            unrank(linear, dim, extent)
                .iter()
                .map(|&g| positions[g])
                .collect()
        })
        .collect()
}

fn build_pair(
    interp1d: Mat<f64>,
    fine_positions: &[f64],
    coarse_positions: &[f64],
    fine_degree: usize,
    coarse_degree: usize,
    dim: usize,
    components: usize,
) -> TransferPair {
    let factors: Vec<&Mat<f64>> = vec![&interp1d; dim];
    let interpolation = kron_all(&factors);
    let fine_nodes = interpolation.nrows();
    let coarse_nodes = interpolation.ncols();

    let last = fine_positions.len() - 1;
    let scaling: Vec<f64> = (0..fine_nodes)
        .map(|i| 1.0 / node_multiplicity(&unrank(i, dim, last + 1), last))
        .collect();

    let mut matrix = Mat::<f64>::zeros(components * fine_nodes, components * coarse_nodes);
    for c in 0..components {
        for i in 0..fine_nodes {
            for j in 0..coarse_nodes {
                matrix[(c * fine_nodes + i, c * coarse_nodes + j)] =
                    scaling[i] * interpolation[(i, j)];
            }
        }
    }

    let fine_coords_one = tensor_coords(fine_positions, dim);
    let coarse_coords_one = tensor_coords(coarse_positions, dim);
    let fine_coords = (0..components * fine_nodes)
        .map(|row| fine_coords_one[row % fine_nodes].clone())
        .collect();
    let coarse_coords = (0..components * coarse_nodes)
        .map(|row| coarse_coords_one[row % coarse_nodes].clone())
        .collect();

    TransferPair {
        matrix,
        interpolation,
        scaling,
        fine_coords,
        coarse_coords,
        fine_loc: localization(fine_degree, dim, components),
        coarse_loc: localization(coarse_degree, dim, components),
    }
}

/// p-multigrid transfer: evaluate the degree-`p_coarse` Gauss-Lobatto basis
/// at the degree-`p_fine` Gauss-Lobatto nodes. `p_coarse = p_fine` yields
/// the identity transfer.
pub fn p_transfer(
    p_coarse: usize,
    p_fine: usize,
    dim: usize,
    components: usize,
) -> Result<TransferPair> {
    if p_coarse == 0 || p_coarse > p_fine {
        return Err(Error::InvalidArgument(format!(
            "need 1 <= p_coarse <= p_fine, got {p_coarse} and {p_fine}"
        )));
    }
    let coarse_nodes = gauss_lobatto_points(p_coarse + 1)?;
    let fine_nodes = gauss_lobatto_points(p_fine + 1)?;
    let (interp1d, _) = lagrange_matrices(&coarse_nodes, &fine_nodes)?;
    let to_unit = |x: f64| (x + 1.0) / 2.0;
    let fine_positions: Vec<f64> = fine_nodes.iter().map(|&x| to_unit(x)).collect();
    let coarse_positions: Vec<f64> = coarse_nodes.iter().map(|&x| to_unit(x)).collect();
    Ok(build_pair(
        interp1d,
        &fine_positions,
        &coarse_positions,
        p_fine,
        p_coarse,
        dim,
        components,
    ))
}

/// h-multigrid transfer: evaluate the degree-`p` coarse basis on the nodes
/// of a fine macro-element made of `m` sub-elements per dimension.
pub fn h_transfer(p: usize, m: usize, dim: usize, components: usize) -> Result<TransferPair> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "macro-elements need at least 2 sub-elements, got {m}"
        )));
    }
    if p == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let coarse_nodes = gauss_lobatto_points(p + 1)?;
    let fine_positions = macro_node_positions(p, m);
    // coarse basis lives on the macro frame [0, 1]; map fine positions back
    // to its reference interval
    let eval_points: Vec<f64> = fine_positions.iter().map(|&t| 2.0 * t - 1.0).collect();
    let (interp1d, _) = lagrange_matrices(&coarse_nodes, &eval_points)?;
    let coarse_positions: Vec<f64> = coarse_nodes.iter().map(|&x| (x + 1.0) / 2.0).collect();
    Ok(build_pair(
        interp1d,
        &fine_positions,
        &coarse_positions,
        m * p,
        p,
        dim,
        components,
    ))
}

/// Per-dimension positions of macro-element nodes in `[0, 1]`.
fn macro_node_positions(p: usize, m: usize) -> Vec<f64> {
    let nodes = gauss_lobatto_points(p + 1).expect("degree validated");
    (0..=m * p)
        .map(|g| {
            let sub = (g / p).min(m - 1);
            let local = g - sub * p;
            (sub as f64 + (nodes[local] + 1.0) / 2.0) / m as f64
        })
        .collect()
}

/// Assemble `m^d` copies of a sub-element operator along shared faces into
/// one macro-element operator. The sub-element operator should already be
/// discretized at the sub-element size `h/m`.
pub fn h_macro_element(ae_sub: &ElementOperator, m: usize) -> Result<ElementOperator> {
    if m < 2 {
        return Err(Error::InvalidArgument(format!(
            "macro-elements need at least 2 sub-elements, got {m}"
        )));
    }
    let p = ae_sub.degree;
    let d = ae_sub.dim;
    let n = ae_sub.components;
    let sub_nodes = ae_sub.nodes_per_dim().pow(d as u32);
    let macro_per_dim = m * p + 1;
    let macro_nodes = macro_per_dim.pow(d as u32);

    let mut matrix = Mat::<f64>::zeros(n * macro_nodes, n * macro_nodes);
    for sub_linear in 0..m.pow(d as u32) {
        let sub = unrank(sub_linear, d, m);
        // local node -> macro node, per dimension g = s*p + i
        let global: Vec<usize> = (0..sub_nodes)
            .map(|local| {
                let digits = unrank(local, d, p + 1);
                let macro_digits: Vec<usize> = digits
                    .iter()
                    .zip(&sub)
                    .map(|(&i, &s)| s * p + i)
                    .collect();
                crate::util::rank(&macro_digits, macro_per_dim)
            })
            .collect();
        for ci in 0..n {
            for cj in 0..n {
                for (i, &gi) in global.iter().enumerate() {
                    for (j, &gj) in global.iter().enumerate() {
                        matrix[(ci * macro_nodes + gi, cj * macro_nodes + gj)] +=
                            ae_sub.matrix[(ci * sub_nodes + i, cj * sub_nodes + j)];
                    }
                }
            }
        }
    }

    let positions = if p >= 1 {
        macro_node_positions(p, m)
    } else {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    };
    let coords_one = tensor_coords(&positions, d);
    let coords = (0..n * macro_nodes)
        .map(|row| coords_one[row % macro_nodes].clone())
        .collect();

    Ok(ElementOperator {
        matrix,
        coords,
        components: n,
        degree: m * p,
        dim: d,
        element_size: ae_sub.element_size * m as f64,
    })
}

/// Symbol of prolongation:
/// `P̃(θ) = Q_fᵀ (P_e ⊙ [e^{i(x_{j,c} - x_{i,f})·θ}]) Q_c`.
pub fn prolongation_symbol(tp: &TransferPair, theta: &[f64]) -> Mat<c64> {
    let fine_phases = phases(&tp.fine_coords, theta);
    let coarse_phases = phases(&tp.coarse_coords, theta);
    let mut out = Mat::<c64>::zeros(tp.fine_loc.mode_count(), tp.coarse_loc.mode_count());
    for j in 0..tp.matrix.ncols() {
        let mj = tp.coarse_loc.mode_of(j);
        for i in 0..tp.matrix.nrows() {
            out[(tp.fine_loc.mode_of(i), mj)] +=
                tp.matrix[(i, j)] * coarse_phases[j] * fine_phases[i].conj();
        }
    }
    out
}

/// Symbol of restriction:
/// `R̃(θ) = Q_cᵀ (P_eᵀ ⊙ [e^{i(x_{j,f} - x_{i,c})·θ}]) Q_f`.
pub fn restriction_symbol(tp: &TransferPair, theta: &[f64]) -> Mat<c64> {
    let fine_phases = phases(&tp.fine_coords, theta);
    let coarse_phases = phases(&tp.coarse_coords, theta);
    let mut out = Mat::<c64>::zeros(tp.coarse_loc.mode_count(), tp.fine_loc.mode_count());
    for j in 0..tp.matrix.nrows() {
        let mj = tp.fine_loc.mode_of(j);
        for i in 0..tp.matrix.ncols() {
            out[(tp.coarse_loc.mode_of(i), mj)] +=
                tp.matrix[(j, i)] * fine_phases[j] * coarse_phases[i].conj();
        }
    }
    out
}

fn phases(coords: &[Vec<f64>], theta: &[f64]) -> Vec<c64> {
    coords
        .iter()
        .map(|x| {
            let arg: f64 = x.iter().zip(theta).map(|(&xi, &ti)| xi * ti).sum();
            c64::new(arg.cos(), arg.sin())
        })
        .collect()
}
