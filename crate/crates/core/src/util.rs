//! Small tensor-index and Kronecker helpers shared across modules.
//!
//! Multi-indices are stored big-endian: digit 0 is the slowest-varying
//! index, digit `d-1` the fastest. Kronecker factors are listed in the same
//! order, so factor 0 acts on digit 0.

use faer::Mat;

/// All multi-indices of length `dim` with digits in `0..extent`, in
/// lexicographic (big-endian linear) order.
pub fn multi_indices(dim: usize, extent: usize) -> Vec<Vec<usize>> {
    let total = extent.pow(dim as u32);
    let mut out = Vec::with_capacity(total);
    for linear in 0..total {
        out.push(unrank(linear, dim, extent));
    }
    out
}

/// Big-endian digits of `linear` in base `extent`.
pub fn unrank(linear: usize, dim: usize, extent: usize) -> Vec<usize> {
    let mut digits = vec![0usize; dim];
    let mut rest = linear;
    for a in (0..dim).rev() {
        digits[a] = rest % extent;
        rest /= extent;
    }
    digits
}

/// Big-endian linear index of `digits` in base `extent`.
pub fn rank(digits: &[usize], extent: usize) -> usize {
    digits.iter().fold(0, |acc, &d| acc * extent + d)
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &Mat<f64>, b: &Mat<f64>) -> Mat<f64> {
    let (ar, ac) = (a.nrows(), a.ncols());
    let (br, bc) = (b.nrows(), b.ncols());
    Mat::from_fn(ar * br, ac * bc, |i, j| {
        a[(i / br, j / bc)] * b[(i % br, j % bc)]
    })
}

/// `d`-fold Kronecker product of the listed factors, left to right.
pub fn kron_all(factors: &[&Mat<f64>]) -> Mat<f64> {
    assert!(!factors.is_empty());
    let mut out = factors[0].cloned();
    for f in &factors[1..] {
        out = kron(&out, f);
    }
    out
}

/// All permutations of `0..dim` (dim ≤ 4 in practice).
pub fn permutations(dim: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut items: Vec<usize> = (0..dim).collect();
    permute_into(&mut items, 0, &mut out);
    out.sort();
    out
}

fn permute_into(items: &mut Vec<usize>, start: usize, out: &mut Vec<Vec<usize>>) {
    if start == items.len() {
        out.push(items.clone());
        return;
    }
    for i in start..items.len() {
        items.swap(start, i);
        permute_into(items, start + 1, out);
        items.swap(start, i);
    }
}
