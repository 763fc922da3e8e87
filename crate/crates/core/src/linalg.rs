//! Dense complex matrix helpers.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

/// Eigenvalues of a Hermitian matrix, ascending.
///
/// Backed by nalgebra's Householder tridiagonalization followed by implicit
/// symmetric QR sweeps; only the lower triangle is read.
pub fn hermitian_eigenvalues(m: &CMatrix) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(m.clone()).eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermitian_defect(m: &CMatrix) -> f64 {
    let d = m.nrows();
    let mut worst = 0.0f64;
    for r in 0..d {
        for c in r..d {
            worst = worst.max((m[(r, c)] - m[(c, r)].conj()).norm());
        }
    }
    worst
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Tr(a * b)` without forming the product.
pub fn trace_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let d = a.nrows();
    let mut acc = ZERO;
    for i in 0..d {
        for k in 0..d {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

pub fn hermitize(m: &CMatrix) -> CMatrix {
    (m + m.adjoint()) * C64::new(0.5, 0.0)
}

pub fn identity(dim: usize) -> CMatrix {
    CMatrix::identity(dim, dim)
}

pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Number of qubits for a `2^n`-dimensional space, if `dim` is a power of two.
pub fn qubits_of_dim(dim: usize) -> Option<usize> {
    if dim.is_power_of_two() {
        Some(dim.trailing_zeros() as usize)
    } else {
        None
    }
}

/// Partial trace keeping the qubits whose bit is set in `keep_mask`.
///
/// Qubit `q` (1-based, leftmost factor first) occupies bit `n - q` of a basis
/// index.
pub fn reduce(m: &CMatrix, n: usize, keep_mask: usize) -> CMatrix {
    let kept: Vec<usize> = (0..n).rev().filter(|b| keep_mask >> b & 1 == 1).collect();
    let traced: Vec<usize> = (0..n).rev().filter(|b| keep_mask >> b & 1 == 0).collect();
    let dk = 1usize << kept.len();
    let dt = 1usize << traced.len();
    let spread = |x: usize, bits: &[usize]| -> usize {
        let len = bits.len();
        bits.iter()
            .enumerate()
            .fold(0, |acc, (i, &b)| acc | ((x >> (len - 1 - i)) & 1) << b)
    };
    let kept_idx: Vec<usize> = (0..dk).map(|a| spread(a, &kept)).collect();
    let traced_idx: Vec<usize> = (0..dt).map(|t| spread(t, &traced)).collect();
    let mut out = CMatrix::zeros(dk, dk);
    for a in 0..dk {
        for b in 0..dk {
            let mut acc = ZERO;
            for &t in &traced_idx {
                acc += m[(kept_idx[a] | t, kept_idx[b] | t)];
            }
            out[(a, b)] = acc;
        }
    }
    out
}

/// Transposes the tensor factors whose bit is set in `mask`.
pub fn partial_transpose_mask(m: &CMatrix, mask: usize) -> CMatrix {
    let d = m.nrows();
    CMatrix::from_fn(d, d, |r, c| {
        let r2 = (r & !mask) | (c & mask);
        let c2 = (c & !mask) | (r & mask);
        m[(r2, c2)]
    })
}

/// Bitmask for a set of 1-based qubit indices.
pub fn qubit_mask(n: usize, qubits: &[usize]) -> crate::Result<usize> {
    let mut mask = 0;
    for &q in qubits {
        if q == 0 || q > n {
            return crate::error::invalid_arg(format!("qubit index {q} outside 1..={n}"));
        }
        mask |= 1 << (n - q);
    }
    Ok(mask)
}

/// Permutes tensor factors: factor `i` of the input becomes factor `perm[i]`.
pub fn permute_qubits(m: &CMatrix, n: usize, perm: &[usize]) -> CMatrix {
    let d = m.nrows();
    let map = |x: usize| -> usize {
        let mut y = 0;
        for (i, &p) in perm.iter().enumerate() {
            let bit = (x >> (n - 1 - i)) & 1;
            y |= bit << (n - 1 - p);
        }
        y
    };
    let idx: Vec<usize> = (0..d).map(map).collect();
    let mut out = CMatrix::zeros(d, d);
    for r in 0..d {
        for c in 0..d {
            out[(idx[r], idx[c])] = m[(r, c)];
        }
    }
    out
}
