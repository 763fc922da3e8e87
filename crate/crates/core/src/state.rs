//! Validated density matrices and their Bloch decomposition.

use std::collections::BTreeMap;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{self, CMatrix, C64};
use crate::pauli::{Pauli, PauliString};

pub const HERMITIAN_TOL: f64 = 1e-12;
pub const TRACE_TOL: f64 = 1e-12;
pub const PSD_TOL: f64 = 1e-10;
pub const MAX_QUBITS: usize = 10;
/// Largest `n` for which all `4^n` Bloch coefficients are enumerated.
pub const MAX_BLOCH_QUBITS: usize = 7;

/// Hermitian, unit-trace, positive semidefinite `2^n x 2^n` matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    mat: CMatrix,
}

impl DensityMatrix {
    /// Validates `mat` as a state (Hermitian to 1e-12, trace 1 to 1e-12,
    /// smallest eigenvalue at least -1e-10).
    pub fn new(mat: CMatrix) -> Result<Self> {
        let n = Self::check_shape(&mat)?;
        let herm = linalg::hermitian_defect(&mat);
        if herm > HERMITIAN_TOL {
            return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
        }
        let tr = mat.trace();
        if (tr.re - 1.0).abs() > TRACE_TOL || tr.im.abs() > TRACE_TOL {
            return Err(Error::InvalidState(format!("trace {tr} differs from 1")));
        }
        let mat = linalg::hermitize(&mat);
        let min_ev = linalg::hermitian_eigenvalues(&mat)[0];
        if min_ev < -PSD_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_ev:.3e}")));
        }
        Ok(Self { n, mat })
    }

    fn check_shape(mat: &CMatrix) -> Result<usize> {
        if mat.nrows() != mat.ncols() {
            return Err(Error::DimensionMismatch(format!("{}x{} matrix is not square", mat.nrows(), mat.ncols())));
        }
        let n = linalg::qubits_of_dim(mat.nrows())
            .ok_or_else(|| Error::DimensionMismatch(format!("dimension {} is not a power of two", mat.nrows())))?;
        if n == 0 || n > MAX_QUBITS {
            return invalid_arg(format!("{n} qubits outside the supported range 1..={MAX_QUBITS}"));
        }
        Ok(n)
    }

    /// For constructions that are PSD by design (kets, Gram matrices, convex
    /// mixtures and conjugations of states). Shape and trace are still
    /// checked in debug builds.
    pub(crate) fn trusted(mat: CMatrix) -> Self {
        let n = linalg::qubits_of_dim(mat.nrows()).expect("power-of-two dimension");
        debug_assert!((mat.trace().re - 1.0).abs() < 1e-9);
        Self { n, mat: linalg::hermitize(&mat) }
    }

    /// Pure state `|psi><psi|` from an unnormalized ket.
    pub fn from_ket(psi: &DVector<C64>) -> Result<Self> {
        let norm = psi.norm();
        if norm == 0.0 || !norm.is_finite() {
            return invalid_arg("ket has zero or non-finite norm");
        }
        let v = psi / C64::new(norm, 0.0);
        let mat = &v * v.adjoint();
        Self::check_shape(&mat)?;
        Ok(Self::trusted(mat))
    }

    pub fn maximally_mixed(n: usize) -> Result<Self> {
        if n == 0 || n > MAX_QUBITS {
            return invalid_arg(format!("{n} qubits outside 1..={MAX_QUBITS}"));
        }
        let d = 1 << n;
        Ok(Self::trusted(linalg::identity(d) / C64::new(d as f64, 0.0)))
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> CMatrix {
        self.mat
    }

    pub fn purity(&self) -> f64 {
        self.mat.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.mat)
    }

    /// Re-runs full validation, including the eigenvalue check.
    pub fn validate(&self) -> Result<()> {
        Self::new(self.mat.clone()).map(|_| ())
    }

    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.n + other.n > MAX_QUBITS {
            return invalid_arg("tensor product exceeds the qubit limit");
        }
        Ok(Self::trusted(linalg::kron(&self.mat, &other.mat)))
    }

    /// `p * self + (1 - p) * other`.
    pub fn mix(&self, p: f64, other: &DensityMatrix) -> Result<DensityMatrix> {
        if !(0.0..=1.0).contains(&p) {
            return invalid_arg(format!("mixing weight {p} outside [0, 1]"));
        }
        if self.n != other.n {
            return Err(Error::DimensionMismatch(format!("{} vs {} qubits", self.n, other.n)));
        }
        Ok(Self::trusted(&self.mat * C64::new(p, 0.0) + &other.mat * C64::new(1.0 - p, 0.0)))
    }

    /// Convex combination of states with nonnegative weights summing to one.
    pub fn mixture(parts: &[(f64, DensityMatrix)]) -> Result<DensityMatrix> {
        let first = parts.first().ok_or_else(|| Error::InvalidArgument("empty mixture".into()))?;
        let total: f64 = parts.iter().map(|(w, _)| w).sum();
        if parts.iter().any(|(w, _)| *w < 0.0) || (total - 1.0).abs() > 1e-12 {
            return invalid_arg("mixture weights must be nonnegative and sum to 1");
        }
        let d = first.1.dim();
        let mut acc = CMatrix::zeros(d, d);
        for (w, s) in parts {
            if s.dim() != d {
                return Err(Error::DimensionMismatch("mixture of different qubit counts".into()));
            }
            acc += &s.mat * C64::new(*w, 0.0);
        }
        Ok(Self::trusted(acc))
    }

    /// Conjugation `U rho U†` by a unitary of matching size.
    pub fn conjugated(&self, u: &CMatrix) -> Result<DensityMatrix> {
        if u.nrows() != self.dim() || u.ncols() != self.dim() {
            return Err(Error::DimensionMismatch("unitary size".into()));
        }
        Ok(Self::trusted(u * &self.mat * u.adjoint()))
    }

    /// `Tr(P rho)` for a Pauli string on the same number of qubits.
    pub fn expectation(&self, p: &PauliString) -> Result<f64> {
        if p.num_qubits() != self.n {
            return Err(Error::DimensionMismatch(format!("{}-qubit string on {}-qubit state", p.num_qubits(), self.n)));
        }
        Ok(p.sparse().trace_with(&self.mat).re)
    }

    /// Reduced state on the 1-based qubits in `keep` (order of `keep` is
    /// irrelevant; the result keeps ascending qubit order).
    pub fn partial_trace(&self, keep: &[usize]) -> Result<DensityMatrix> {
        if keep.is_empty() {
            return invalid_arg("partial trace over every qubit leaves a scalar, not a state");
        }
        let mask = linalg::qubit_mask(self.n, keep)?;
        Ok(self.reduce_mask(mask))
    }

    pub(crate) fn reduce_mask(&self, mask: usize) -> DensityMatrix {
        DensityMatrix::trusted(linalg::reduce(&self.mat, self.n, mask))
    }

    /// Partial transpose on the 1-based qubits in `subset`; not a state in
    /// general.
    pub fn partial_transpose(&self, subset: &[usize]) -> Result<CMatrix> {
        let mask = linalg::qubit_mask(self.n, subset)?;
        Ok(linalg::partial_transpose_mask(&self.mat, mask))
    }

    /// `Y^{⊗n} rho^T Y^{⊗n}`: odd-weight Bloch coefficients change sign.
    pub fn state_inversion(&self) -> DensityMatrix {
        let y = PauliString::new(vec![Pauli::Y; self.n]).expect("n >= 1").sparse();
        DensityMatrix::trusted(y.conjugate(&self.mat.transpose()))
    }

    /// `(rho + state_inversion(rho)) / 2`: keeps only even-weight correlations.
    pub fn even_projection(&self) -> DensityMatrix {
        let inv = self.state_inversion();
        DensityMatrix::trusted((&self.mat + &inv.mat) * C64::new(0.5, 0.0))
    }

    pub fn bloch(&self) -> Result<BlochCoefficients> {
        bloch_decompose(self)
    }

    pub fn to_file(&self) -> DensityMatrixFile {
        let d = self.dim();
        DensityMatrixFile {
            n: self.n,
            re: (0..d).map(|r| (0..d).map(|c| self.mat[(r, c)].re).collect()).collect(),
            im: (0..d).map(|r| (0..d).map(|c| self.mat[(r, c)].im).collect()).collect(),
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string(&self.to_file())?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: DensityMatrixFile = serde_json::from_str(text)?;
        file.into_state()
    }
}

/// On-disk form `{"n": int, "re": [[...]], "im": [[...]]}`, row-major.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DensityMatrixFile {
    pub n: usize,
    pub re: Vec<Vec<f64>>,
    #[serde(default)]
    pub im: Vec<Vec<f64>>,
}

impl DensityMatrixFile {
    pub fn into_state(self) -> Result<DensityMatrix> {
        if self.n == 0 || self.n > MAX_QUBITS {
            return invalid_arg(format!("n = {} outside 1..={MAX_QUBITS}", self.n));
        }
        let d = 1usize << self.n;
        let rows_ok = |rows: &Vec<Vec<f64>>| rows.len() == d && rows.iter().all(|r| r.len() == d);
        if !rows_ok(&self.re) || !(self.im.is_empty() || rows_ok(&self.im)) {
            return Err(Error::DimensionMismatch(format!("expected {d}x{d} arrays for n = {}", self.n)));
        }
        let mat = CMatrix::from_fn(d, d, |r, c| {
            let im = if self.im.is_empty() { 0.0 } else { self.im[r][c] };
            C64::new(self.re[r][c], im)
        });
        DensityMatrix::new(mat)
    }
}

/// Real coefficients `Tr(P rho)` for every Pauli string `P`, indexed by
/// [`PauliString::index`].
#[derive(Clone, Debug, PartialEq)]
pub struct BlochCoefficients {
    n: usize,
    coeff: Vec<f64>,
}

impl BlochCoefficients {
    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn get(&self, p: &PauliString) -> f64 {
        self.coeff[p.index()]
    }

    pub fn values(&self) -> &[f64] {
        &self.coeff
    }

    /// `(string, coefficient)` pairs with `|coefficient| > tol`.
    pub fn nonzero(&self, tol: f64) -> Vec<(PauliString, f64)> {
        self.coeff
            .iter()
            .enumerate()
            .filter(|(_, c)| c.abs() > tol)
            .map(|(i, &c)| (PauliString::from_index(self.n, i), c))
            .collect()
    }

    /// `2^{-n} Σ_P coeff(P) P`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = 1usize << self.n;
        let mut m = CMatrix::zeros(d, d);
        for (i, &c) in self.coeff.iter().enumerate() {
            if c == 0.0 {
                continue;
            }
            let sp = PauliString::from_index(self.n, i).sparse();
            for r in 0..d {
                m[(r, r ^ sp.x)] += sp.entry(r) * c;
            }
        }
        m / C64::new(d as f64, 0.0)
    }

    pub fn to_state(&self) -> Result<DensityMatrix> {
        DensityMatrix::new(self.reconstruct())
    }

    pub fn to_file(&self) -> BlochFile {
        let coeff = self.nonzero(0.0).into_iter().map(|(p, c)| (p.to_string(), c)).collect();
        BlochFile { n: self.n, coeff }
    }

    pub fn from_file(file: &BlochFile) -> Result<Self> {
        let n = file.n;
        if n == 0 || n > MAX_BLOCH_QUBITS {
            return invalid_arg(format!("Bloch files support 1..={MAX_BLOCH_QUBITS} qubits"));
        }
        let mut coeff = vec![0.0; 1 << (2 * n)];
        coeff[0] = 1.0;
        for (key, &value) in &file.coeff {
            let p: PauliString = key.parse()?;
            if p.num_qubits() != n {
                return Err(Error::DimensionMismatch(format!("key {key} has {} letters, expected {n}", p.num_qubits())));
            }
            coeff[p.index()] = value;
        }
        Ok(Self { n, coeff })
    }
}

/// On-disk form `{"n": int, "coeff": {"XZI": float, ...}}`; zeros omitted and
/// the identity key defaults to 1.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct BlochFile {
    pub n: usize,
    pub coeff: BTreeMap<String, f64>,
}

/// Expands a Hermitian `2^n x 2^n` matrix in the Pauli basis.
pub fn bloch_decompose_matrix(mat: &CMatrix) -> Result<BlochCoefficients> {
    let n = DensityMatrix::check_shape(mat)?;
    if n > MAX_BLOCH_QUBITS {
        return Err(Error::Unsupported(format!(
            "Bloch enumeration is limited to {MAX_BLOCH_QUBITS} qubits; use the purity route for sector lengths"
        )));
    }
    let herm = linalg::hermitian_defect(mat);
    if herm > HERMITIAN_TOL {
        return Err(Error::InvalidState(format!("not Hermitian (defect {herm:.3e})")));
    }
    let coeff = PauliString::all(n).map(|p| p.sparse().trace_with(mat).re).collect();
    Ok(BlochCoefficients { n, coeff })
}

pub fn bloch_decompose(rho: &DensityMatrix) -> Result<BlochCoefficients> {
    bloch_decompose_matrix(&rho.mat)
}
