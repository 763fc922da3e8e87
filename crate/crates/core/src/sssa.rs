//! Checks behind the symmetric strong subadditivity `A_1 + A_2 ≤ 3(1 + A_3)`
//! and the pair-sum bound: anticommuting Pauli sets, the partial-inversion
//! map and its Choi matrix, the Breuer–Hall operator and the projector
//! representation over symmetric/antisymmetric two-copy subspaces.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};

use argmin::core::{CostFunction, Executor};
use argmin::solver::neldermead::NelderMead;
use nalgebra::DVector;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{self, CMatrix, C64, I, ONE, ZERO};
use crate::pauli::{Pauli, PauliString};
use crate::report::{CheckResult, VerificationReport};
use crate::rng::SeededRng;
use crate::sectors::{pair_sector_sum, sector_lengths, EntropyVector, MutualVector, SectorVector};
use crate::state::DensityMatrix;
use crate::zoo;

const SET_LITERALS: [[&str; 9]; 3] = [
    ["XXII", "XYII", "XZII", "YIXI", "YIYI", "YIZI", "ZIIX", "ZIIY", "ZIIZ"],
    ["YXII", "YYII", "YZII", "ZIXI", "ZIYI", "ZIZI", "XIIX", "XIIY", "XIIZ"],
    ["ZXII", "ZYII", "ZZII", "XIXI", "XIYI", "XIZI", "YIIX", "YIIY", "YIIZ"],
];

/// The three sets of nine pairwise anticommuting four-qubit strings whose
/// union is every weight-two string touching qubit 1.
pub fn anticommuting_sets() -> [Vec<PauliString>; 3] {
    SET_LITERALS.map(|set| set.iter().map(|s| s.parse().expect("literal Pauli string")).collect())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SetStructure {
    pub total_strings: usize,
    pub pairs_checked: usize,
    pub anticommuting_pairs: usize,
    /// Each weight-two string with support on qubit 1 appears exactly once.
    pub coverage_exact: bool,
}

impl SetStructure {
    pub fn passes(&self) -> bool {
        self.total_strings == 27 && self.pairs_checked == 108 && self.anticommuting_pairs == 108 && self.coverage_exact
    }
}

pub fn set_structure() -> SetStructure {
    let sets = anticommuting_sets();
    let mut pairs_checked = 0;
    let mut anticommuting_pairs = 0;
    for set in &sets {
        for i in 0..set.len() {
            for j in i + 1..set.len() {
                pairs_checked += 1;
                if set[i].anticommutes(&set[j]).expect("equal lengths") {
                    anticommuting_pairs += 1;
                }
            }
        }
    }
    let mut union: Vec<PauliString> = sets.iter().flatten().cloned().collect();
    let total_strings = union.len();
    union.sort();
    let mut expected: Vec<PauliString> =
        PauliString::all(4).filter(|p| p.weight() == 2 && p.letters()[0] != Pauli::I).collect();
    expected.sort();
    SetStructure { total_strings, pairs_checked, anticommuting_pairs, coverage_exact: union == expected }
}

/// `Σ_{m ∈ M_i} <m>²` for the three sets.
pub fn anticommuting_bound_check(rho: &DensityMatrix) -> Result<[f64; 3]> {
    if rho.num_qubits() != 4 {
        return invalid_arg(format!("the anticommuting sets act on four qubits, got {}", rho.num_qubits()));
    }
    let mut out = [0.0; 3];
    for (slot, set) in out.iter_mut().zip(anticommuting_sets()) {
        for m in &set {
            let e = rho.expectation(m)?;
            *slot += e * e;
        }
    }
    Ok(out)
}

fn require_three(rho: &DensityMatrix) -> Result<()> {
    if rho.num_qubits() != 3 {
        return invalid_arg(format!("the partial-inversion map acts on three qubits, got {}", rho.num_qubits()));
    }
    Ok(())
}

fn pair_inversions() -> [(usize, PauliString); 3] {
    [("YYI", 0b110), ("YIY", 0b101), ("IYY", 0b011)].map(|(s, mask)| (mask, s.parse().expect("literal")))
}

fn partial_inversion_matrix(m: &CMatrix) -> CMatrix {
    let mut out = CMatrix::zeros(8, 8);
    for (mask, yy) in pair_inversions() {
        out += yy.sparse().conjugate(&linalg::partial_transpose_mask(m, mask));
    }
    out
}

/// `M(ρ) = Σ_{i<j} (Y_i Y_j) ρ^{T_ij} (Y_i Y_j)`. Hermitian, not positive.
pub fn partial_inversion(rho: &DensityMatrix) -> Result<CMatrix> {
    require_three(rho)?;
    Ok(partial_inversion_matrix(rho.matrix()))
}

/// `Tr(ρ M(ρ)) = (3 − A_1 − A_2 + 3A_3) / 8`.
pub fn partial_inversion_overlap(rho: &DensityMatrix) -> Result<f64> {
    Ok(linalg::trace_product(rho.matrix(), &partial_inversion(rho)?).re)
}

fn require_n3(n: usize) -> Result<()> {
    if n != 3 {
        return invalid_arg(format!("symmetric strong subadditivity is stated for n = 3, got {n}"));
    }
    Ok(())
}

/// `3(1 + A_3) − A_1 − A_2`.
pub fn sssa_slack(v: &SectorVector) -> Result<f64> {
    require_n3(v.n)?;
    Ok(3.0 * (1.0 + v.a[3]) - v.a[1] - v.a[2])
}

/// `2S_L^(2) − S_L^(1) − 3S_L^(3)` equals a quarter of [`sssa_slack`]; the
/// returned value is rescaled to match it.
pub fn sssa_slack_entropy(e: &EntropyVector) -> Result<f64> {
    require_n3(e.n)?;
    Ok(4.0 * (2.0 * e.s[1] - e.s[0] - 3.0 * e.s[2]))
}

/// `I_L^(2)/3 − I_L^(3)` equals a twelfth of [`sssa_slack`]; rescaled.
pub fn sssa_slack_mutual(m: &MutualVector) -> Result<f64> {
    require_n3(m.n)?;
    Ok(12.0 * (m.i[1] / 3.0 - m.i[2]))
}

/// Choi matrix `η = (𝟙 ⊗ M)(|φ+><φ+|)` of the partial-inversion map and
/// its partial transpose over the first three qubits.
#[derive(Clone, Debug)]
pub struct ChoiMatrix {
    pub eta: CMatrix,
    pub eta_ta: CMatrix,
}

const FIRST_BLOCK: usize = 0b111000;
const SECOND_BLOCK: usize = 0b000111;

pub fn build_choi() -> ChoiMatrix {
    let mut eta = CMatrix::zeros(64, 64);
    for i in 0..8 {
        for j in 0..8 {
            let mut e = CMatrix::zeros(8, 8);
            e[(i, j)] = ONE;
            let image = partial_inversion_matrix(&e);
            for a in 0..8 {
                for b in 0..8 {
                    eta[(i * 8 + a, j * 8 + b)] = image[(a, b)] / 8.0;
                }
            }
        }
    }
    let eta_ta = linalg::partial_transpose_mask(&eta, FIRST_BLOCK);
    ChoiMatrix { eta, eta_ta }
}

impl ChoiMatrix {
    /// `8 · Tr_A[(ρ^T ⊗ 𝟙) η]`, which reproduces `M(ρ)`.
    pub fn apply(&self, rho: &DensityMatrix) -> Result<CMatrix> {
        require_three(rho)?;
        let lifted = linalg::kron(&rho.matrix().transpose(), &linalg::identity(8));
        Ok(linalg::reduce(&(lifted * &self.eta), 6, SECOND_BLOCK) * C64::new(8.0, 0.0))
    }

    /// `Tr[(ρ ⊗ ρ) η^{T_A}]`.
    pub fn pair_value(&self, rho: &DensityMatrix) -> Result<f64> {
        require_three(rho)?;
        Ok(two_copy_value(&self.eta_ta, rho.matrix()))
    }

    pub fn spectrum(&self) -> Vec<f64> {
        linalg::hermitian_eigenvalues(&self.eta_ta)
    }
}

/// `Re Tr[(ρ ⊗ ρ) W]` for a 64×64 operator `W`.
pub fn two_copy_value(w: &CMatrix, rho: &CMatrix) -> f64 {
    linalg::trace_product(&linalg::kron(rho, rho), w).re
}

/// Weight pattern of the sector functional `3 − A_1 − A_2 + 3A_3`.
const SSSA_WEIGHTS: [f64; 4] = [3.0, -1.0, -1.0, 3.0];

/// `Σ_P s(|P|) P ⊗ P` over three-qubit strings.
pub fn two_copy_pauli_sum(weights: [f64; 4]) -> CMatrix {
    let mut out = CMatrix::zeros(64, 64);
    for p in PauliString::all(3) {
        let w = weights[p.weight()];
        if w != 0.0 {
            let m = p.matrix();
            out += linalg::kron(&m, &m) * C64::new(w, 0.0);
        }
    }
    out
}

/// Least-squares `s` in `values ≈ s · reference` and the largest residual.
pub fn fit_scale(values: &[f64], reference: &[f64]) -> (f64, f64) {
    let num: f64 = values.iter().zip(reference).map(|(v, r)| v * r).sum();
    let den: f64 = reference.iter().map(|r| r * r).sum();
    let scale = if den == 0.0 { 0.0 } else { num / den };
    let residual = values.iter().zip(reference).map(|(v, r)| (v - scale * r).abs()).fold(0.0, f64::max);
    (scale, residual)
}

/// Same for matrices, entrywise.
pub fn fit_matrix_scale(m: &CMatrix, reference: &CMatrix) -> (f64, f64) {
    let num: f64 = m.iter().zip(reference.iter()).map(|(a, b)| (a * b.conj()).re).sum();
    let den: f64 = reference.iter().map(|b| b.norm_sqr()).sum();
    let scale = if den == 0.0 { 0.0 } else { num / den };
    let residual = m.iter().zip(reference.iter()).map(|(a, b)| (a - b * scale).norm()).fold(0.0, f64::max);
    (scale, residual)
}

fn one_qubit(entries: [C64; 4]) -> CMatrix {
    CMatrix::from_row_slice(2, 2, &entries)
}

/// Single-qubit unitaries under which `η^{T_A}` is invariant when applied to
/// qubit 1 of both copies.
pub fn listed_symmetries() -> Vec<(&'static str, CMatrix)> {
    let h = FRAC_1_SQRT_2;
    vec![
        ("X", Pauli::X.matrix()),
        ("Y", Pauli::Y.matrix()),
        ("Z", Pauli::Z.matrix()),
        ("Pi", one_qubit([ONE, ZERO, ZERO, I])),
        ("T", one_qubit([ONE, ZERO, ZERO, C64::from_polar(1.0, PI / 4.0)])),
        ("H", one_qubit([C64::new(h, 0.0), C64::new(h, 0.0), C64::new(h, 0.0), C64::new(-h, 0.0)])),
    ]
}

/// `exp(-iθX/2)`.
pub fn rot_x(theta: f64) -> CMatrix {
    let (s, c) = (theta / 2.0).sin_cos();
    one_qubit([C64::new(c, 0.0), C64::new(0.0, -s), C64::new(0.0, -s), C64::new(c, 0.0)])
}

fn on_qubit(v: &CMatrix, q: usize, n: usize) -> CMatrix {
    let id = linalg::identity(2);
    let mut out = CMatrix::identity(1, 1);
    for k in 0..n {
        out = linalg::kron(&out, if k == q { v } else { &id });
    }
    out
}

fn conjugation_defect(w: &CMatrix, u: &CMatrix) -> f64 {
    linalg::max_abs_diff(&(u * w * u.adjoint()), w)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SymmetryCheck {
    pub name: String,
    pub defect: f64,
    /// Whether invariance is expected.
    pub expected_invariant: bool,
}

impl SymmetryCheck {
    pub fn passes(&self, tol: f64) -> bool {
        (self.defect <= tol) == self.expected_invariant
    }
}

/// Local symmetries `V𝟙𝟙V𝟙𝟙`, the block exchange, simultaneous
/// permutations of both triples, and two controls: a rotation on one copy
/// only (must break invariance) and the same rotation on both copies (which
/// preserves it, since `η^{T_A}` is built from two-copy swap operators).
pub fn check_local_symmetries(choi: &ChoiMatrix) -> Vec<SymmetryCheck> {
    let w = &choi.eta_ta;
    let mut out = Vec::new();
    for (name, v) in listed_symmetries() {
        let u = linalg::kron(&on_qubit(&v, 0, 3), &on_qubit(&v, 0, 3));
        out.push(SymmetryCheck { name: format!("V = {name}"), defect: conjugation_defect(w, &u), expected_invariant: true });
    }
    let swap = linalg::permute_qubits(w, 6, &[3, 4, 5, 0, 1, 2]);
    out.push(SymmetryCheck {
        name: "block exchange".into(),
        defect: linalg::max_abs_diff(&swap, w),
        expected_invariant: true,
    });
    for perm in [[1, 0, 2], [0, 2, 1], [2, 1, 0], [1, 2, 0], [2, 0, 1]] {
        let full = [perm[0], perm[1], perm[2], perm[0] + 3, perm[1] + 3, perm[2] + 3];
        out.push(SymmetryCheck {
            name: format!("permutation {perm:?} on both triples"),
            defect: linalg::max_abs_diff(&linalg::permute_qubits(w, 6, &full), w),
            expected_invariant: true,
        });
    }
    let r = rot_x(0.3);
    let one_copy = linalg::kron(&on_qubit(&r, 0, 3), &linalg::identity(8));
    out.push(SymmetryCheck {
        name: "control: rot_x(0.3) on the first copy only".into(),
        defect: conjugation_defect(w, &one_copy),
        expected_invariant: false,
    });
    let both = linalg::kron(&on_qubit(&r, 0, 3), &on_qubit(&r, 0, 3));
    out.push(SymmetryCheck {
        name: "control: rot_x(0.3) on both copies".into(),
        defect: conjugation_defect(w, &both),
        expected_invariant: true,
    });
    out
}

/// `YYY`, which is skew-symmetric.
pub fn default_bh_unitary() -> CMatrix {
    "YYY".parse::<PauliString>().expect("literal").matrix()
}

/// `Tr_{456}(σ) ⊗ 𝟙 − σ − (𝟙 ⊗ U) σ^{T_B} (𝟙 ⊗ U†)`, positive on separable `σ`.
pub fn breuer_hall(sigma: &DensityMatrix, u: &CMatrix) -> Result<CMatrix> {
    if sigma.num_qubits() != 6 {
        return invalid_arg(format!("the Breuer–Hall operator is built for six qubits, got {}", sigma.num_qubits()));
    }
    if u.nrows() != 8 || u.ncols() != 8 {
        return Err(Error::DimensionMismatch("U must be 8×8".into()));
    }
    if linalg::max_abs_diff(&u.transpose(), &(-u)) > 1e-12 {
        return invalid_arg("U must be skew-symmetric (U^T = -U)");
    }
    if linalg::max_abs_diff(&(u * u.adjoint()), &linalg::identity(8)) > 1e-12 {
        return invalid_arg("U must be unitary");
    }
    let s = sigma.matrix();
    let reduced = linalg::reduce(s, 6, FIRST_BLOCK);
    let lift = linalg::kron(&linalg::identity(8), u);
    let tb = linalg::partial_transpose_mask(s, SECOND_BLOCK);
    Ok(linalg::kron(&reduced, &linalg::identity(8)) - s - &lift * tb * lift.adjoint())
}

fn pair_projector(sign: char) -> Result<CMatrix> {
    // F = ½ Σ_j σ_j ⊗ σ_j is the swap; Π_± = (𝟙 ± F)/2.
    let mut f = CMatrix::zeros(4, 4);
    for p in Pauli::ALL {
        let m = p.matrix();
        f += linalg::kron(&m, &m) * C64::new(0.5, 0.0);
    }
    let id = linalg::identity(4);
    match sign {
        '-' | '−' => Ok((id - f) * C64::new(0.5, 0.0)),
        '+' => Ok((id + f) * C64::new(0.5, 0.0)),
        c => Err(Error::Parse(format!("projector label {c:?} is not + or -"))),
    }
}

/// `Σ c̃_{i1 i2 i3} Π_{i1} ⊗ Π_{i2} ⊗ Π_{i3}` with `Π_{ik}` acting on the
/// pair (qubit k, qubit k + 3). Keys are three-character strings over
/// `{+, -}` such as `"--+"`.
pub fn eta_from_projectors(ctilde: &BTreeMap<String, f64>) -> Result<CMatrix> {
    let mut paired = CMatrix::zeros(64, 64);
    for (key, &c) in ctilde {
        let signs: Vec<char> = key.chars().collect();
        if signs.len() != 3 {
            return Err(Error::Parse(format!("projector key {key:?} needs three signs")));
        }
        let mut term = CMatrix::identity(1, 1);
        for &s in &signs {
            term = linalg::kron(&term, &pair_projector(s)?);
        }
        if c != 0.0 {
            paired += term * C64::new(c, 0.0);
        }
    }
    // Factor order A1 B1 A2 B2 A3 B3 → A1 A2 A3 B1 B2 B3.
    Ok(linalg::permute_qubits(&paired, 6, &[0, 3, 1, 4, 2, 5]))
}

fn ctilde(entries: &[(&str, f64)]) -> BTreeMap<String, f64> {
    entries.iter().map(|(k, v)| (k.to_string(), *v)).collect()
}

pub fn ctilde_sssa() -> BTreeMap<String, f64> {
    ctilde(&[("---", -3.0), ("--+", 1.0), ("-+-", 1.0), ("+--", 1.0)])
}

pub fn ctilde_a2_cap() -> BTreeMap<String, f64> {
    ctilde(&[("---", -3.0), ("-++", 1.0), ("+-+", 1.0), ("++-", 1.0)])
}

pub fn ctilde_state_inversion() -> BTreeMap<String, f64> {
    ctilde(&[("---", 1.0)])
}

/// The sector functionals matched by the three coefficient choices.
pub fn projector_targets() -> Vec<(&'static str, BTreeMap<String, f64>, [f64; 4])> {
    vec![
        ("sssa", ctilde_sssa(), SSSA_WEIGHTS),
        ("a2_cap", ctilde_a2_cap(), [3.0, 0.0, -1.0, 0.0]),
        ("state_inversion", ctilde_state_inversion(), [1.0, -1.0, 1.0, -1.0]),
    ]
}

fn sector_functional(weights: [f64; 4], v: &SectorVector) -> f64 {
    weights.iter().zip(&v.a).map(|(w, a)| w * a).sum()
}

#[derive(Clone, Debug, Serialize)]
pub struct ProjectorFit {
    pub name: String,
    pub scale: f64,
    pub residual: f64,
    pub samples: usize,
}

/// Fits `Tr[(ρ⊗ρ) η_c̃] ≈ s · f(A)` over random states.
pub fn projector_fit(
    name: &str,
    ctilde: &BTreeMap<String, f64>,
    weights: [f64; 4],
    samples: usize,
    seed: u64,
) -> Result<ProjectorFit> {
    let eta = eta_from_projectors(ctilde)?;
    let mut rng = SeededRng::new(seed);
    let mut values = Vec::with_capacity(samples);
    let mut reference = Vec::with_capacity(samples);
    for i in 0..samples {
        let rho = zoo::random_mixed_with(3, 1 + i % 8, &mut rng)?;
        values.push(two_copy_value(&eta, rho.matrix()));
        reference.push(sector_functional(weights, &sector_lengths(&rho)?));
    }
    let (scale, residual) = fit_scale(&values, &reference);
    Ok(ProjectorFit { name: name.into(), scale, residual, samples })
}

#[derive(Clone, Debug, Serialize)]
pub struct ScanResult {
    pub samples: usize,
    pub seed: u64,
    pub minimum: f64,
}

const SCAN_CHUNK: usize = 1000;

/// Minimum of `Tr[(ρ⊗ρ) η^{T_A}]` over random three-qubit states of every
/// rank. Chunks use independent generators, so the result does not depend on
/// the thread count.
pub fn random_product_scan(choi: &ChoiMatrix, samples: usize, seed: u64) -> ScanResult {
    let chunks = samples.div_ceil(SCAN_CHUNK);
    let minimum = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = SeededRng::for_task(seed, c as u64);
            let count = SCAN_CHUNK.min(samples - c * SCAN_CHUNK);
            (0..count)
                .map(|i| {
                    let rho = zoo::random_mixed_with(3, 1 + i % 8, &mut rng).expect("valid rank");
                    two_copy_value(&choi.eta_ta, rho.matrix())
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect::<Vec<f64>>()
        .into_iter()
        .fold(f64::INFINITY, f64::min);
    ScanResult { samples, seed, minimum }
}

struct PurePairCost<'a> {
    w: &'a CMatrix,
}

fn ket_from_params(p: &[f64]) -> DVector<C64> {
    let v = DVector::from_iterator(8, (0..8).map(|k| C64::new(p[2 * k], p[2 * k + 1])));
    let norm = v.norm();
    v / C64::new(norm.max(1e-300), 0.0)
}

impl CostFunction for PurePairCost<'_> {
    type Param = Vec<f64>;
    type Output = f64;

    fn cost(&self, p: &Self::Param) -> std::result::Result<f64, argmin::core::Error> {
        let psi = ket_from_params(p);
        let rho = &psi * psi.adjoint();
        Ok(two_copy_value(self.w, &rho))
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct MinimizationResult {
    pub restarts: usize,
    pub seed: u64,
    pub minimum: f64,
    pub evaluations: u64,
}

/// Nelder–Mead over pure `ψ` of `Tr[(|ψ><ψ|)^{⊗2} η^{T_A}]`, restarted from
/// random points.
pub fn minimize_pure_pairs(choi: &ChoiMatrix, restarts: usize, seed: u64) -> Result<MinimizationResult> {
    let mut rng = SeededRng::new(seed);
    let mut minimum = f64::INFINITY;
    let mut evaluations = 0;
    for _ in 0..restarts {
        let start: Vec<f64> = (0..16).map(|_| rng.gaussian()).collect();
        let mut simplex = vec![start.clone()];
        for k in 0..16 {
            let mut v = start.clone();
            v[k] += 0.5;
            simplex.push(v);
        }
        let solver = NelderMead::new(simplex)
            .with_sd_tolerance(1e-14)
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let res = Executor::new(PurePairCost { w: &choi.eta_ta }, solver)
            .configure(|s| s.max_iters(4000))
            .run()
            .map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let state = res.state();
        minimum = minimum.min(state.best_cost);
        evaluations += state.counts.get("cost_count").copied().unwrap_or(0);
    }
    Ok(MinimizationResult { restarts, seed, minimum, evaluations })
}

/// Sample counts for the randomized parts of the suites.
#[derive(Clone, Copy, Debug)]
pub struct SuiteSize {
    pub states: usize,
    pub scan: usize,
    pub restarts: usize,
}

impl SuiteSize {
    pub const FULL: SuiteSize = SuiteSize { states: 1000, scan: 100_000, restarts: 20 };
    pub const QUICK: SuiteSize = SuiteSize { states: 100, scan: 2000, restarts: 3 };
}

pub fn verify_appendix_a(size: SuiteSize, seed: u64) -> Result<VerificationReport> {
    let s = set_structure();
    let mut checks = vec![CheckResult::new(
        "anticommuting set structure",
        s.passes(),
        0.0,
        s.pairs_checked,
        None,
        format!("{} strings, {}/{} anticommuting pairs, coverage {}", s.total_strings, s.anticommuting_pairs, s.pairs_checked, s.coverage_exact),
    )];
    let mut rng = SeededRng::new(seed);
    let (mut worst_set, mut worst_pair, mut worst_identity) = (f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0f64);
    for i in 0..size.states {
        let rho = if i % 2 == 0 { zoo::random_pure_with(4, &mut rng)? } else { zoo::random_mixed_with(4, 1 + rng.below(16), &mut rng)? };
        let sums = anticommuting_bound_check(&rho)?;
        worst_set = sums.iter().copied().fold(worst_set, f64::max);
        let pair = pair_sector_sum(&rho, 1)?;
        worst_pair = worst_pair.max(pair);
        worst_identity = worst_identity.max((sums.iter().sum::<f64>() - pair).abs());
    }
    checks.push(CheckResult::new("set sums <= 1", worst_set <= 1.0 + 1e-9, worst_set, size.states, Some(seed), String::new()));
    checks.push(CheckResult::new(
        "set sums add up to the pair sum",
        worst_identity <= 1e-10,
        worst_identity,
        size.states,
        Some(seed),
        String::new(),
    ));
    checks.push(CheckResult::new("pair sum <= 3 (n = 4)", worst_pair <= 3.0 + 1e-9, worst_pair, size.states, Some(seed), String::new()));
    let mut worst5 = f64::NEG_INFINITY;
    for i in 0..size.states {
        let rho = if i % 2 == 0 { zoo::random_pure_with(5, &mut rng)? } else { zoo::random_mixed_with(5, 1 + rng.below(32), &mut rng)? };
        for pivot in 1..=5 {
            worst5 = worst5.max(pair_sector_sum(&rho, pivot)?);
        }
    }
    checks.push(CheckResult::new("pair sum <= 4 (n = 5)", worst5 <= 4.0 + 1e-9, worst5, size.states, Some(seed), String::new()));
    Ok(VerificationReport::new("appendixA", checks))
}

pub fn verify_appendix_b(size: SuiteSize, seed: u64) -> Result<VerificationReport> {
    let choi = build_choi();
    let mut checks = Vec::new();
    let spectrum = choi.spectrum();
    let negatives: Vec<f64> = spectrum.iter().copied().filter(|&x| x < -1e-9).collect();
    let neg_ok = negatives.len() == 1 && (negatives[0] + 1.5).abs() <= 1e-9;
    checks.push(CheckResult::new(
        "eigenvalue -3/2",
        neg_ok,
        negatives.first().map_or(0.0, |x| (x + 1.5).abs()),
        1,
        None,
        format!("negative eigenvalues {negatives:?}"),
    ));
    let bloch = two_copy_pauli_sum(SSSA_WEIGHTS);
    let (scale, residual) = fit_matrix_scale(&choi.eta_ta, &bloch);
    checks.push(CheckResult::new(
        "Pauli expansion of eta^T_A",
        residual <= 1e-12 && scale > 0.0,
        residual,
        1,
        None,
        format!("scale {scale}"),
    ));
    let tol = 1e-10;
    for sym in check_local_symmetries(&choi) {
        checks.push(CheckResult::new(&sym.name, sym.passes(tol), sym.defect, 1, None, format!("expected invariant: {}", sym.expected_invariant)));
    }
    let mut rng = SeededRng::new(seed);
    let (mut worst_recon, mut worst_pair, mut worst_formula, mut worst_bh) = (0.0f64, 0.0f64, 0.0f64, f64::INFINITY);
    let mut worst_zero_set = 0.0f64;
    let bh_u = default_bh_unitary();
    for i in 0..size.states {
        let rho = zoo::random_mixed_with(3, 1 + i % 8, &mut rng)?;
        let direct = partial_inversion(&rho)?;
        worst_recon = worst_recon.max(linalg::max_abs_diff(&choi.apply(&rho)?, &direct));
        let overlap = linalg::trace_product(rho.matrix(), &direct).re;
        worst_pair = worst_pair.max((8.0 * choi.pair_value(&rho)? - overlap).abs());
        let v = sector_lengths(&rho)?;
        let slack = sssa_slack(&v)?;
        worst_formula = worst_formula.max((overlap - slack / 8.0).abs());
        worst_zero_set = worst_zero_set.max((overlap.abs() <= 1e-8) as u8 as f64 * slack.abs());
        if i < size.states.min(100) {
            let sigma = rho.tensor(&rho)?;
            let ev = linalg::hermitian_eigenvalues(&breuer_hall(&sigma, &bh_u)?);
            worst_bh = worst_bh.min(ev[0]);
        }
    }
    checks.push(CheckResult::new("Choi reconstruction of M", worst_recon <= 1e-10, worst_recon, size.states, Some(seed), String::new()));
    checks.push(CheckResult::new("Tr(rho M(rho)) = 8 Tr[(rho x rho) eta^T_A]", worst_pair <= 1e-10, worst_pair, size.states, Some(seed), String::new()));
    checks.push(CheckResult::new("Tr(rho M(rho)) = (3 - A1 - A2 + 3 A3)/8", worst_formula <= 1e-10, worst_formula, size.states, Some(seed), String::new()));
    checks.push(CheckResult::new("zero sets agree", worst_zero_set <= 1e-8, worst_zero_set, size.states, Some(seed), String::new()));
    let bh_samples = size.states.min(100);
    checks.push(CheckResult::new("Breuer-Hall operator PSD on rho x rho", worst_bh >= -1e-9, worst_bh, bh_samples, Some(seed), String::new()));
    let scan = random_product_scan(&choi, size.scan, seed);
    checks.push(CheckResult::new("Tr[(rho x rho) eta^T_A] >= 0", scan.minimum >= -1e-9, scan.minimum, scan.samples, Some(seed), String::new()));
    let nm = minimize_pure_pairs(&choi, size.restarts, seed)?;
    checks.push(CheckResult::new(
        "Nelder-Mead minimum over pure rho x rho",
        nm.minimum >= -1e-7,
        nm.minimum,
        nm.restarts,
        Some(seed),
        format!("{} cost evaluations", nm.evaluations),
    ));
    Ok(VerificationReport::new("appendixB", checks))
}

pub fn verify_appendix_c(size: SuiteSize, seed: u64) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    for (name, ct, weights) in projector_targets() {
        let fit = projector_fit(name, &ct, weights, size.states, seed)?;
        checks.push(CheckResult::new(
            &format!("projector form matches {name}"),
            fit.residual <= 1e-8 && fit.scale > 0.0,
            fit.residual,
            fit.samples,
            Some(seed),
            format!("fitted scale {}", fit.scale),
        ));
    }
    let zero = eta_from_projectors(&BTreeMap::new())?;
    let z = zero.iter().map(|x| x.norm()).fold(0.0, f64::max);
    checks.push(CheckResult::new("empty combination is zero", z == 0.0, z, 1, None, String::new()));
    let (scale, residual) = fit_matrix_scale(&eta_from_projectors(&ctilde_sssa())?, &build_choi().eta_ta);
    checks.push(CheckResult::new(
        "projector form is a multiple of eta^T_A",
        residual <= 1e-12 && scale > 0.0,
        residual,
        1,
        None,
        format!("scale {scale}"),
    ));
    Ok(VerificationReport::new("appendixC", checks))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sectors::{mutual_entropies, sector_entropies};

    #[test]
    fn set_structure_is_exact() {
        let s = set_structure();
        assert!(s.passes(), "{s:?}");
    }

    #[test]
    fn set_sums_examples() {
        let prod = anticommuting_bound_check(&zoo::product_zero(4).unwrap()).unwrap();
        assert!(prod.iter().all(|&x| x <= 1.0 + 1e-12));
        assert!((prod.iter().sum::<f64>() - 3.0).abs() < 1e-12);
        let mixed = anticommuting_bound_check(&zoo::maximally_mixed(4).unwrap()).unwrap();
        assert_eq!(mixed, [0.0; 3]);
        assert!(anticommuting_bound_check(&zoo::ghz(3).unwrap()).is_err());
    }

    #[test]
    fn partial_inversion_examples() {
        assert!((partial_inversion_overlap(&zoo::ghz(3).unwrap()).unwrap() - 1.5).abs() < 1e-12);
        assert!((partial_inversion_overlap(&zoo::maximally_mixed(3).unwrap()).unwrap() - 0.375).abs() < 1e-12);
        let d = zoo::fam_d(PI / 2.0, PI / 2.0).unwrap();
        assert!(partial_inversion_overlap(&d).unwrap().abs() < 1e-12);
        let m = partial_inversion(&zoo::random_mixed(3, 4, 2).unwrap()).unwrap();
        assert!(linalg::hermitian_defect(&m) < 1e-14);
        assert!(partial_inversion(&zoo::ghz(4).unwrap()).is_err());
    }

    #[test]
    fn slack_forms_agree() {
        let ghz = SectorVector::from_tail(&[0.0, 3.0, 4.0]).unwrap();
        assert_eq!(sssa_slack(&ghz).unwrap(), 12.0);
        assert_eq!(sssa_slack(&SectorVector::from_tail(&[0.0, 0.0, 0.0]).unwrap()).unwrap(), 3.0);
        let mut rng = SeededRng::new(4);
        for _ in 0..20 {
            let rho = zoo::random_mixed_with(3, 1 + rng.below(8), &mut rng).unwrap();
            let s = sssa_slack(&sector_lengths(&rho).unwrap()).unwrap();
            let e = sector_entropies(&rho);
            assert!((sssa_slack_entropy(&e).unwrap() - s).abs() < 1e-10);
            assert!((sssa_slack_mutual(&mutual_entropies(&e)).unwrap() - s).abs() < 1e-10);
        }
        assert!(sssa_slack(&SectorVector::from_tail(&[0.0, 0.0]).unwrap()).is_err());
    }

    #[test]
    fn choi_spectrum_and_expansion() {
        let choi = build_choi();
        let spec = choi.spectrum();
        let neg: Vec<f64> = spec.iter().copied().filter(|&x| x < -1e-9).collect();
        assert_eq!(neg.len(), 1);
        assert!((neg[0] + 1.5).abs() < 1e-9);
        let (scale, residual) = fit_matrix_scale(&choi.eta_ta, &two_copy_pauli_sum(SSSA_WEIGHTS));
        assert!((scale - 1.0 / 64.0).abs() < 1e-14 && residual < 1e-12);
    }

    #[test]
    fn symmetries() {
        let choi = build_choi();
        for s in check_local_symmetries(&choi) {
            assert!(s.passes(1e-10), "{s:?}");
        }
    }

    #[test]
    fn breuer_hall_examples() {
        let u = default_bh_unitary();
        assert!(linalg::max_abs_diff(&u.transpose(), &(-&u)) < 1e-15);
        let mixed = zoo::maximally_mixed(6).unwrap();
        let ev = linalg::hermitian_eigenvalues(&breuer_hall(&mixed, &u).unwrap());
        assert!(ev[0] >= -1e-12);
        assert!(breuer_hall(&mixed, &linalg::identity(8)).is_err());
        assert!(breuer_hall(&zoo::ghz(3).unwrap(), &u).is_err());
    }

    #[test]
    fn projector_scales() {
        let fits: Vec<ProjectorFit> = projector_targets()
            .into_iter()
            .map(|(name, ct, w)| projector_fit(name, &ct, w, 30, 5).unwrap())
            .collect();
        let expected = [1.0 / 32.0, 1.0 / 8.0, 1.0 / 64.0];
        for (f, e) in fits.iter().zip(expected) {
            assert!((f.scale - e).abs() < 1e-12 && f.residual < 1e-10, "{f:?}");
        }
    }

    #[test]
    fn scan_is_thread_independent() {
        let choi = build_choi();
        let a = random_product_scan(&choi, 2500, 3);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let b = pool.install(|| random_product_scan(&choi, 2500, 3));
        assert_eq!(a.minimum, b.minimum);
        assert!(a.minimum >= -1e-9);
    }

    #[test]
    fn quick_suites_pass() {
        for r in [
            verify_appendix_a(SuiteSize::QUICK, 1).unwrap(),
            verify_appendix_b(SuiteSize::QUICK, 1).unwrap(),
            verify_appendix_c(SuiteSize::QUICK, 1).unwrap(),
        ] {
            assert!(r.passed, "{}", r.to_text());
        }
    }
}
