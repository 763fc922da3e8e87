//! Named states, the three-qubit boundary families, and seeded random states.

use std::collections::BTreeMap;
use std::f64::consts::{FRAC_1_SQRT_2, PI};
use std::str::FromStr;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::linalg::{self, CMatrix, C64, ONE, ZERO};
use crate::pauli::PauliString;
use crate::rng::SeededRng;
use crate::state::{BlochCoefficients, BlochFile, DensityMatrix, DensityMatrixFile, MAX_QUBITS};

fn ket_from(amps: Vec<C64>) -> Result<DensityMatrix> {
    DensityMatrix::from_ket(&DVector::from_vec(amps))
}

fn real_ket(amps: &[f64]) -> DVector<C64> {
    DVector::from_iterator(amps.len(), amps.iter().map(|&a| C64::new(a, 0.0)))
}

fn check_qubits(n: usize, min: usize) -> Result<()> {
    if n < min || n > MAX_QUBITS {
        return invalid_arg(format!("qubit count {n} outside {min}..={MAX_QUBITS}"));
    }
    Ok(())
}

/// `(|0…0> + |1…1>)/√2`.
pub fn ghz(n: usize) -> Result<DensityMatrix> {
    check_qubits(n, 2)?;
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = C64::new(FRAC_1_SQRT_2, 0.0);
    amps[(1 << n) - 1] = C64::new(FRAC_1_SQRT_2, 0.0);
    ket_from(amps)
}

/// Four-qubit state `(|0001> + |0010> + |0100> + |1000> + √2|1111>)/√6`.
pub fn chi4() -> DensityMatrix {
    let mut amps = vec![ZERO; 16];
    for idx in [0b0001, 0b0010, 0b0100, 0b1000] {
        amps[idx] = ONE;
    }
    amps[0b1111] = C64::new(2f64.sqrt(), 0.0);
    ket_from(amps).expect("nonzero ket")
}

/// `|0…0><0…0|`.
pub fn product_zero(n: usize) -> Result<DensityMatrix> {
    check_qubits(n, 1)?;
    let mut amps = vec![ZERO; 1 << n];
    amps[0] = ONE;
    ket_from(amps)
}

pub fn bell_phi_plus() -> DensityMatrix {
    ghz(2).expect("two qubits")
}

pub fn maximally_mixed(n: usize) -> Result<DensityMatrix> {
    DensityMatrix::maximally_mixed(n)
}

fn check_angle(name: &str, a: f64) -> Result<()> {
    if !(0.0..=PI).contains(&a) {
        return invalid_arg(format!("{name} = {a} outside [0, π]"));
    }
    Ok(())
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return invalid_arg(format!("{name} = {p} outside [0, 1]"));
    }
    Ok(())
}

fn pauli_op(s: &str) -> CMatrix {
    s.parse::<PauliString>().expect("literal Pauli string").matrix()
}

fn scaled(m: &CMatrix, s: f64) -> CMatrix {
    m * C64::new(s, 0.0)
}

/// `|G(α)> ∝ cos(α/2)|GHZ> + sin(α/2)|+++>` with norm `1 + cos(α/2) sin(α/2)`.
fn g_ket(alpha: f64) -> DVector<C64> {
    let (s, c) = (alpha / 2.0).sin_cos();
    let ghz = real_ket(&[FRAC_1_SQRT_2, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, FRAC_1_SQRT_2]);
    let plus = real_ket(&[8f64.sqrt().recip(); 8]);
    (ghz * C64::new(c, 0.0) + plus * C64::new(s, 0.0)) / C64::new((1.0 + c * s).sqrt(), 0.0)
}

/// `|H(α)> = (cos(α/2)|0> - sin(α/2)|1>) ⊗ |+-> `.
fn h_ket(alpha: f64) -> DVector<C64> {
    let (s, c) = (alpha / 2.0).sin_cos();
    let first = real_ket(&[c, -s]);
    let plus = real_ket(&[FRAC_1_SQRT_2, FRAC_1_SQRT_2]);
    let minus = real_ket(&[FRAC_1_SQRT_2, -FRAC_1_SQRT_2]);
    first.kronecker(&plus).kronecker(&minus)
}

fn projector(v: &DVector<C64>) -> CMatrix {
    v * v.adjoint()
}

/// `ρ_A(p, α) = p|G(α)><G(α)| + (1-p)/8 (𝟙 + XXX)`.
pub fn fam_a(p: f64, alpha: f64) -> Result<DensityMatrix> {
    check_prob("p", p)?;
    check_angle("alpha", alpha)?;
    let noise = linalg::identity(8) + pauli_op("XXX");
    DensityMatrix::new(scaled(&projector(&g_ket(alpha)), p) + scaled(&noise, (1.0 - p) / 8.0))
}

/// `ρ_B(p, α) = p|H(α)><H(α)| + (1-p)/8 (𝟙 + cos α Z𝟙𝟙 + sin α XXX)`.
pub fn fam_b(p: f64, alpha: f64) -> Result<DensityMatrix> {
    check_prob("p", p)?;
    check_angle("alpha", alpha)?;
    let noise = linalg::identity(8) + scaled(&pauli_op("ZII"), alpha.cos()) + scaled(&pauli_op("XXX"), alpha.sin());
    DensityMatrix::new(scaled(&projector(&h_ket(alpha)), p) + scaled(&noise, (1.0 - p) / 8.0))
}

/// `ρ_C(p, q) = p/2 𝟙⊗|00><00| + q/2 𝟙⊗|01><01| + (1-p-q)|000><000|`,
/// for `0 ≤ q ≤ p ≤ 1`; the weight on `|000>` must stay nonnegative.
pub fn fam_c(p: f64, q: f64) -> Result<DensityMatrix> {
    check_prob("p", p)?;
    check_prob("q", q)?;
    if q > p {
        return invalid_arg(format!("q = {q} exceeds p = {p}"));
    }
    let w000 = p / 2.0 + (1.0 - p - q);
    if w000 < -1e-12 {
        return invalid_arg(format!("(p, q) = ({p}, {q}) gives negative weight on |000>"));
    }
    let mut diag = [0.0; 8];
    diag[0b000] = w000.max(0.0);
    diag[0b100] = p / 2.0;
    diag[0b001] = q / 2.0;
    diag[0b101] = q / 2.0;
    let mat = CMatrix::from_diagonal(&DVector::from_iterator(8, diag.iter().map(|&d| C64::new(d, 0.0))));
    DensityMatrix::new(mat)
}

/// `|Φ(α)> = cos(α/2)|00> + sin(α/2)|11>`.
fn phi_ket(alpha: f64) -> DVector<C64> {
    let (s, c) = (alpha / 2.0).sin_cos();
    real_ket(&[c, 0.0, 0.0, s])
}

/// Mixing weight `p = sin β / (sin α + sin β)`; `1/2` when both sines vanish.
pub fn fam_d_weight(alpha: f64, beta: f64) -> f64 {
    let denom = alpha.sin() + beta.sin();
    if denom.abs() < 1e-300 {
        0.5
    } else {
        beta.sin() / denom
    }
}

/// `ρ_D(α, β) = p/2 |Φ(α)><Φ(α)| ⊗ (𝟙 + Z) + (1-p)/2 |Φ(β)><Φ(β)| ⊗ (𝟙 - Z)`
/// with `p = sin β / (sin α + sin β)`.
///
/// The third qubit flags which two-qubit state is present. With this weight
/// the `XXZ` and `YYZ` coefficients cancel and the state saturates
/// `A_1 + A_2 = 3(1 + A_3)` for every `(α, β)`.
pub fn fam_d(alpha: f64, beta: f64) -> Result<DensityMatrix> {
    check_angle("alpha", alpha)?;
    check_angle("beta", beta)?;
    let p = fam_d_weight(alpha, beta);
    let up = CMatrix::from_row_slice(2, 2, &[ONE, ZERO, ZERO, ZERO]);
    let down = CMatrix::from_row_slice(2, 2, &[ZERO, ZERO, ZERO, ONE]);
    let mat = scaled(&linalg::kron(&projector(&phi_ket(alpha)), &up), p)
        + scaled(&linalg::kron(&projector(&phi_ket(beta)), &down), 1.0 - p);
    DensityMatrix::new(mat)
}

/// `p ρ + (1-p) ρ̃` with `ρ̃` the state inversion of `ρ`.
pub fn inversion_mix(rho: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
    check_prob("p", p)?;
    rho.mix(p, &rho.state_inversion())
}

/// Haar-random pure state from a normalized complex Gaussian vector.
pub fn random_pure(n: usize, seed: u64) -> Result<DensityMatrix> {
    check_qubits(n, 1)?;
    random_pure_with(n, &mut SeededRng::new(seed))
}

pub fn random_pure_with(n: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    let amps = (0..1usize << n).map(|_| rng.complex_gaussian()).collect();
    ket_from(amps)
}

/// `G G† / Tr(G G†)` for a `2^n x rank` complex Gaussian `G`.
pub fn random_mixed(n: usize, rank: usize, seed: u64) -> Result<DensityMatrix> {
    random_mixed_with(n, rank, &mut SeededRng::new(seed))
}

pub fn random_mixed_with(n: usize, rank: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    check_qubits(n, 1)?;
    let d = 1usize << n;
    if rank < 1 || rank > d {
        return invalid_arg(format!("rank {rank} outside 1..={d}"));
    }
    let g = CMatrix::from_fn(d, rank, |_, _| rng.complex_gaussian());
    let gram = &g * g.adjoint();
    let tr = gram.trace().re;
    Ok(DensityMatrix::trusted(gram / C64::new(tr, 0.0)))
}

/// Haar-ish random unitary: QR of a complex Gaussian matrix with the phases
/// of `R`'s diagonal absorbed.
pub fn random_unitary(dim: usize, rng: &mut SeededRng) -> CMatrix {
    let g = CMatrix::from_fn(dim, dim, |_, _| rng.complex_gaussian());
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { ONE };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `U_1 ⊗ … ⊗ U_n` with independent random single-qubit unitaries.
pub fn random_local_unitary(n: usize, rng: &mut SeededRng) -> CMatrix {
    (1..n).fold(random_unitary(2, rng), |acc, _| linalg::kron(&acc, &random_unitary(2, rng)))
}

/// Tensor product of `n` random single-qubit states, each pure or of rank 2.
pub fn random_product_with(n: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    check_qubits(n, 1)?;
    let mut acc: Option<DensityMatrix> = None;
    for _ in 0..n {
        let rank = 1 + rng.below(2);
        let q = random_mixed_with(1, rank, rng)?;
        acc = Some(match acc {
            None => q,
            Some(a) => a.tensor(&q)?,
        });
    }
    Ok(acc.expect("n >= 1"))
}

/// Mixture of up to `max_terms` random product states.
pub fn random_separable_with(n: usize, max_terms: usize, rng: &mut SeededRng) -> Result<DensityMatrix> {
    let terms = 1 + rng.below(max_terms.max(1));
    let weights: Vec<f64> = (0..terms).map(|_| rng.uniform() + 1e-3).collect();
    let total: f64 = weights.iter().sum();
    let mut parts = Vec::with_capacity(terms);
    for w in weights {
        parts.push((w / total, random_product_with(n, rng)?));
    }
    let sum: f64 = parts.iter().map(|(w, _)| w).sum();
    parts[0].0 += 1.0 - sum;
    DensityMatrix::mixture(&parts)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum StateKind {
    #[serde(rename = "ghz")]
    Ghz,
    #[serde(rename = "chi4")]
    Chi4,
    #[serde(rename = "product_zero")]
    ProductZero,
    #[serde(rename = "bell_phi_plus")]
    BellPhiPlus,
    #[serde(rename = "maximally_mixed")]
    MaximallyMixed,
    #[serde(rename = "fam_A")]
    FamA,
    #[serde(rename = "fam_B")]
    FamB,
    #[serde(rename = "fam_C")]
    FamC,
    #[serde(rename = "fam_D")]
    FamD,
    #[serde(rename = "inversion_mix")]
    InversionMix,
    #[serde(rename = "random_pure")]
    RandomPure,
    #[serde(rename = "random_mixed")]
    RandomMixed,
}

/// Serializable description of a state, e.g.
/// `{"kind": "fam_D", "params": {"alpha": 1.5708, "beta": 0.7854}, "n": 3, "seed": 42}`.
///
/// `inversion_mix` takes its input state from `base` and its weight from
/// `params.p`; `random_mixed` reads `params.rank`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateRecipe {
    pub kind: StateKind,
    #[serde(default)]
    pub params: BTreeMap<String, f64>,
    #[serde(default)]
    pub n: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<Box<StateRecipe>>,
}

impl StateRecipe {
    pub fn new(kind: StateKind) -> Self {
        Self { kind, params: BTreeMap::new(), n: None, seed: None, base: None }
    }

    pub fn with_n(mut self, n: usize) -> Self {
        self.n = Some(n);
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_param(mut self, name: &str, value: f64) -> Self {
        self.params.insert(name.to_string(), value);
        self
    }

    fn param(&self, names: &[&str]) -> Result<f64> {
        names
            .iter()
            .find_map(|k| self.params.get(*k).copied())
            .ok_or_else(|| Error::InvalidArgument(format!("{:?} recipe needs parameter {}", self.kind, names[0])))
    }

    fn qubits(&self) -> Result<usize> {
        self.n.ok_or_else(|| Error::InvalidArgument(format!("{:?} recipe needs n", self.kind)))
    }

    fn expect_three(&self) -> Result<()> {
        match self.n {
            None | Some(3) => Ok(()),
            Some(n) => invalid_arg(format!("{:?} is a three-qubit family, got n = {n}", self.kind)),
        }
    }

    pub fn build(&self) -> Result<DensityMatrix> {
        match self.kind {
            StateKind::Ghz => ghz(self.qubits()?),
            StateKind::Chi4 => Ok(chi4()),
            StateKind::ProductZero => product_zero(self.qubits()?),
            StateKind::BellPhiPlus => Ok(bell_phi_plus()),
            StateKind::MaximallyMixed => maximally_mixed(self.qubits()?),
            StateKind::FamA | StateKind::FamB | StateKind::FamC | StateKind::FamD => family_state(self),
            StateKind::InversionMix => {
                let base = self
                    .base
                    .as_ref()
                    .ok_or_else(|| Error::InvalidArgument("inversion_mix recipe needs a base state".into()))?;
                inversion_mix(&base.build()?, self.param(&["p"])?)
            }
            StateKind::RandomPure => random_pure(self.qubits()?, self.seed.unwrap_or(0)),
            StateKind::RandomMixed => {
                let rank = self.param(&["rank"])?;
                if rank.fract() != 0.0 || rank < 1.0 {
                    return invalid_arg(format!("rank {rank} must be a positive integer"));
                }
                random_mixed(self.qubits()?, rank as usize, self.seed.unwrap_or(0))
            }
        }
    }
}

/// Builds one of the three-qubit boundary families from a recipe. Angles are
/// radians.
pub fn family_state(recipe: &StateRecipe) -> Result<DensityMatrix> {
    recipe.expect_three()?;
    match recipe.kind {
        StateKind::FamA => fam_a(recipe.param(&["p"])?, recipe.param(&["alpha", "a"])?),
        StateKind::FamB => fam_b(recipe.param(&["p"])?, recipe.param(&["alpha", "a"])?),
        StateKind::FamC => fam_c(recipe.param(&["p"])?, recipe.param(&["q"])?),
        StateKind::FamD => fam_d(recipe.param(&["alpha", "a"])?, recipe.param(&["beta", "b"])?),
        other => invalid_arg(format!("{other:?} is not a boundary family")),
    }
}

/// Reads any of the three JSON state formats: a density matrix
/// (`{"n", "re", "im"}`), Bloch coefficients (`{"n", "coeff"}`) or a
/// [`StateRecipe`] (`{"kind", ...}`).
pub fn state_from_json(text: &str) -> Result<DensityMatrix> {
    let value: serde_json::Value = serde_json::from_str(text)?;
    let has = |k: &str| value.get(k).is_some();
    if has("kind") {
        serde_json::from_value::<StateRecipe>(value)?.build()
    } else if has("re") {
        serde_json::from_value::<DensityMatrixFile>(value)?.into_state()
    } else if has("coeff") {
        BlochCoefficients::from_file(&serde_json::from_value::<BlochFile>(value)?)?.to_state()
    } else {
        Err(Error::Parse("state JSON needs a \"kind\", \"re\" or \"coeff\" field".into()))
    }
}

/// Short state references: `ghz:3`, `chi4`, `prod0:5`, `mixed:3`, `bell`,
/// `famA:p=0.5,a=1.2` (also `famB`, `famC` with `p,q`, `famD` with `a,b`),
/// `rand:3:seed=7:rank=4` (pure when `rank` is omitted). Fields after the
/// name are separated by `:` or `,`.
impl FromStr for StateRecipe {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut fields = text.trim().split([':', ',']).filter(|f| !f.is_empty());
        let name = fields.next().ok_or_else(|| Error::Parse("empty state reference".into()))?;
        let mut n = None;
        let mut params = BTreeMap::new();
        for f in fields {
            match f.split_once('=') {
                Some((k, v)) => {
                    let value: f64 =
                        v.trim().parse().map_err(|_| Error::Parse(format!("{k} = {v:?} is not a number in {text:?}")))?;
                    params.insert(k.trim().to_string(), value);
                }
                None => {
                    let q: usize = f.trim().parse().map_err(|_| Error::Parse(format!("{f:?} is not a qubit count in {text:?}")))?;
                    if n.replace(q).is_some() {
                        return Err(Error::Parse(format!("qubit count given twice in {text:?}")));
                    }
                }
            }
        }
        let kind = match name.to_ascii_lowercase().as_str() {
            "ghz" => StateKind::Ghz,
            "chi4" | "chi" => StateKind::Chi4,
            "prod0" | "product_zero" => StateKind::ProductZero,
            "bell" | "bell_phi_plus" => StateKind::BellPhiPlus,
            "mixed" | "maximally_mixed" => StateKind::MaximallyMixed,
            "fama" | "fam_a" => StateKind::FamA,
            "famb" | "fam_b" => StateKind::FamB,
            "famc" | "fam_c" => StateKind::FamC,
            "famd" | "fam_d" => StateKind::FamD,
            "rand" | "random" => {
                if params.contains_key("rank") {
                    StateKind::RandomMixed
                } else {
                    StateKind::RandomPure
                }
            }
            other => return Err(Error::Parse(format!("unknown state name {other:?}"))),
        };
        let mut recipe = StateRecipe::new(kind);
        recipe.n = n;
        if let Some(seed) = params.remove("seed") {
            if seed < 0.0 || seed.fract() != 0.0 {
                return Err(Error::Parse(format!("seed {seed} must be a nonnegative integer")));
            }
            recipe.seed = Some(seed as u64);
        }
        recipe.params = params;
        let needs_n = matches!(
            kind,
            StateKind::Ghz | StateKind::ProductZero | StateKind::MaximallyMixed | StateKind::RandomPure | StateKind::RandomMixed
        );
        if needs_n && recipe.n.is_none() {
            return Err(Error::Parse(format!("{name} needs a qubit count, e.g. {name}:3")));
        }
        Ok(recipe)
    }
}
