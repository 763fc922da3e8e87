//! MacWilliams identities, Kravchuk polynomials and shadow inequalities as
//! exact linear forms over `(A_0, …, A_n)`.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::{binom_big, subsets_of_size};
use crate::error::{invalid_arg, Error, Result};
use crate::report::{CheckResult, VerificationReport};
use crate::rng::SeededRng;
use crate::sectors::sector_lengths;
use crate::zoo;
use crate::sectors::{subset_purities, SectorVector};
use crate::state::DensityMatrix;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormKind {
    /// `Σ c_j A_j = 0`.
    EqualityZero,
    /// `Σ c_j A_j ≥ 0`.
    GeqZero,
}

/// `Σ_j c_j A_j` compared against zero. The constant term is `c_0`, since
/// `A_0 = 1`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LinearForm {
    pub name: String,
    pub kind: FormKind,
    pub coeff: Vec<BigRational>,
}

#[cfg(test)]
pub(crate) fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub(crate) fn rat_int(v: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(v))
}

pub(crate) fn rat_to_f64(r: &BigRational) -> f64 {
    r.numer().to_f64().unwrap_or(f64::NAN) / r.denom().to_f64().unwrap_or(f64::NAN)
}

impl LinearForm {
    pub fn new(name: impl Into<String>, kind: FormKind, coeff: Vec<BigRational>) -> Result<Self> {
        if coeff.len() < 2 {
            return invalid_arg("a linear form needs coefficients for A_0..A_n with n >= 1");
        }
        Ok(Self { name: name.into(), kind, coeff })
    }

    pub fn from_ints(name: impl Into<String>, kind: FormKind, coeff: &[i64]) -> Result<Self> {
        Self::new(name, kind, coeff.iter().map(|&c| rat_int(c)).collect())
    }

    pub fn n(&self) -> usize {
        self.coeff.len() - 1
    }

    pub fn is_zero(&self) -> bool {
        self.coeff.iter().all(Zero::is_zero)
    }

    pub fn evaluate(&self, v: &SectorVector) -> Result<f64> {
        if v.n != self.n() {
            return Err(Error::DimensionMismatch(format!("form on {} qubits, vector on {}", self.n(), v.n)));
        }
        Ok(self.coeff.iter().zip(&v.a).map(|(c, a)| rat_to_f64(c) * a).sum())
    }

    pub fn evaluate_exact(&self, a: &[BigRational]) -> Result<BigRational> {
        if a.len() != self.coeff.len() {
            return Err(Error::DimensionMismatch(format!("{} coefficients, {} values", self.coeff.len(), a.len())));
        }
        Ok(self.coeff.iter().zip(a).fold(BigRational::zero(), |acc, (c, x)| acc + c * x))
    }

    /// True if the inequality (or equality) holds on `v` up to `tol`.
    pub fn holds(&self, v: &SectorVector, tol: f64) -> Result<bool> {
        let val = self.evaluate(v)?;
        Ok(match self.kind {
            FormKind::EqualityZero => val.abs() <= tol,
            FormKind::GeqZero => val >= -tol,
        })
    }

    pub fn scaled(&self, factor: &BigRational) -> LinearForm {
        LinearForm { name: self.name.clone(), kind: self.kind, coeff: self.coeff.iter().map(|c| c * factor).collect() }
    }

    pub fn to_json(&self) -> FormJson {
        FormJson {
            name: self.name.clone(),
            n: self.n(),
            kind: self.kind,
            num: self.coeff.iter().map(|c| big_to_json(c.numer())).collect(),
            den: self.coeff.iter().map(|c| big_to_json(c.denom())).collect(),
        }
    }

    pub fn from_json(json: &FormJson) -> Result<Self> {
        if json.num.len() != json.n + 1 || json.den.len() != json.n + 1 {
            return Err(Error::Parse(format!("form {} needs {} numerators and denominators", json.name, json.n + 1)));
        }
        let coeff = json
            .num
            .iter()
            .zip(&json.den)
            .map(|(p, q)| {
                let (p, q) = (json_to_big(p)?, json_to_big(q)?);
                if q.is_zero() {
                    return Err(Error::Parse(format!("zero denominator in form {}", json.name)));
                }
                Ok(BigRational::new(p, q))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(json.name.clone(), json.kind, coeff)
    }
}

impl fmt::Display for LinearForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: ", self.name)?;
        let mut first = true;
        for (j, c) in self.coeff.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else if first { "" } else { "+" };
            let mag = c.abs();
            if !first {
                write!(f, " ")?;
            }
            let sep = if first { "" } else { " " };
            if j == 0 {
                write!(f, "{sign}{sep}{mag}")?;
            } else if mag.is_one() {
                write!(f, "{sign}{sep}A{j}")?;
            } else {
                write!(f, "{sign}{sep}{mag}*A{j}")?;
            }
            first = false;
        }
        if first {
            write!(f, "0")?;
        }
        match self.kind {
            FormKind::EqualityZero => write!(f, " = 0"),
            FormKind::GeqZero => write!(f, " >= 0"),
        }
    }
}

/// JSON shape `{"name", "n", "kind", "num": [...], "den": [...]}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FormJson {
    pub name: String,
    pub n: usize,
    pub kind: FormKind,
    pub num: Vec<serde_json::Value>,
    pub den: Vec<serde_json::Value>,
}

fn big_to_json(v: &BigInt) -> serde_json::Value {
    match v.to_i64() {
        Some(i) => serde_json::Value::from(i),
        None => serde_json::Value::from(v.to_string()),
    }
}

fn json_to_big(v: &serde_json::Value) -> Result<BigInt> {
    match v {
        serde_json::Value::Number(n) => {
            n.as_i64().map(BigInt::from).ok_or_else(|| Error::Parse(format!("non-integer coefficient {n}")))
        }
        serde_json::Value::String(s) => s.parse().map_err(|_| Error::Parse(format!("bad integer {s:?}"))),
        other => Err(Error::Parse(format!("bad coefficient {other}"))),
    }
}

/// `K_k(r; n) = Σ_j (-1)^j 3^{k-j} C(r, j) C(n-r, k-j)`.
pub fn kravchuk(k: usize, r: usize, n: usize) -> Result<BigInt> {
    if k > n || r > n {
        return invalid_arg(format!("kravchuk needs 0 <= k, r <= n, got k={k}, r={r}, n={n}"));
    }
    let mut acc = BigInt::zero();
    for j in 0..=k {
        let term = BigInt::from(3).pow((k - j) as u32) * binom_big(r, j) * binom_big(n - r, k - j);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    Ok(acc)
}

/// `M_m`: the pure-state identity
/// `Σ_{j≤n-m} 2^m C(n-j, m) A_j - Σ_{j≤m} 2^{n-m} C(n-j, n-m) A_j = 0`.
pub fn macwilliams_form(m: usize, n: usize) -> Result<LinearForm> {
    if n == 0 || m > n {
        return invalid_arg(format!("MacWilliams form needs n >= 1 and 0 <= m <= n, got m={m}, n={n}"));
    }
    let two = BigInt::from(2);
    let coeff = (0..=n)
        .map(|j| {
            let mut c = BigInt::zero();
            if j <= n - m {
                c += two.pow(m as u32) * binom_big(n - j, m);
            }
            if j <= m {
                c -= two.pow((n - m) as u32) * binom_big(n - j, n - m);
            }
            BigRational::from_integer(c)
        })
        .collect();
    LinearForm::new(format!("M_{m}"), FormKind::EqualityZero, coeff)
}

pub fn macwilliams_residual(v: &SectorVector, m: usize) -> Result<f64> {
    macwilliams_form(m, v.n)?.evaluate(v)
}

/// `B_k = 2^{-n} Σ_r (-1)^r K_k(r; n) A_r ≥ 0`.
pub fn shadow_form(k: usize, n: usize) -> Result<LinearForm> {
    if n == 0 || k > n {
        return invalid_arg(format!("shadow form needs n >= 1 and 0 <= k <= n, got k={k}, n={n}"));
    }
    let scale = BigInt::from(2).pow(n as u32);
    let coeff = (0..=n)
        .map(|r| {
            let kr = kravchuk(k, r, n)?;
            let signed = if r % 2 == 0 { kr } else { -kr };
            Ok(BigRational::new(signed, scale.clone()))
        })
        .collect::<Result<Vec<_>>>()?;
    LinearForm::new(format!("B_{k}"), FormKind::GeqZero, coeff)
}

pub fn shadow_value(v: &SectorVector, k: usize) -> Result<f64> {
    shadow_form(k, v.n)?.evaluate(v)
}

/// Shadow value computed from reduced states:
/// `Σ_{|T|=k} Σ_S (-1)^{|S ∩ T̄|} Tr(ρ_S²)`, limited to four qubits.
pub fn shadow_from_marginals(rho: &DensityMatrix, k: usize) -> Result<f64> {
    let n = rho.num_qubits();
    if n > 4 {
        return Err(Error::Unsupported("the marginal shadow oracle is limited to n <= 4".into()));
    }
    if k > n {
        return invalid_arg(format!("k = {k} exceeds n = {n}"));
    }
    let purities = subset_purities(rho);
    let full = (1usize << n) - 1;
    let mut total = 0.0;
    for t in subsets_of_size(n, k) {
        let t_bar = full & !t;
        for (s, pur) in purities.iter().enumerate() {
            let sign = if (s & t_bar).count_ones().is_multiple_of(2) { 1.0 } else { -1.0 };
            total += sign * pur;
        }
    }
    Ok(total)
}

/// Rank over the rationals of the coefficient vectors.
pub fn exact_rank(forms: &[LinearForm]) -> usize {
    let mut rows: Vec<Vec<BigRational>> = forms.iter().map(|f| f.coeff.clone()).collect();
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(pivot) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, pivot);
        let p = rows[rank][col].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][col].is_zero() {
                let factor = &rows[r][col] / &p;
                for c in col..cols {
                    let delta = &factor * &rows[rank][c];
                    rows[r][c] -= delta;
                }
            }
        }
        rank += 1;
    }
    rank
}

pub fn macwilliams_forms(n: usize) -> Result<Vec<LinearForm>> {
    (0..=n).map(|m| macwilliams_form(m, n)).collect()
}

pub fn shadow_forms(n: usize) -> Result<Vec<LinearForm>> {
    (0..=n).map(|k| shadow_form(k, n)).collect()
}

/// MacWilliams residuals on random pure states, the rank of the identity
/// system, shadow positivity on random mixed states and agreement of the
/// shadow with its marginal-sum form, for `1 ≤ n ≤ max_n`.
pub fn verify_identities(max_n: usize, pure: usize, mixed: usize, seed: u64) -> Result<VerificationReport> {
    let mut checks = Vec::new();
    let mut rng = SeededRng::new(seed);
    for n in 1..=max_n {
        let rank = exact_rank(&macwilliams_forms(n)?);
        let expected = n.div_ceil(2);
        checks.push(CheckResult::new(
            &format!("n = {n}: independent MacWilliams forms"),
            rank == expected,
            (rank as f64 - expected as f64).abs(),
            n + 1,
            None,
            format!("rank {rank}, expected {expected}"),
        ));
        let mut worst = 0.0f64;
        for _ in 0..pure {
            let v = sector_lengths(&zoo::random_pure_with(n, &mut rng)?)?;
            for m in 0..=n {
                worst = worst.max(macwilliams_residual(&v, m)?.abs());
            }
        }
        checks.push(CheckResult::new(&format!("n = {n}: MacWilliams residuals"), worst <= 1e-8, worst, pure, Some(seed), String::new()));
        let (mut lowest, mut oracle) = (f64::INFINITY, 0.0f64);
        for i in 0..mixed {
            let rho = zoo::random_mixed_with(n, 1 + i % (1 << n), &mut rng)?;
            let v = sector_lengths(&rho)?;
            for k in 0..=n {
                let b = shadow_value(&v, k)?;
                lowest = lowest.min(b);
                if n <= 4 {
                    oracle = oracle.max((b - shadow_from_marginals(&rho, k)?).abs());
                }
            }
        }
        checks.push(CheckResult::new(&format!("n = {n}: shadows nonnegative"), lowest >= -1e-9, lowest, mixed, Some(seed), String::new()));
        if n <= 4 {
            checks.push(CheckResult::new(
                &format!("n = {n}: shadow from marginals"),
                oracle <= 1e-9,
                oracle,
                mixed,
                Some(seed),
                String::new(),
            ));
        }
    }
    Ok(VerificationReport::new("identities", checks))
}
