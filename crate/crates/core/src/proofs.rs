//! Preset constraint systems that certify the sector-length bounds, and the
//! single-qubit-removal lift that extends a bound from `n` to `n + 1`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::combinatorics::binom_big;
use crate::error::{invalid_arg, Error, Result};
use crate::identities::{rat_to_f64, FormKind, LinearForm};
use crate::lp::{build_program, Assumption, BoundCertificate, LinearProgram};

/// A solved preset: the program, its certificate and a state attaining the
/// bound when one is known.
#[derive(Clone, Debug)]
pub struct Proof {
    pub name: String,
    pub lp: LinearProgram,
    pub certificate: BoundCertificate,
    pub tight_state: Option<String>,
}

impl Proof {
    fn solve(name: String, n: usize, assumptions: &[Assumption], k: usize, tight: Option<String>) -> Result<Self> {
        let lp = build_program(n, assumptions)?;
        let certificate = lp.maximize_sector(k)?.certificate()?;
        certificate.replay(&lp)?;
        Ok(Self { name, lp, certificate, tight_state: tight })
    }

    pub fn value(&self) -> &BigRational {
        &self.certificate.value
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{}\n", self.name);
        s.push_str(&self.certificate.to_text());
        if let Some(t) = &self.tight_state {
            s.push_str(&format!("tight state: {t}\n"));
        }
        s
    }
}

/// `A_3` bound for `n ∈ {3, 4, 5}`.
pub fn prove_a3(n: usize) -> Result<Proof> {
    use Assumption::*;
    let (assumptions, tight) = match n {
        3 => (vec![PurityEq, Shadow(0)], "ghz:3"),
        4 => (vec![PurityEq, Shadow(0)], "chi4"),
        5 => (vec![PurityEq, MacWilliams(1), MacWilliams(2), Shadow(1)], "prod0:5"),
        _ => return invalid_arg(format!("the A_3 preset covers n = 3, 4, 5 (larger n follow by lifting), got {n}")),
    };
    Proof::solve(format!("A_3 bound, n = {n}"), n, &assumptions, 3, Some(tight.into()))
}

/// `A_2 ≤ 3` for two qubits from `B_1 ≥ 0` (with `A_1 ≥ 0` free).
pub fn prove_a2_two_qubits() -> Result<Proof> {
    Proof::solve("A_2 bound, n = 2".into(), 2, &[Assumption::Shadow(1)], 2, Some("bell".into()))
}

/// `A_2 ≤ 3` for pure three-qubit states from `M_0 = M_1 = 0`; mixed states
/// follow by convexity.
pub fn prove_a2_base() -> Result<Proof> {
    Proof::solve(
        "A_2 bound, n = 3".into(),
        3,
        &[Assumption::PurityEq, Assumption::MacWilliams(1)],
        2,
        Some("prod0:3".into()),
    )
}

/// One step of the removal lift: averaging over the `n + 1` reductions to
/// `n` qubits gives `A_k(n+1) ≤ (n+1)/(n+1-k) · bound_n`.
pub fn lift_step(bound: &BigRational, n: usize, k: usize) -> Result<BigRational> {
    if k > n {
        return invalid_arg(format!("cannot lift A_{k} from n = {n}"));
    }
    Ok(bound * BigRational::new(BigInt::from(n + 1), BigInt::from(n + 1 - k)))
}

#[derive(Clone, Debug, Serialize)]
pub struct LiftStep {
    pub n: usize,
    pub bound: String,
    pub binomial: String,
    pub matches: bool,
}

/// Lifts the certified base bound on `A_k` at `base_n` up to `target_n`.
pub fn lift_bound(base: &BigRational, base_n: usize, k: usize, target_n: usize) -> Result<Vec<LiftStep>> {
    if target_n < base_n {
        return invalid_arg("target must not be below the base");
    }
    let mut steps = Vec::new();
    let mut bound = base.clone();
    for n in base_n..=target_n {
        if n > base_n {
            bound = lift_step(&bound, n - 1, k)?;
        }
        let binomial = BigRational::from_integer(binom_big(n, k));
        steps.push(LiftStep { n, bound: bound.to_string(), binomial: binomial.to_string(), matches: bound == binomial });
    }
    Ok(steps)
}

/// `A_2 ≤ C(n, 2)`: the certified three-qubit bound lifted to `n`.
pub fn prove_a2(n: usize) -> Result<(Proof, Vec<LiftStep>)> {
    match n {
        2 => {
            let p = prove_a2_two_qubits()?;
            let steps = lift_bound(p.value(), 2, 2, 2)?;
            Ok((p, steps))
        }
        3..=10 => {
            let base = prove_a2_base()?;
            let steps = lift_bound(base.value(), 3, 2, n)?;
            Ok((base, steps))
        }
        _ => invalid_arg(format!("the A_2 preset covers 2 <= n <= 10, got {n}")),
    }
}

fn even_shadow_set(n: usize) -> Result<Vec<usize>> {
    match n {
        4 => Ok(vec![1]),
        6 => Ok(vec![1, 3]),
        8 => Ok(vec![1, 3, 5]),
        10 => Ok(vec![1, 3, 5, 7]),
        _ => invalid_arg(format!("the even A_n preset covers n in {{4, 6, 8, 10}}, got {n}")),
    }
}

/// `A_n ≤ 2^{n-1} + 1` for even `n ≤ 10`: odd sectors removed by even
/// projection, `A_2 ≤ C(n, 2)` and the shadow inequalities `B_1, B_3, …`.
pub fn prove_an_even(n: usize) -> Result<Proof> {
    if n % 2 == 1 {
        return invalid_arg(format!("n = {n} is odd; use the odd preset"));
    }
    let mut assumptions = vec![Assumption::OddSectorsZero, Assumption::A2Cap];
    assumptions.extend(even_shadow_set(n)?.into_iter().map(Assumption::Shadow));
    Proof::solve(format!("A_n bound, n = {n}"), n, &assumptions, n, Some(format!("ghz:{n}")))
}

/// `A_n ≤ 2^{n-1}` for odd `n` from purity and `B_0 ≥ 0`.
pub fn prove_an_odd(n: usize) -> Result<Proof> {
    if n.is_multiple_of(2) || n < 3 {
        return invalid_arg(format!("the odd A_n preset needs odd n >= 3, got {n}"));
    }
    Proof::solve(
        format!("A_n bound, n = {n}"),
        n,
        &[Assumption::PurityEq, Assumption::Shadow(0)],
        n,
        Some(format!("ghz:{n}")),
    )
}

/// Routes to the even or odd preset.
pub fn prove_an(n: usize) -> Result<Proof> {
    if n.is_multiple_of(2) {
        prove_an_even(n)
    } else {
        prove_an_odd(n)
    }
}

/// Outcome of maximizing `A_k` under all MacWilliams identities, all shadow
/// inequalities and `A_2 ≤ C(n, 2)`.
#[derive(Clone, Debug)]
pub struct InsufficiencyReport {
    pub n: usize,
    pub k: usize,
    pub binomial: BigRational,
    pub certificate: BoundCertificate,
    /// The optimizer itself: a rational point satisfying every constraint.
    pub witness: Vec<BigRational>,
    pub exceeds_binomial: bool,
}

pub fn shadow_insufficiency_report(n: usize, k: usize) -> Result<InsufficiencyReport> {
    if k == 0 || k > n {
        return invalid_arg(format!("need 1 <= k <= n, got k = {k}, n = {n}"));
    }
    let lp = build_program(n, &[Assumption::AllMacWilliams, Assumption::AllShadows, Assumption::A2Cap])?;
    let certificate = lp.maximize_sector(k)?.certificate()?;
    certificate.replay(&lp)?;
    let witness = certificate.tight_point.clone();
    if !lp.is_feasible(&witness)? {
        return Err(Error::InvalidState("optimizer violates its own program".into()));
    }
    let binomial = BigRational::from_integer(binom_big(n, k));
    let exceeds_binomial = witness[k] > binomial;
    Ok(InsufficiencyReport { n, k, binomial, certificate, witness, exceeds_binomial })
}

/// `C(n,3) − C(n−1,2)/3 · A_1 − (n−2)/3 · A_2 + A_3 ≥ 0`, the sector form of
/// `I_L^(3) ≤ (n−2)/3 · I_L^(2)`.
pub fn corollary2_form(n: usize) -> Result<LinearForm> {
    if n < 3 {
        return invalid_arg(format!("the three-body mutual entropy bound needs n >= 3, got {n}"));
    }
    let mut coeff = vec![BigRational::zero(); n + 1];
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    coeff[0] = BigRational::from_integer(binom_big(n, 3));
    coeff[1] = -&third * BigRational::from_integer(binom_big(n - 1, 2));
    coeff[2] = -&third * BigRational::from_integer(BigInt::from(n - 2));
    coeff[3] = BigRational::one();
    LinearForm::new("mutual_I3", FormKind::GeqZero, coeff)
}

/// Minimum of the left side of [`corollary2_form`] under the shadow
/// inequalities alone. A negative value means the shadows do not imply it.
pub fn corollary2_under_shadows(n: usize) -> Result<(LinearProgram, BoundCertificate)> {
    let form = corollary2_form(n)?;
    let lp = build_program(n, &[Assumption::AllShadows])?;
    let cert = lp.minimize(&form.coeff)?.certificate()?;
    cert.replay(&lp)?;
    Ok((lp, cert))
}

pub fn value_f64(r: &BigRational) -> f64 {
    rat_to_f64(r)
}
