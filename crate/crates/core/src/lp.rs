//! Exact rational linear programs over sector variables `A_0, …, A_n ≥ 0`.
//!
//! Solved with a dense two-phase simplex using Bland's rule. The optimal
//! dual is read off the artificial columns of the final tableau and returned
//! as a certificate that can be replayed with exact arithmetic.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::combinatorics::binom_big;
use crate::error::{invalid_arg, Error, Result};
use crate::identities::{macwilliams_form, rat_int, rat_to_f64, shadow_form, FormKind, LinearForm};

/// Named ingredient of a constraint system.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Assumption {
    /// `M_0 = 0`, i.e. `Σ A_k = 2^n`.
    PurityEq,
    /// `M_m = 0` for one `m`.
    MacWilliams(usize),
    /// `M_m = 0` for every `m`.
    AllMacWilliams,
    /// `B_k ≥ 0` for one `k`.
    Shadow(usize),
    /// `B_0, …, B_k ≥ 0`.
    ShadowsUpTo(usize),
    /// Every `B_k ≥ 0`.
    AllShadows,
    /// `A_1 ≤ n`.
    A1Cap,
    /// `A_2 ≤ C(n, 2)`.
    A2Cap,
    /// `A_k ≤ C(n, k)` for a chosen `k`.
    BinomialCap(usize),
    /// `A_k = 0` for every odd `k`.
    OddSectorsZero,
    Custom(LinearForm),
}

impl FromStr for Assumption {
    type Err = Error;

    /// Accepts `purity_eq`, `M2`/`M_2`, `macwilliams`, `B1`/`B_1`,
    /// `shadows`, `shadows:3`, `a1_cap`, `a2_cap`, `cap:4`,
    /// `odd_sectors_zero`.
    fn from_str(s: &str) -> Result<Self> {
        let t = s.trim();
        let lower = t.to_ascii_lowercase();
        let index = |rest: &str| -> Result<usize> {
            rest.trim_start_matches('_').parse().map_err(|_| Error::Parse(format!("unknown assumption {t:?}")))
        };
        match lower.as_str() {
            "purity_eq" | "purity" => return Ok(Assumption::PurityEq),
            "macwilliams" => return Ok(Assumption::AllMacWilliams),
            "shadows" => return Ok(Assumption::AllShadows),
            "a1_cap" => return Ok(Assumption::A1Cap),
            "a2_cap" => return Ok(Assumption::A2Cap),
            "odd_sectors_zero" => return Ok(Assumption::OddSectorsZero),
            _ => {}
        }
        if let Some(rest) = lower.strip_prefix("shadows:") {
            return Ok(Assumption::ShadowsUpTo(index(rest)?));
        }
        if let Some(rest) = lower.strip_prefix("cap:") {
            return Ok(Assumption::BinomialCap(index(rest)?));
        }
        if let Some(rest) = lower.strip_prefix('m') {
            return Ok(Assumption::MacWilliams(index(rest)?));
        }
        if let Some(rest) = lower.strip_prefix('b') {
            return Ok(Assumption::Shadow(index(rest)?));
        }
        Err(Error::Parse(format!("unknown assumption {t:?}")))
    }
}

/// Constraint system over `A_0..A_n`. `A_0 = 1` and `A_k ≥ 0` are implicit.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearProgram {
    pub n: usize,
    pub constraints: Vec<LinearForm>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct DualWeight {
    pub name: String,
    pub kind: FormKind,
    /// Free sign for equalities (including `A_0 = 1`), nonnegative for
    /// inequalities.
    pub weight: BigRational,
}

/// Exact optimum of a linear objective with a replayable dual.
#[derive(Clone, Debug, Serialize)]
pub struct DualWeightJson {
    pub name: String,
    pub kind: FormKind,
    pub weight: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct CertificateJson {
    pub n: usize,
    pub sense: Sense,
    pub objective: Vec<String>,
    pub value: String,
    pub value_f64: f64,
    pub dual_weights: Vec<DualWeightJson>,
    pub tight_point: Vec<String>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BoundCertificate {
    pub n: usize,
    pub sense: Sense,
    pub objective: Vec<BigRational>,
    pub value: BigRational,
    /// One entry per constraint, `A_0 = 1` first.
    pub dual_weights: Vec<DualWeight>,
    /// Primal optimizer `(A_0, …, A_n)`.
    pub tight_point: Vec<BigRational>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal(BoundCertificate),
    Unbounded,
}

impl LpOutcome {
    pub fn certificate(self) -> Result<BoundCertificate> {
        match self {
            LpOutcome::Optimal(c) => Ok(c),
            LpOutcome::Unbounded => Err(Error::Unsupported("objective is unbounded".into())),
        }
    }
}

pub const A0_ROW: &str = "A_0 = 1";

/// `e_k`, the objective picking out `A_k`.
pub fn sector_objective(n: usize, k: usize) -> Vec<BigRational> {
    let mut c = vec![BigRational::zero(); n + 1];
    c[k] = BigRational::one();
    c
}

fn cap_form(n: usize, k: usize, name: String) -> Result<LinearForm> {
    if k == 0 || k > n {
        return invalid_arg(format!("cap on A_{k} needs 1 <= k <= n = {n}"));
    }
    let mut coeff = vec![BigRational::zero(); n + 1];
    coeff[0] = BigRational::from_integer(binom_big(n, k));
    coeff[k] = -BigRational::one();
    LinearForm::new(name, FormKind::GeqZero, coeff)
}

pub fn build_program(n: usize, assumptions: &[Assumption]) -> Result<LinearProgram> {
    if n == 0 {
        return invalid_arg("programs need n >= 1");
    }
    let mut constraints = Vec::new();
    for a in assumptions {
        match a {
            Assumption::PurityEq => {
                let mut m0 = macwilliams_form(0, n)?;
                m0.name = "purity_eq".into();
                constraints.push(m0);
            }
            Assumption::MacWilliams(m) => constraints.push(macwilliams_form(*m, n)?),
            Assumption::AllMacWilliams => {
                for m in 0..=n {
                    constraints.push(macwilliams_form(m, n)?);
                }
            }
            Assumption::Shadow(k) => constraints.push(shadow_form(*k, n)?),
            Assumption::ShadowsUpTo(k) => {
                if *k > n {
                    return invalid_arg(format!("shadows up to {k} exceed n = {n}"));
                }
                for j in 0..=*k {
                    constraints.push(shadow_form(j, n)?);
                }
            }
            Assumption::AllShadows => {
                for k in 0..=n {
                    constraints.push(shadow_form(k, n)?);
                }
            }
            Assumption::A1Cap => constraints.push(cap_form(n, 1, "a1_cap".into())?),
            Assumption::A2Cap => {
                if n < 2 {
                    return invalid_arg("a2_cap needs n >= 2");
                }
                constraints.push(cap_form(n, 2, "a2_cap".into())?)
            }
            Assumption::BinomialCap(k) => constraints.push(cap_form(n, *k, format!("cap_A{k}"))?),
            Assumption::OddSectorsZero => {
                for k in (1..=n).step_by(2) {
                    let mut coeff = vec![BigRational::zero(); n + 1];
                    coeff[k] = BigRational::one();
                    constraints.push(LinearForm::new(format!("A_{k} = 0"), FormKind::EqualityZero, coeff)?);
                }
            }
            Assumption::Custom(f) => {
                if f.n() != n {
                    return Err(Error::DimensionMismatch(format!("custom form {} is on {} qubits", f.name, f.n())));
                }
                constraints.push(f.clone());
            }
        }
    }
    Ok(LinearProgram { n, constraints })
}

impl LinearProgram {
    pub fn unconstrained(n: usize) -> Self {
        Self { n, constraints: Vec::new() }
    }

    pub fn with_constraint(mut self, f: LinearForm) -> Result<Self> {
        if f.n() != self.n {
            return Err(Error::DimensionMismatch(format!("form {} is on {} qubits", f.name, f.n())));
        }
        self.constraints.push(f);
        Ok(self)
    }

    pub fn maximize(&self, objective: &[BigRational]) -> Result<LpOutcome> {
        self.solve(objective, Sense::Maximize)
    }

    pub fn minimize(&self, objective: &[BigRational]) -> Result<LpOutcome> {
        self.solve(objective, Sense::Minimize)
    }

    pub fn maximize_sector(&self, k: usize) -> Result<LpOutcome> {
        if k > self.n {
            return invalid_arg(format!("A_{k} does not exist for n = {}", self.n));
        }
        self.maximize(&sector_objective(self.n, k))
    }

    pub fn solve(&self, objective: &[BigRational], sense: Sense) -> Result<LpOutcome> {
        if objective.len() != self.n + 1 {
            return Err(Error::DimensionMismatch(format!(
                "objective has {} coefficients, expected {}",
                objective.len(),
                self.n + 1
            )));
        }
        let c: Vec<BigRational> = match sense {
            Sense::Maximize => objective.to_vec(),
            Sense::Minimize => objective.iter().map(|x| -x).collect(),
        };
        let Some(sol) = Simplex::new(self).solve(&c)? else {
            return Ok(LpOutcome::Unbounded);
        };
        let mut dual_weights = Vec::with_capacity(self.constraints.len() + 1);
        dual_weights.push(DualWeight { name: A0_ROW.into(), kind: FormKind::EqualityZero, weight: sol.y[0].clone() });
        for (f, y) in self.constraints.iter().zip(&sol.y[1..]) {
            let weight = match f.kind {
                FormKind::EqualityZero => y.clone(),
                FormKind::GeqZero => -y,
            };
            dual_weights.push(DualWeight { name: f.name.clone(), kind: f.kind, weight });
        }
        let value = match sense {
            Sense::Maximize => sol.value,
            Sense::Minimize => -sol.value,
        };
        Ok(LpOutcome::Optimal(BoundCertificate {
            n: self.n,
            sense,
            objective: objective.to_vec(),
            value,
            dual_weights,
            tight_point: sol.x,
        }))
    }

    /// Exact check that `point` satisfies every constraint.
    pub fn is_feasible(&self, point: &[BigRational]) -> Result<bool> {
        if point.len() != self.n + 1 || point[0] != BigRational::one() || point.iter().any(Signed::is_negative) {
            return Ok(false);
        }
        for f in &self.constraints {
            let v = f.evaluate_exact(point)?;
            let ok = match f.kind {
                FormKind::EqualityZero => v.is_zero(),
                FormKind::GeqZero => !v.is_negative(),
            };
            if !ok {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

impl BoundCertificate {
    pub fn value_f64(&self) -> f64 {
        rat_to_f64(&self.value)
    }

    pub fn tight_point_f64(&self) -> Vec<f64> {
        self.tight_point.iter().map(rat_to_f64).collect()
    }

    /// Replays the dual exactly against `lp`: the weighted combination
    /// `u_0 e_0 + Σ u_i E_i − Σ w_j G_j` must dominate the (sign-adjusted)
    /// objective coefficientwise and its constant must equal the value.
    pub fn replay(&self, lp: &LinearProgram) -> Result<()> {
        if lp.n != self.n || self.dual_weights.len() != lp.constraints.len() + 1 {
            return Err(Error::DimensionMismatch("certificate does not match the program".into()));
        }
        let n = self.n;
        let mut combo = vec![BigRational::zero(); n + 1];
        let first = &self.dual_weights[0];
        if first.name != A0_ROW {
            return Err(Error::InvalidArgument("first dual weight must belong to A_0 = 1".into()));
        }
        combo[0] += &first.weight;
        for (dw, f) in self.dual_weights[1..].iter().zip(&lp.constraints) {
            if dw.name != f.name || dw.kind != f.kind {
                return Err(Error::InvalidArgument(format!("dual weight {} does not match constraint {}", dw.name, f.name)));
            }
            match f.kind {
                FormKind::EqualityZero => {
                    for (acc, c) in combo.iter_mut().zip(&f.coeff) {
                        *acc += &dw.weight * c;
                    }
                }
                FormKind::GeqZero => {
                    if dw.weight.is_negative() {
                        return Err(Error::InvalidArgument(format!("negative weight on inequality {}", f.name)));
                    }
                    for (acc, c) in combo.iter_mut().zip(&f.coeff) {
                        *acc -= &dw.weight * c;
                    }
                }
            }
        }
        let target: Vec<BigRational> = match self.sense {
            Sense::Maximize => self.objective.clone(),
            Sense::Minimize => self.objective.iter().map(|x| -x).collect(),
        };
        for j in 1..=n {
            if combo[j] < target[j] {
                return Err(Error::InvalidArgument(format!("dual combination fails to dominate A_{j}")));
            }
        }
        // With A_0 = 1: t·x ≤ t_0 + Σ_{j≥1} combo_j x_j = t_0 + combo·x − combo_0
        // and combo·x = u_0 − Σ w_j G_j·x ≤ u_0.
        let bound = &target[0] + &first.weight - &combo[0];
        let internal = match self.sense {
            Sense::Maximize => self.value.clone(),
            Sense::Minimize => -self.value.clone(),
        };
        if bound != internal {
            return Err(Error::InvalidArgument("dual value does not reproduce the bound".into()));
        }
        Ok(())
    }

    /// Serializable form with rationals written as `"p/q"` strings.
    pub fn to_json(&self) -> CertificateJson {
        let strings = |v: &[BigRational]| v.iter().map(ToString::to_string).collect();
        CertificateJson {
            n: self.n,
            sense: self.sense,
            objective: strings(&self.objective),
            value: self.value.to_string(),
            value_f64: self.value_f64(),
            dual_weights: self
                .dual_weights
                .iter()
                .map(|d| DualWeightJson { name: d.name.clone(), kind: d.kind, weight: d.weight.to_string() })
                .collect(),
            tight_point: strings(&self.tight_point),
        }
    }

    /// Objective, exact value and one line per nonzero dual weight.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let obj = LinearForm { name: "objective".into(), kind: FormKind::GeqZero, coeff: self.objective.clone() };
        let obj_text = obj.to_string();
        let obj_text = obj_text.trim_start_matches("objective: ").trim_end_matches(" >= 0");
        let verb = match self.sense {
            Sense::Maximize => "maximize",
            Sense::Minimize => "minimize",
        };
        let _ = writeln!(s, "{verb} {obj_text}");
        let _ = writeln!(s, "value = {}", self.value);
        for dw in self.dual_weights.iter().filter(|d| !d.weight.is_zero()) {
            let _ = writeln!(s, "  {:>20}  weight {}", dw.name, dw.weight);
        }
        let point: Vec<String> = self.tight_point.iter().map(ToString::to_string).collect();
        let _ = writeln!(s, "optimizer A = ({})", point.join(", "));
        s
    }
}

impl fmt::Display for BoundCertificate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_text())
    }
}

struct Solution {
    value: BigRational,
    x: Vec<BigRational>,
    y: Vec<BigRational>,
}

/// Dense tableau `B^{-1} [A | b]` with columns
/// `[A_0..A_n | slacks of inequalities | artificials]`.
struct Simplex {
    rows: usize,
    n_struct: usize,
    n_real: usize,
    cols: usize,
    t: Vec<Vec<BigRational>>,
    basis: Vec<usize>,
}

impl Simplex {
    fn new(lp: &LinearProgram) -> Self {
        let n_struct = lp.n + 1;
        let n_geq = lp.constraints.iter().filter(|f| f.kind == FormKind::GeqZero).count();
        let rows = lp.constraints.len() + 1;
        let n_real = n_struct + n_geq;
        let cols = n_real + rows;
        let mut t = vec![vec![BigRational::zero(); cols + 1]; rows];
        t[0][0] = BigRational::one();
        t[0][cols] = BigRational::one();
        let mut slack = n_struct;
        for (i, f) in lp.constraints.iter().enumerate() {
            let r = i + 1;
            for (j, c) in f.coeff.iter().enumerate() {
                t[r][j] = c.clone();
            }
            if f.kind == FormKind::GeqZero {
                t[r][slack] = -BigRational::one();
                slack += 1;
            }
        }
        for (r, row) in t.iter_mut().enumerate() {
            row[n_real + r] = BigRational::one();
        }
        let basis = (0..rows).map(|r| n_real + r).collect();
        Self { rows, n_struct, n_real, cols, t, basis }
    }

    fn reduced_cost(&self, cost: &[BigRational], j: usize) -> BigRational {
        let mut r = -cost[j].clone();
        for (i, &b) in self.basis.iter().enumerate() {
            if !cost[b].is_zero() && !self.t[i][j].is_zero() {
                r += &cost[b] * &self.t[i][j];
            }
        }
        r
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col].clone();
        for v in self.t[row].iter_mut() {
            if !v.is_zero() {
                *v /= &p;
            }
        }
        let pivot_row = self.t[row].clone();
        for (r, line) in self.t.iter_mut().enumerate() {
            if r == row || line[col].is_zero() {
                continue;
            }
            let factor = line[col].clone();
            for (v, pv) in line.iter_mut().zip(&pivot_row) {
                if !pv.is_zero() {
                    *v -= &factor * pv;
                }
            }
        }
        self.basis[row] = col;
    }

    /// Maximizes `cost · x` over columns `< limit`. Returns false if unbounded.
    fn run(&mut self, cost: &[BigRational], limit: usize) -> bool {
        loop {
            let entering = (0..limit).find(|&j| !self.basis.contains(&j) && self.reduced_cost(cost, j).is_negative());
            let Some(col) = entering else {
                return true;
            };
            let mut best: Option<(usize, BigRational)> = None;
            for r in 0..self.rows {
                let a = &self.t[r][col];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[r][self.cols] / a;
                let better = match &best {
                    None => true,
                    Some((br, bv)) => ratio < *bv || (ratio == *bv && self.basis[r] < self.basis[*br]),
                };
                if better {
                    best = Some((r, ratio));
                }
            }
            let Some((row, _)) = best else {
                return false;
            };
            self.pivot(row, col);
        }
    }

    fn solve(mut self, c: &[BigRational]) -> Result<Option<Solution>> {
        // Phase 1: maximize −Σ artificials.
        let mut phase1 = vec![BigRational::zero(); self.cols];
        for v in phase1.iter_mut().skip(self.n_real) {
            *v = -BigRational::one();
        }
        self.run(&phase1, self.cols);
        let infeasibility: BigRational =
            (0..self.rows).filter(|&r| self.basis[r] >= self.n_real).map(|r| self.t[r][self.cols].clone()).sum();
        if infeasibility.is_positive() {
            return Err(Error::Infeasible(format!("phase one ended with artificial mass {infeasibility}")));
        }
        // Drive zero-level artificials out of the basis where possible.
        for r in 0..self.rows {
            if self.basis[r] >= self.n_real {
                if let Some(col) = (0..self.n_real).find(|&j| !self.t[r][j].is_zero() && !self.basis.contains(&j)) {
                    self.pivot(r, col);
                }
            }
        }
        // Phase 2 over real columns only.
        let mut cost = vec![BigRational::zero(); self.cols];
        cost[..self.n_struct].clone_from_slice(c);
        if !self.run(&cost, self.n_real) {
            return Ok(None);
        }
        let mut x = vec![BigRational::zero(); self.n_struct];
        for (r, &b) in self.basis.iter().enumerate() {
            if b < self.n_struct {
                x[b] = self.t[r][self.cols].clone();
            }
        }
        let value = c.iter().zip(&x).fold(BigRational::zero(), |acc, (ci, xi)| acc + ci * xi);
        let y = (0..self.rows).map(|r| self.reduced_cost(&cost, self.n_real + r)).collect();
        Ok(Some(Solution { value, x, y }))
    }
}

/// Objective built from small integers.
pub fn int_objective(coeff: &[i64]) -> Vec<BigRational> {
    coeff.iter().map(|&c| rat_int(c)).collect()
}
