//! The complete two- and three-qubit sector-length polytopes.

use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::combinatorics::subsets_of_size;
use crate::entanglement::{detect, Detection};
use crate::error::{invalid_arg, Error, Result};
use crate::identities::{rat_to_f64, FormJson, FormKind, LinearForm};
use crate::lp::{BoundCertificate, LinearProgram};
use crate::sectors::SectorVector;

pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Clone, Debug)]
pub struct Polytope {
    pub n: usize,
    /// Named facets; positivity `A_k ≥ 0` is implicit.
    pub facets: Vec<LinearForm>,
}

fn facet(name: &str, coeff: &[i64]) -> LinearForm {
    LinearForm::from_ints(name, FormKind::GeqZero, coeff).expect("facet literals have n >= 1")
}

/// Facet list for `n ∈ {2, 3}`.
pub fn facets(n: usize) -> Result<Polytope> {
    let facets = match n {
        2 => vec![facet("purity", &[3, -1, -1]), facet("state_inv", &[1, -1, 1])],
        3 => vec![
            // Implied by the others and touching only two vertices, but kept
            // so classifications name it.
            facet("purity", &[7, -1, -1, -1]),
            facet("state_inv", &[1, -1, 1, -1]),
            facet("a1_cap", &[3, -1, 0, 0]),
            facet("schmidt_A2", &[3, 0, -1, 0]),
            facet("sssa", &[3, -1, -1, 3]),
        ],
        _ => return Err(Error::Unsupported(format!("complete polytopes are known for n = 2, 3 only, got {n}"))),
    };
    Ok(Polytope { n, facets })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "status", content = "facets", rename_all = "snake_case")]
pub enum Membership {
    Inside,
    Boundary(Vec<String>),
    Outside(Vec<String>),
}

impl Membership {
    pub fn label(&self) -> &'static str {
        match self {
            Membership::Inside => "inside",
            Membership::Boundary(_) => "boundary",
            Membership::Outside(_) => "outside",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct Classification {
    pub membership: Membership,
    /// Slack of every named facet followed by positivity slacks `A_k`.
    pub slacks: Vec<(String, f64)>,
}

impl Classification {
    /// Named facet with the smallest slack.
    pub fn nearest_facet(&self, polytope: &Polytope) -> (&str, f64) {
        self.slacks[..polytope.facets.len()]
            .iter()
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .map(|(name, s)| (name.as_str(), *s))
            .expect("polytopes have facets")
    }
}

impl Polytope {
    fn all_constraints(&self) -> Vec<LinearForm> {
        let mut all = self.facets.clone();
        for k in 1..=self.n {
            let mut coeff = vec![0i64; self.n + 1];
            coeff[k] = 1;
            all.push(facet(&format!("A{k}>=0"), &coeff));
        }
        all
    }

    /// Classifies `v`. Boundary status only refers to named facets, while
    /// negative positivity slacks also count as violations.
    pub fn contains(&self, v: &SectorVector, tol: f64) -> Result<Classification> {
        if v.n != self.n {
            return Err(Error::DimensionMismatch(format!("polytope for n = {}, vector for n = {}", self.n, v.n)));
        }
        let mut slacks = Vec::new();
        for f in self.all_constraints() {
            slacks.push((f.name.clone(), f.evaluate(v)?));
        }
        let violated: Vec<String> = slacks.iter().filter(|(_, s)| *s < -tol).map(|(n, _)| n.clone()).collect();
        let membership = if !violated.is_empty() {
            Membership::Outside(violated)
        } else {
            let tight: Vec<String> =
                slacks[..self.facets.len()].iter().filter(|(_, s)| s.abs() <= tol).map(|(n, _)| n.clone()).collect();
            if tight.is_empty() {
                Membership::Inside
            } else {
                Membership::Boundary(tight)
            }
        };
        Ok(Classification { membership, slacks })
    }

    /// Exact vertices `(A_1, …, A_n)`, sorted lexicographically, found by
    /// intersecting every `n`-subset of constraints.
    pub fn vertices(&self) -> Vec<Vec<BigRational>> {
        let all = self.all_constraints();
        let n = self.n;
        let mut out: Vec<Vec<BigRational>> = Vec::new();
        for mask in subsets_of_size(all.len(), n) {
            let chosen: Vec<&LinearForm> = (0..all.len()).filter(|i| mask >> i & 1 == 1).map(|i| &all[i]).collect();
            let rows: Vec<Vec<BigRational>> = chosen.iter().map(|f| f.coeff[1..].to_vec()).collect();
            let rhs: Vec<BigRational> = chosen.iter().map(|f| -f.coeff[0].clone()).collect();
            let Some(x) = solve_exact(rows, rhs) else {
                continue;
            };
            let mut point = vec![BigRational::from_integer(1.into())];
            point.extend(x.iter().cloned());
            let feasible = all.iter().all(|f| !f.evaluate_exact(&point).expect("sizes agree").is_negative());
            if feasible && !out.contains(&x) {
                out.push(x);
            }
        }
        out.sort();
        out
    }

    /// Minimizes `form` over the polytope; the form is implied iff the
    /// returned value is nonnegative.
    pub fn implication(&self, form: &LinearForm) -> Result<BoundCertificate> {
        if form.n() != self.n {
            return Err(Error::DimensionMismatch(format!("form on {} qubits", form.n())));
        }
        let lp = LinearProgram { n: self.n, constraints: self.facets.clone() };
        let cert = lp.minimize(&form.coeff)?.certificate()?;
        cert.replay(&lp)?;
        Ok(cert)
    }

    pub fn to_json(&self) -> PolytopeJson {
        PolytopeJson {
            n: self.n,
            facets: self.facets.iter().map(LinearForm::to_json).collect(),
            vertices: self.vertices().iter().map(|v| v.iter().map(rat_to_f64).collect()).collect(),
            vertices_exact: self.vertices().iter().map(|v| v.iter().map(ToString::to_string).collect()).collect(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PolytopeJson {
    pub n: usize,
    pub facets: Vec<FormJson>,
    pub vertices: Vec<Vec<f64>>,
    pub vertices_exact: Vec<Vec<String>>,
}

/// Gauss–Jordan over the rationals; `None` if singular.
pub(crate) fn solve_exact(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        b.swap(col, pivot);
        let p = a[col][col].clone();
        for c in col..n {
            a[col][c] = &a[col][c] / &p;
        }
        b[col] = &b[col] / &p;
        for r in 0..n {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for c in col..n {
                    let d = &f * &a[col][c];
                    a[r][c] -= d;
                }
                let d = &f * &b[col];
                b[r] -= d;
            }
        }
    }
    Some(b)
}

/// Three-qubit entanglement flags drawn as lines in the polytope chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EntanglementLines {
    pub not_fully_separable: bool,
    pub gme_detected: bool,
}

pub fn entanglement_lines(v: &SectorVector) -> Result<EntanglementLines> {
    if v.n != 3 {
        return invalid_arg(format!("entanglement lines are drawn for n = 3, got {}", v.n));
    }
    let Detection { entangled, gme_detected, .. } = detect(v, DEFAULT_TOL)?;
    Ok(EntanglementLines { not_fully_separable: entangled, gme_detected })
}

/// One CSV record: sector coordinates, classification, nearest facet and
/// its slack.
pub fn scan_record(polytope: &Polytope, v: &SectorVector, tol: f64) -> Result<Vec<String>> {
    let c = polytope.contains(v, tol)?;
    let (nearest, slack) = c.nearest_facet(polytope);
    let mut row: Vec<String> = v.tail().iter().map(|x| format!("{x:.16e}")).collect();
    row.push(c.membership.label().to_string());
    row.push(nearest.to_string());
    row.push(format!("{slack:.16e}"));
    Ok(row)
}

pub fn scan_header(n: usize) -> Vec<String> {
    let mut h: Vec<String> = (1..=n).map(|k| format!("A_{k}")).collect();
    h.extend(["classification", "nearest_facet", "slack"].map(String::from));
    h
}
