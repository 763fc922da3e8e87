//! Entanglement criteria from sector lengths, the product composition rule
//! and a spectral necessary condition for marginal representability.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{invalid_arg, Error, Result};
use crate::sectors::{pair_sector_sum, SectorVector};
use crate::state::DensityMatrix;

/// `A_k(ρ_A ⊗ ρ_B) = Σ_j A_j(ρ_A) A_{k-j}(ρ_B)`.
pub fn compose_product(va: &SectorVector, vb: &SectorVector) -> SectorVector {
    let n = va.n + vb.n;
    let mut a = vec![0.0; n + 1];
    for (i, x) in va.a.iter().enumerate() {
        for (j, y) in vb.a.iter().enumerate() {
            a[i + j] += x * y;
        }
    }
    SectorVector { n, a }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Criterion {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub fired: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Detection {
    pub n: usize,
    /// Not fully separable.
    pub entangled: bool,
    pub gme_detected: bool,
    pub criteria: Vec<Criterion>,
    pub notes: Vec<String>,
}

impl Detection {
    /// First criterion that fired, if any.
    pub fn criterion_used(&self) -> Option<&str> {
        self.criteria.iter().find(|c| c.fired).map(|c| c.name.as_str())
    }
}

fn criterion(name: &str, value: f64, threshold: f64, tol: f64) -> Criterion {
    Criterion { name: name.into(), value, threshold, fired: value > threshold + tol }
}

/// Applies the separability and biseparability bounds on `A_2`, `A_3`, `A_4`.
///
/// Fully separable bounds follow from the product rule: a product of
/// single-qubit states has `A_k = e_k(a_1, …, a_n)` with `a_i ≤ 1`.
pub fn detect(v: &SectorVector, tol: f64) -> Result<Detection> {
    let mut notes = Vec::new();
    let (sep, gme) = match v.n {
        2 => {
            let c = criterion("A_2 > 1 (separable bound)", v.a[2], 1.0, tol);
            (vec![c.clone()], vec![Criterion { name: "A_2 > 1 (two qubits: entangled is genuine)".into(), ..c }])
        }
        3 => (
            vec![criterion("A_3 > 1 (fully separable bound)", v.a[3], 1.0, tol)],
            vec![criterion("A_3 > 3 (biseparable bound)", v.a[3], 3.0, tol)],
        ),
        4 => {
            notes.push("A_4 cannot detect genuine multipartite entanglement: biseparable states reach the global bound 9".into());
            (
                vec![
                    criterion("A_3 > 4 (fully separable bound)", v.a[3], 4.0, tol),
                    criterion("A_4 > 1 (fully separable bound)", v.a[4], 1.0, tol),
                ],
                vec![criterion("A_3 > 7 (biseparable bound)", v.a[3], 7.0, tol)],
            )
        }
        n => return Err(Error::Unsupported(format!("detection criteria exist for n = 2, 3, 4, got {n}"))),
    };
    let gme_detected = gme.iter().any(|c| c.fired);
    let entangled = gme_detected || sep.iter().any(|c| c.fired);
    let mut criteria = gme;
    criteria.extend(sep);
    Ok(Detection { n: v.n, entangled, gme_detected, criteria, notes })
}

/// Eigenvalues of one- and two-body marginals, keyed by 1-based qubits.
#[derive(Clone, Debug, PartialEq)]
pub struct MarginalSpectra {
    pub n: usize,
    pub one_body: BTreeMap<usize, Vec<f64>>,
    pub two_body: BTreeMap<(usize, usize), Vec<f64>>,
}

/// JSON shape `{"n", "one": {"1": [..]}, "two": {"1,2": [..]}}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectraFile {
    pub n: usize,
    pub one: BTreeMap<String, Vec<f64>>,
    pub two: BTreeMap<String, Vec<f64>>,
}

fn sorted_desc(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

impl MarginalSpectra {
    pub fn from_state(rho: &DensityMatrix) -> Result<Self> {
        let n = rho.num_qubits();
        let mut one_body = BTreeMap::new();
        let mut two_body = BTreeMap::new();
        for i in 1..=n {
            one_body.insert(i, sorted_desc(rho.partial_trace(&[i])?.eigenvalues()));
            for j in i + 1..=n {
                two_body.insert((i, j), sorted_desc(rho.partial_trace(&[i, j])?.eigenvalues()));
            }
        }
        Ok(Self { n, one_body, two_body })
    }

    pub fn validate(&self) -> Result<()> {
        let check = |label: String, spec: &[f64], len: usize| -> Result<()> {
            if spec.len() != len {
                return Err(Error::InvalidState(format!("spectrum {label} has {} entries, expected {len}", spec.len())));
            }
            if spec.iter().any(|&x| !(-1e-10..=1.0 + 1e-10).contains(&x)) {
                return Err(Error::InvalidState(format!("spectrum {label} has entries outside [0, 1]")));
            }
            let total: f64 = spec.iter().sum();
            if (total - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidState(format!("spectrum {label} sums to {total}")));
            }
            Ok(())
        };
        for (i, s) in &self.one_body {
            check(i.to_string(), s, 2)?;
        }
        for ((i, j), s) in &self.two_body {
            check(format!("{i},{j}"), s, 4)?;
        }
        Ok(())
    }

    pub fn to_file(&self) -> SpectraFile {
        SpectraFile {
            n: self.n,
            one: self.one_body.iter().map(|(k, v)| (k.to_string(), v.clone())).collect(),
            two: self.two_body.iter().map(|((i, j), v)| (format!("{i},{j}"), v.clone())).collect(),
        }
    }

    pub fn from_file(file: &SpectraFile) -> Result<Self> {
        let qubit = |s: &str| -> Result<usize> {
            let q: usize = s.trim().parse().map_err(|_| Error::Parse(format!("bad qubit label {s:?}")))?;
            if q == 0 || q > file.n {
                return Err(Error::Parse(format!("qubit {q} outside 1..={}", file.n)));
            }
            Ok(q)
        };
        let mut one_body = BTreeMap::new();
        for (k, v) in &file.one {
            one_body.insert(qubit(k)?, sorted_desc(v.clone()));
        }
        let mut two_body = BTreeMap::new();
        for (k, v) in &file.two {
            let (a, b) = k.split_once(',').ok_or_else(|| Error::Parse(format!("pair label {k:?} needs a comma")))?;
            let (a, b) = (qubit(a)?, qubit(b)?);
            if a == b {
                return Err(Error::Parse(format!("pair label {k:?} repeats a qubit")));
            }
            two_body.insert((a.min(b), a.max(b)), sorted_desc(v.clone()));
        }
        let spectra = Self { n: file.n, one_body, two_body };
        spectra.validate()?;
        Ok(spectra)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(&self.to_file())?)
    }

    pub fn from_json(s: &str) -> Result<Self> {
        Self::from_file(&serde_json::from_str(s)?)
    }

    fn pair(&self, i: usize, j: usize) -> Option<&Vec<f64>> {
        self.two_body.get(&(i.min(j), i.max(j)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RepresentabilityResult {
    pub passes: bool,
    pub lhs: f64,
    pub rhs: f64,
}

/// `2 Σ_{j≠i} Σ_k (λ_k^{(ij)})² ≤ Σ_{j≠i} Σ_k (λ_k^{(j)})² + (n−1) Σ_k (λ_k^{(i)})²`.
/// A failure rules out every global state with these marginal spectra.
pub fn representability_check(spectra: &MarginalSpectra, pivot: usize) -> Result<RepresentabilityResult> {
    let n = spectra.n;
    if n < 4 {
        return invalid_arg(format!("the spectral condition is stated for n >= 4, got {n}"));
    }
    if pivot == 0 || pivot > n {
        return invalid_arg(format!("pivot {pivot} outside 1..={n}"));
    }
    let sq = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>();
    let missing = |what: String| Error::InvalidArgument(format!("missing spectrum for {what}"));
    let own = spectra.one_body.get(&pivot).ok_or_else(|| missing(pivot.to_string()))?;
    let mut lhs = 0.0;
    let mut rhs = (n - 1) as f64 * sq(own);
    for j in (1..=n).filter(|&j| j != pivot) {
        let pair = spectra.pair(pivot, j).ok_or_else(|| missing(format!("{},{}", pivot.min(j), pivot.max(j))))?;
        let single = spectra.one_body.get(&j).ok_or_else(|| missing(j.to_string()))?;
        lhs += 2.0 * sq(pair);
        rhs += sq(single);
    }
    Ok(RepresentabilityResult { passes: lhs <= rhs + 1e-10, lhs, rhs })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairSumCheck {
    pub value: f64,
    pub bound: f64,
    pub passes: bool,
    pub warning: Option<String>,
}

/// `Σ_{j≠i} A_2(ρ_{ij}) ≤ n − 1`.
pub fn pair_sum_check(rho: &DensityMatrix, pivot: usize) -> Result<PairSumCheck> {
    let n = rho.num_qubits();
    let value = pair_sector_sum(rho, pivot)?;
    let bound = (n - 1) as f64;
    let warning = (n < 4).then(|| format!("the pair-sum bound is proven for n >= 4; for n = {n} use A_2 <= 3"));
    Ok(PairSumCheck { value, bound, passes: value <= bound + 1e-9, warning })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::sectors::sector_lengths;
    use crate::zoo;

    fn sv(a: &[f64]) -> SectorVector {
        SectorVector::from_tail(a).unwrap()
    }

    #[test]
    fn composition_examples() {
        let out = compose_product(&sv(&[1.0]), &sv(&[2.0, 1.0]));
        assert_eq!(out.a, vec![1.0, 3.0, 3.0, 1.0]);
        let a = sv(&[0.3]);
        let b = sv(&[0.7]);
        assert!((compose_product(&a, &b).a[2] - 0.21).abs() < 1e-15);
        let mixed = sv(&[0.0]);
        let x = sv(&[0.5, 1.5]);
        assert_eq!(compose_product(&mixed, &x).a, vec![1.0, 0.5, 1.5, 0.0]);
    }

    #[test]
    fn composition_matches_tensor() {
        let mut rng = SeededRng::new(5);
        for _ in 0..10 {
            let (na, nb) = (1 + rng.below(3), 1 + rng.below(3));
            let ra = zoo::random_mixed_with(na, 1 + rng.below(1 << na), &mut rng).unwrap();
            let rb = zoo::random_mixed_with(nb, 1 + rng.below(1 << nb), &mut rng).unwrap();
            let direct = sector_lengths(&ra.tensor(&rb).unwrap()).unwrap();
            let composed = compose_product(&sector_lengths(&ra).unwrap(), &sector_lengths(&rb).unwrap());
            assert!(direct.a.iter().zip(&composed.a).all(|(x, y)| (x - y).abs() < 1e-10));
        }
    }

    #[test]
    fn detection_examples() {
        let chi = detect(&sv(&[0.0, 2.0, 8.0, 5.0]), 1e-9).unwrap();
        assert!(chi.gme_detected);
        assert_eq!(chi.criterion_used(), Some("A_3 > 7 (biseparable bound)"));
        assert!(!chi.notes.is_empty());
        assert!(detect(&sv(&[0.0, 3.0, 4.0]), 1e-9).unwrap().gme_detected);
        let classical = detect(&sv(&[0.0, 1.0]), 1e-9).unwrap();
        assert!(!classical.entangled && !classical.gme_detected);
        assert!(detect(&sv(&[0.0, 3.0]), 1e-9).unwrap().entangled);
        assert!(matches!(detect(&sv(&[0.0; 5]), 1e-9), Err(Error::Unsupported(_))));
        // Biseparable but not fully separable: Bell pair times a qubit.
        let bell = detect(&sv(&[0.0, 3.0, 0.0]), 1e-9).unwrap();
        assert!(!bell.entangled);
        let ghz3 = detect(&sv(&[0.0, 3.0, 2.0]), 1e-9).unwrap();
        assert!(ghz3.entangled && !ghz3.gme_detected);
    }

    #[test]
    fn representability_examples() {
        let mut one = BTreeMap::new();
        let mut two = BTreeMap::new();
        for i in 1..=4 {
            one.insert(i, vec![0.5, 0.5]);
            for j in i + 1..=4 {
                two.insert((i, j), vec![0.25; 4]);
            }
        }
        let uniform = MarginalSpectra { n: 4, one_body: one.clone(), two_body: two.clone() };
        let r = representability_check(&uniform, 1).unwrap();
        assert!(r.passes && (r.lhs - 1.5).abs() < 1e-15 && (r.rhs - 3.0).abs() < 1e-15);
        for v in two.values_mut() {
            *v = vec![1.0, 0.0, 0.0, 0.0];
        }
        let bell = MarginalSpectra { n: 4, one_body: one, two_body: two };
        let r = representability_check(&bell, 1).unwrap();
        assert!(!r.passes && (r.lhs - 6.0).abs() < 1e-15 && (r.rhs - 3.0).abs() < 1e-15);
        let harvested = MarginalSpectra::from_state(&zoo::random_pure(4, 9).unwrap()).unwrap();
        harvested.validate().unwrap();
        assert!(representability_check(&harvested, 2).unwrap().passes);
        let round = MarginalSpectra::from_json(&harvested.to_json().unwrap()).unwrap();
        assert_eq!(round, harvested);
        let mut partial = harvested.clone();
        partial.two_body.remove(&(1, 3));
        assert!(representability_check(&partial, 1).is_err());
    }

    #[test]
    fn pair_sums() {
        let c = pair_sum_check(&zoo::product_zero(4).unwrap(), 1).unwrap();
        assert!(c.passes && (c.value - 3.0).abs() < 1e-12 && c.warning.is_none());
        let c = pair_sum_check(&zoo::ghz(4).unwrap(), 1).unwrap();
        assert!(c.passes && (c.value - 3.0).abs() < 1e-12);
        assert!(pair_sum_check(&zoo::ghz(3).unwrap(), 1).unwrap().warning.is_some());
    }

    #[test]
    fn biseparable_four_qubit_bound() {
        let mut rng = SeededRng::new(77);
        let mut worst: f64 = 0.0;
        for _ in 0..200 {
            let split = 1 + rng.below(3);
            let a = zoo::random_mixed_with(split, 1, &mut rng).unwrap();
            let b = zoo::random_mixed_with(4 - split, 1, &mut rng).unwrap();
            let v = sector_lengths(&a.tensor(&b).unwrap()).unwrap();
            worst = worst.max(v.a[3]);
            assert!(!detect(&v, 1e-9).unwrap().gme_detected);
        }
        let ghz_split = zoo::ghz(3).unwrap().tensor(&zoo::product_zero(1).unwrap()).unwrap();
        assert!((sector_lengths(&ghz_split).unwrap().a[3] - 7.0).abs() < 1e-12);
        assert!(worst <= 7.0 + 1e-9);
    }
}
