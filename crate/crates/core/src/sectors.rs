//! Sector lengths, sector entropies and mutual linear entropies.
//!
//! Two independent routes compute `A_k`: summing squared Bloch coefficients
//! by weight, and inclusion–exclusion over the purities of all reduced
//! states. The first is used up to seven qubits, the second beyond.

use serde::{Deserialize, Serialize};

use crate::combinatorics::binom_f64;
use crate::error::{invalid_arg, Error, Result};
use crate::linalg;
use crate::pauli::PauliString;
use crate::state::{DensityMatrix, MAX_BLOCH_QUBITS};

/// `(A_0, …, A_n)` with `A_0 = 1`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SectorVector {
    pub n: usize,
    #[serde(rename = "A")]
    pub a: Vec<f64>,
}

impl SectorVector {
    /// From `(A_0, …, A_n)`.
    pub fn new(a: Vec<f64>) -> Result<Self> {
        if a.len() < 2 {
            return invalid_arg("a sector vector needs A_0 and at least A_1");
        }
        Ok(Self { n: a.len() - 1, a })
    }

    /// From `(A_1, …, A_n)`, prepending `A_0 = 1`.
    pub fn from_tail(tail: &[f64]) -> Result<Self> {
        let mut a = Vec::with_capacity(tail.len() + 1);
        a.push(1.0);
        a.extend_from_slice(tail);
        Self::new(a)
    }

    pub fn get(&self, k: usize) -> f64 {
        self.a.get(k).copied().unwrap_or(0.0)
    }

    pub fn tail(&self) -> &[f64] {
        &self.a[1..]
    }

    /// `Tr(ρ²) = 2^{-n} Σ_k A_k`.
    pub fn purity(&self) -> f64 {
        self.a.iter().sum::<f64>() / (1u64 << self.n) as f64
    }

    /// Checks `A_0 = 1`, `A_k ≥ -1e-10` and `Σ A_k ≤ 2^n + 1e-9`.
    pub fn check(&self) -> Result<()> {
        if (self.a[0] - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidState(format!("A_0 = {} instead of 1", self.a[0])));
        }
        if let Some((k, v)) = self.a.iter().enumerate().find(|(_, v)| **v < -1e-10) {
            return Err(Error::InvalidState(format!("A_{k} = {v} is negative")));
        }
        let total: f64 = self.a.iter().sum();
        if total > (1u64 << self.n) as f64 + 1e-9 {
            return Err(Error::InvalidState(format!("Σ A_k = {total} exceeds 2^n")));
        }
        Ok(())
    }
}

/// `(S_L^(1), …, S_L^(n))`, stored with `s[k-1] = S_L^(k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EntropyVector {
    pub n: usize,
    pub s: Vec<f64>,
}

impl EntropyVector {
    pub fn get(&self, k: usize) -> f64 {
        self.s[k - 1]
    }
}

/// `(I_L^(1), …, I_L^(n))`, stored with `i[k-1] = I_L^(k)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MutualVector {
    pub n: usize,
    pub i: Vec<f64>,
}

impl MutualVector {
    pub fn get(&self, k: usize) -> f64 {
        self.i[k - 1]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SectorRoute {
    /// Squared Bloch coefficients grouped by weight.
    PauliSum,
    /// Inclusion–exclusion over reduced-state purities.
    Purity,
}

pub fn sector_lengths(rho: &DensityMatrix) -> Result<SectorVector> {
    let route = if rho.num_qubits() <= MAX_BLOCH_QUBITS { SectorRoute::PauliSum } else { SectorRoute::Purity };
    sector_lengths_with(rho, route)
}

pub fn sector_lengths_with(rho: &DensityMatrix, route: SectorRoute) -> Result<SectorVector> {
    match route {
        SectorRoute::PauliSum => {
            let n = rho.num_qubits();
            if n > MAX_BLOCH_QUBITS {
                return Err(Error::Unsupported(format!("Pauli route is limited to {MAX_BLOCH_QUBITS} qubits")));
            }
            let mut a = vec![0.0; n + 1];
            for p in PauliString::all(n) {
                let c = p.sparse().trace_with(rho.matrix()).re;
                a[p.weight()] += c * c;
            }
            SectorVector::new(a)
        }
        SectorRoute::Purity => {
            let n = rho.num_qubits();
            let purities = subset_purities(rho);
            let mut q = vec![0.0; n + 1];
            for (mask, pur) in purities.iter().enumerate() {
                let k = mask.count_ones() as usize;
                q[k] += (1u64 << k) as f64 * pur;
            }
            let a = (0..=n)
                .map(|k| {
                    (0..=k)
                        .map(|j| {
                            let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                            sign * binom_f64(n - j, k - j) * q[j]
                        })
                        .sum()
                })
                .collect();
            SectorVector::new(a)
        }
    }
}

/// Runs both routes and returns the largest disagreement.
pub fn cross_check_routes(rho: &DensityMatrix) -> Result<f64> {
    let a = sector_lengths_with(rho, SectorRoute::PauliSum)?;
    let b = sector_lengths_with(rho, SectorRoute::Purity)?;
    Ok(a.a.iter().zip(&b.a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max))
}

/// `Tr(ρ_S²)` for every subset `S` of qubits, indexed by bitmask (qubit `q`
/// is bit `n - q`); the empty subset has purity 1.
pub fn subset_purities(rho: &DensityMatrix) -> Vec<f64> {
    let n = rho.num_qubits();
    (0..1usize << n)
        .map(|mask| {
            if mask == 0 {
                1.0
            } else {
                linalg::reduce(rho.matrix(), n, mask).iter().map(|z| z.norm_sqr()).sum()
            }
        })
        .collect()
}

/// `S_L(ρ) = 2[1 - Tr ρ²]`.
pub fn linear_entropy(rho: &DensityMatrix) -> f64 {
    2.0 * (1.0 - rho.purity())
}

/// `S_L^(k) = Σ_{|K|=k} S_L(ρ_K)` computed directly from the reductions.
pub fn sector_entropies(rho: &DensityMatrix) -> EntropyVector {
    let n = rho.num_qubits();
    let mut s = vec![0.0; n];
    for (mask, pur) in subset_purities(rho).into_iter().enumerate().skip(1) {
        s[mask.count_ones() as usize - 1] += 2.0 * (1.0 - pur);
    }
    EntropyVector { n, s }
}

/// `S_L^(k) = 2^{1-k} [C(n,k) 2^k - Σ_{j≤k} C(n-j, k-j) A_j]`.
pub fn sectors_to_entropies(v: &SectorVector) -> EntropyVector {
    let n = v.n;
    let s = (1..=n)
        .map(|k| {
            let inner: f64 = (0..=k).map(|j| binom_f64(n - j, k - j) * v.a[j]).sum();
            2f64.powi(1 - k as i32) * (binom_f64(n, k) * 2f64.powi(k as i32) - inner)
        })
        .collect();
    EntropyVector { n, s }
}

/// `A_k = C(n,k) - Σ_{j=1}^k (-1)^{k-j} 2^{j-1} C(n-j, k-j) S_L^(j)`.
pub fn entropies_to_sectors(e: &EntropyVector) -> Result<SectorVector> {
    let n = e.n;
    if e.s.len() != n {
        return Err(Error::DimensionMismatch(format!("{} entropies for n = {n}", e.s.len())));
    }
    let mut a = vec![1.0; n + 1];
    for k in 1..=n {
        let corr: f64 = (1..=k)
            .map(|j| {
                let sign = if (k - j) % 2 == 0 { 1.0 } else { -1.0 };
                sign * 2f64.powi(j as i32 - 1) * binom_f64(n - j, k - j) * e.s[j - 1]
            })
            .sum();
        a[k] = binom_f64(n, k) - corr;
    }
    SectorVector::new(a)
}

/// `I_L^(k) = Σ_{j=1}^k (-1)^{j-1} C(n-j, k-j) S_L^(j)`.
pub fn mutual_entropies(e: &EntropyVector) -> MutualVector {
    let n = e.n;
    let i = (1..=n)
        .map(|k| {
            (1..=k)
                .map(|j| {
                    let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                    sign * binom_f64(n - j, k - j) * e.s[j - 1]
                })
                .sum()
        })
        .collect();
    MutualVector { n, i }
}

/// Inverse of [`mutual_entropies`] by forward substitution.
pub fn mutual_to_entropies(m: &MutualVector) -> Result<EntropyVector> {
    let n = m.n;
    if m.i.len() != n {
        return Err(Error::DimensionMismatch(format!("{} mutual entropies for n = {n}", m.i.len())));
    }
    let mut s = vec![0.0; n];
    for k in 1..=n {
        let known: f64 = (1..k)
            .map(|j| {
                let sign = if (j - 1) % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom_f64(n - j, k - j) * s[j - 1]
            })
            .sum();
        let diag = if (k - 1) % 2 == 0 { 1.0 } else { -1.0 };
        s[k - 1] = (m.i[k - 1] - known) / diag;
    }
    Ok(EntropyVector { n, s })
}

/// `Σ_{j ≠ pivot} A_2(ρ_{pivot, j})` (pivot is 1-based).
pub fn pair_sector_sum(rho: &DensityMatrix, pivot: usize) -> Result<f64> {
    let n = rho.num_qubits();
    if n < 2 {
        return invalid_arg("pair sums need at least two qubits");
    }
    if pivot == 0 || pivot > n {
        return invalid_arg(format!("pivot {pivot} outside 1..={n}"));
    }
    let mut total = 0.0;
    for j in (1..=n).filter(|&j| j != pivot) {
        let pair = rho.partial_trace(&[pivot, j])?;
        total += sector_lengths(&pair)?.a[2];
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SeededRng;
    use crate::zoo;

    fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
        a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
    }

    #[test]
    fn sector_examples() {
        assert!(close(&sector_lengths(&zoo::ghz(3).unwrap()).unwrap().a, &[1.0, 0.0, 3.0, 4.0], 1e-12));
        for n in 1..=4 {
            let mut expected = vec![0.0; n + 1];
            expected[0] = 1.0;
            assert!(close(&sector_lengths(&zoo::maximally_mixed(n).unwrap()).unwrap().a, &expected, 1e-14));
        }
        assert!(close(&sector_lengths(&zoo::chi4()).unwrap().a, &[1.0, 0.0, 2.0, 8.0, 5.0], 1e-12));
    }

    #[test]
    fn routes_agree() {
        let mut rng = SeededRng::new(3);
        for n in 1..=5 {
            for _ in 0..5 {
                let rank = 1 + rng.below(1 << n);
                let rho = zoo::random_mixed_with(n, rank, &mut rng).unwrap();
                assert!(cross_check_routes(&rho).unwrap() < 1e-10);
            }
        }
        assert!(cross_check_routes(&zoo::ghz(6).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn entropy_examples() {
        let prod = zoo::product_zero(4).unwrap();
        assert!(sector_entropies(&prod).s.iter().all(|s| s.abs() < 1e-12));
        let ghz = sector_entropies(&zoo::ghz(3).unwrap());
        assert!(close(&ghz.s, &[3.0, 3.0, 0.0], 1e-12));
        let mixed = sector_entropies(&zoo::maximally_mixed(2).unwrap());
        assert!(close(&mixed.s, &[2.0, 1.5], 1e-12));
        let single = sector_entropies(&zoo::maximally_mixed(1).unwrap());
        assert!(close(&single.s, &[1.0], 1e-12));
    }

    #[test]
    fn closed_form_entropies() {
        for n in 1..=6 {
            let mut a = vec![0.0; n + 1];
            a[0] = 1.0;
            let e = sectors_to_entropies(&SectorVector::new(a).unwrap());
            for k in 1..=n {
                let expected = binom_f64(n, k) * (2.0 - 2f64.powi(1 - k as i32));
                assert!((e.get(k) - expected).abs() < 1e-12);
            }
        }
        let ghz = SectorVector::new(vec![1.0, 0.0, 3.0, 4.0]).unwrap();
        assert!(close(&sectors_to_entropies(&ghz).s, &[3.0, 3.0, 0.0], 1e-12));
        let prod = sector_lengths(&zoo::product_zero(5).unwrap()).unwrap();
        assert!(sectors_to_entropies(&prod).s.iter().all(|s| s.abs() < 1e-12));
    }

    #[test]
    fn closed_form_matches_direct_entropies() {
        let mut rng = SeededRng::new(8);
        for n in 1..=5 {
            let rho = zoo::random_mixed_with(n, 1 + rng.below(1 << n), &mut rng).unwrap();
            let direct = sector_entropies(&rho);
            let via = sectors_to_entropies(&sector_lengths(&rho).unwrap());
            assert!(close(&direct.s, &via.s, 1e-10));
        }
    }

    #[test]
    fn mutual_examples() {
        let prod = sector_entropies(&zoo::product_zero(2).unwrap());
        assert!(mutual_entropies(&prod).get(2).abs() < 1e-12);
        let bell = mutual_entropies(&sector_entropies(&zoo::bell_phi_plus()));
        assert!((bell.get(1) - 2.0).abs() < 1e-12 && (bell.get(2) - 2.0).abs() < 1e-12);
        let ghz = mutual_entropies(&sector_entropies(&zoo::ghz(3).unwrap()));
        assert!(ghz.get(3).abs() < 1e-12);

        let two = sector_entropies(&zoo::random_mixed(2, 3, 1).unwrap());
        let rho = zoo::random_mixed(2, 3, 1).unwrap();
        let sa = linear_entropy(&rho.partial_trace(&[1]).unwrap());
        let sb = linear_entropy(&rho.partial_trace(&[2]).unwrap());
        assert!((mutual_entropies(&two).get(2) - (sa + sb - linear_entropy(&rho))).abs() < 1e-12);
    }

    #[test]
    fn translation_errors() {
        let e = EntropyVector { n: 3, s: vec![1.0, 2.0] };
        assert!(entropies_to_sectors(&e).is_err());
        let m = MutualVector { n: 2, i: vec![1.0] };
        assert!(mutual_to_entropies(&m).is_err());
    }

    #[test]
    fn pair_sums() {
        let ghz4 = zoo::ghz(4).unwrap();
        assert!((pair_sector_sum(&ghz4, 1).unwrap() - 3.0).abs() < 1e-12);
        for n in 2..=5 {
            let prod = zoo::product_zero(n).unwrap();
            assert!((pair_sector_sum(&prod, 1).unwrap() - (n as f64 - 1.0)).abs() < 1e-12);
        }
        let mixed = zoo::maximally_mixed(3).unwrap();
        assert!(pair_sector_sum(&mixed, 2).unwrap().abs() < 1e-14);
        assert!(pair_sector_sum(&zoo::maximally_mixed(1).unwrap(), 1).is_err());
        assert!(pair_sector_sum(&mixed, 4).is_err());
    }

    #[test]
    fn sector_vector_checks() {
        assert!(SectorVector::new(vec![1.0, 0.0, 3.0, 4.0]).unwrap().check().is_ok());
        assert!(SectorVector::new(vec![1.0, 0.0, 3.0, 5.0]).unwrap().check().is_err());
        assert!(SectorVector::new(vec![1.0, -0.1]).unwrap().check().is_err());
        let json = serde_json::to_string(&SectorVector::from_tail(&[0.0, 3.0, 4.0]).unwrap()).unwrap();
        assert_eq!(json, r#"{"n":3,"A":[1.0,0.0,3.0,4.0]}"#);
    }
}
