use std::f64::consts::PI;

use proptest::prelude::*;
use sectorlen::entanglement::{compose_product, detect, representability_check, MarginalSpectra};
use sectorlen::linalg::{self, hermitian_eigenvalues, max_abs_diff};
use sectorlen::lp::{build_program, Assumption};
use sectorlen::polytope::{facets, Membership};
use sectorlen::proofs::{prove_a3, prove_an_even};
use sectorlen::rng::SeededRng;
use sectorlen::sectors::{
    entropies_to_sectors, mutual_entropies, mutual_to_entropies, sector_lengths, sector_lengths_with, sectors_to_entropies,
    SectorRoute,
};
use sectorlen::sssa::partial_inversion_overlap;
use sectorlen::state::bloch_decompose;
use sectorlen::{zoo, DensityMatrix, FormKind, LinearForm, PauliString, SectorVector};

fn mixed(n: usize, seed: u64) -> DensityMatrix {
    let mut rng = SeededRng::new(seed);
    let rank = 1 + rng.below(1 << n);
    zoo::random_mixed_with(n, rank, &mut rng).unwrap()
}

fn assert_vec_close(a: &[f64], b: &[f64], tol: f64) {
    for (x, y) in a.iter().zip(b) {
        assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip(n in 1usize..=5, seed in any::<u64>()) {
        let rho = mixed(n, seed);
        let b = bloch_decompose(&rho).unwrap();
        prop_assert!(max_abs_diff(&b.reconstruct(), rho.matrix()) <= 1e-12);
        let sum_sq: f64 = b.values().iter().map(|c| c * c).sum();
        prop_assert!((rho.purity() - sum_sq / (1u64 << n) as f64).abs() <= 1e-12);
    }

    #[test]
    fn reduction_restricts_bloch(n in 2usize..=4, seed in any::<u64>(), keep_bits in 1usize..15) {
        let rho = mixed(n, seed);
        let keep: Vec<usize> = (1..=n).filter(|q| keep_bits >> (q - 1) & 1 == 1).collect();
        prop_assume!(!keep.is_empty());
        let reduced = rho.partial_trace(&keep).unwrap();
        let full = bloch_decompose(&rho).unwrap();
        let part = bloch_decompose(&reduced).unwrap();
        for p in PauliString::all(keep.len()) {
            let sites: Vec<_> = keep.iter().zip(p.letters()).map(|(&q, &l)| (q, l)).collect();
            let lifted = PauliString::with_sites(n, &sites).unwrap();
            prop_assert!((part.get(&p) - full.get(&lifted)).abs() <= 1e-12);
        }
    }

    #[test]
    fn state_inversion_involution(n in 1usize..=4, seed in any::<u64>()) {
        let rho = mixed(n, seed);
        let inv = rho.state_inversion();
        prop_assert!(max_abs_diff(inv.state_inversion().matrix(), rho.matrix()) <= 1e-12);
        prop_assert!(inv.eigenvalues()[0] >= -1e-10);
        assert_vec_close(&sector_lengths(&inv).unwrap().a, &sector_lengths(&rho).unwrap().a, 1e-10);
    }

    #[test]
    fn anticommutation_matches_matrices(n in 1usize..=3, i in any::<usize>(), j in any::<usize>()) {
        let p = PauliString::from_index(n, i % (1 << (2 * n)));
        let q = PauliString::from_index(n, j % (1 << (2 * n)));
        let (pm, qm) = (p.matrix(), q.matrix());
        let anti = (&pm * &qm + &qm * &pm).iter().all(|x| x.norm() < 1e-12);
        prop_assert_eq!(p.anticommutes(&q).unwrap(), anti);
    }

    #[test]
    fn pure_states_have_full_purity(n in 1usize..=6, seed in any::<u64>()) {
        let v = sector_lengths(&zoo::random_pure(n, seed).unwrap()).unwrap();
        prop_assert!((v.a.iter().sum::<f64>() - (1u64 << n) as f64).abs() <= 1e-9);
    }

    #[test]
    fn sectors_are_convex(n in 1usize..=4, s1 in any::<u64>(), s2 in any::<u64>(), tenth in 1usize..=9) {
        let p = tenth as f64 / 10.0;
        let (r1, r2) = (mixed(n, s1), mixed(n, s2));
        let mix = sector_lengths(&r1.mix(p, &r2).unwrap()).unwrap();
        let (v1, v2) = (sector_lengths(&r1).unwrap(), sector_lengths(&r2).unwrap());
        for k in 0..=n {
            prop_assert!(mix.a[k] <= p * v1.a[k] + (1.0 - p) * v2.a[k] + 1e-9);
        }
    }

    #[test]
    fn local_unitaries_preserve_sectors(n in 1usize..=4, seed in any::<u64>()) {
        let rho = mixed(n, seed);
        let mut rng = SeededRng::new(seed ^ 0x5eed);
        let u = zoo::random_local_unitary(n, &mut rng);
        let moved = rho.conjugated(&u).unwrap();
        assert_vec_close(&sector_lengths(&moved).unwrap().a, &sector_lengths(&rho).unwrap().a, 1e-9);
    }

    #[test]
    fn routes_agree(n in 1usize..=6, seed in any::<u64>()) {
        let rho = mixed(n, seed);
        let a = sector_lengths_with(&rho, SectorRoute::PauliSum).unwrap();
        let b = sector_lengths_with(&rho, SectorRoute::Purity).unwrap();
        assert_vec_close(&a.a, &b.a, 1e-9);
    }

    #[test]
    fn coordinate_round_trips(n in 1usize..=7, seed in any::<u64>()) {
        let v = sector_lengths(&mixed(n.min(6), seed)).unwrap();
        let e = sectors_to_entropies(&v);
        assert_vec_close(&entropies_to_sectors(&e).unwrap().a, &v.a, 1e-12);
        assert_vec_close(&mutual_to_entropies(&mutual_entropies(&e)).unwrap().s, &e.s, 1e-12);
    }

    #[test]
    fn product_rule_matches_tensor(na in 1usize..=3, nb in 1usize..=3, s1 in any::<u64>(), s2 in any::<u64>()) {
        let (a, b) = (mixed(na, s1), mixed(nb, s2));
        let composed = compose_product(&sector_lengths(&a).unwrap(), &sector_lengths(&b).unwrap());
        let direct = sector_lengths(&a.tensor(&b).unwrap()).unwrap();
        assert_vec_close(&composed.a, &direct.a, 1e-10);
    }

    #[test]
    fn adding_constraints_never_raises_the_maximum(n in 3usize..=6, k in 1usize..=6, extra in 0usize..4) {
        prop_assume!(k <= n);
        let base = vec![Assumption::PurityEq, Assumption::Shadow(0)];
        let more = [Assumption::AllShadows, Assumption::AllMacWilliams, Assumption::A2Cap, Assumption::MacWilliams(1)];
        let mut tighter = base.clone();
        tighter.push(more[extra].clone());
        let loose = build_program(n, &base).unwrap().maximize_sector(k).unwrap().certificate().unwrap();
        let tight_lp = build_program(n, &tighter).unwrap();
        let tight = tight_lp.maximize_sector(k).unwrap().certificate().unwrap();
        prop_assert!(tight.replay(&tight_lp).is_ok());
        prop_assert!(tight.value <= loose.value);
    }

    #[test]
    fn form_json_round_trip(coeff in proptest::collection::vec(-50i64..50, 2..8), eq in any::<bool>()) {
        let kind = if eq { FormKind::EqualityZero } else { FormKind::GeqZero };
        let f = LinearForm::from_ints("f", kind, &coeff).unwrap();
        prop_assert_eq!(LinearForm::from_json(&f.to_json()).unwrap(), f);
    }
}

#[test]
fn constructors_validate() {
    let g = 12;
    for i in 0..g {
        for j in 0..g {
            let (x, y) = (i as f64 / (g - 1) as f64, j as f64 / (g - 1) as f64);
            for rho in [
                zoo::fam_a(x, y * PI).unwrap(),
                zoo::fam_b(x, y * PI).unwrap(),
                zoo::fam_c(x, (y * x).min(1.0 - x / 2.0)).unwrap(),
                zoo::fam_d(x * PI, y * PI).unwrap(),
            ] {
                rho.validate().unwrap();
                zoo::inversion_mix(&rho, 0.3).unwrap().validate().unwrap();
            }
        }
    }
    for n in 1..=5 {
        zoo::ghz(n.max(2)).unwrap().validate().unwrap();
        zoo::product_zero(n).unwrap().validate().unwrap();
        zoo::maximally_mixed(n).unwrap().validate().unwrap();
    }
    zoo::chi4().validate().unwrap();
}

#[test]
fn tight_states_attain_bounds() {
    let cases: [(usize, DensityMatrix); 3] = [(3, zoo::ghz(3).unwrap()), (4, zoo::chi4()), (5, zoo::product_zero(5).unwrap())];
    for (n, rho) in cases {
        let bound = prove_a3(n).unwrap().certificate.value_f64();
        assert!((sector_lengths(&rho).unwrap().get(3) - bound).abs() <= 1e-10, "n = {n}");
    }
    for n in [4, 6, 8] {
        let bound = prove_an_even(n).unwrap().certificate.value_f64();
        assert!((sector_lengths(&zoo::ghz(n).unwrap()).unwrap().get(n) - bound).abs() <= 1e-10);
    }
    for n in 3..=8 {
        let v = sector_lengths(&zoo::product_zero(n).unwrap()).unwrap();
        assert!((v.get(2) - (n * (n - 1) / 2) as f64).abs() <= 1e-10);
    }
}

#[test]
fn two_qubit_extreme_states() {
    let p = facets(2).unwrap();
    let flat = DensityMatrix::new(linalg::kron(
        &zoo::product_zero(1).unwrap().matrix().clone(),
        &zoo::maximally_mixed(1).unwrap().matrix().clone(),
    ))
    .unwrap();
    for (rho, vertex) in [(zoo::product_zero(2).unwrap(), [2.0, 1.0]), (zoo::bell_phi_plus(), [0.0, 3.0]), (flat, [1.0, 0.0])] {
        let v = sector_lengths(&rho).unwrap();
        assert_vec_close(v.tail(), &vertex, 1e-12);
        assert!(!matches!(p.contains(&v, 1e-9).unwrap().membership, Membership::Outside(_)));
    }
    let vertices: Vec<Vec<f64>> = p.to_json().vertices;
    for vertex in [[2.0, 1.0], [0.0, 3.0], [1.0, 0.0]] {
        assert!(vertices.iter().any(|v| v == &vertex), "{vertices:?}");
    }
}

#[test]
fn separable_states_are_never_flagged() {
    let mut rng = SeededRng::new(17);
    for n in 2..=4 {
        for _ in 0..3_000 {
            let rho = zoo::random_separable_with(n, 4, &mut rng).unwrap();
            let d = detect(&sector_lengths(&rho).unwrap(), 1e-9).unwrap();
            assert!(!d.entangled && !d.gme_detected, "{d:?}");
        }
    }
}

#[test]
fn spectra_from_global_states_pass() {
    let mut rng = SeededRng::new(23);
    for n in [4, 5] {
        for _ in 0..1000 {
            let rho = zoo::random_mixed_with(n, 1 + rng.below(4), &mut rng).unwrap();
            let spectra = MarginalSpectra::from_state(&rho).unwrap();
            for pivot in 1..=n {
                assert!(representability_check(&spectra, pivot).unwrap().passes);
            }
        }
    }
}

#[test]
fn overlap_routes_agree() {
    let mut rng = SeededRng::new(29);
    for i in 0..10_000 {
        let rho = zoo::random_mixed_with(3, 1 + i % 8, &mut rng).unwrap();
        let v: SectorVector = sector_lengths(&rho).unwrap();
        let formula = (3.0 - v.a[1] - v.a[2] + 3.0 * v.a[3]) / 8.0;
        assert!((partial_inversion_overlap(&rho).unwrap() - formula).abs() <= 1e-10);
    }
}

#[test]
fn eigenvalues_ascending() {
    let rho = mixed(3, 5);
    let ev = hermitian_eigenvalues(rho.matrix());
    assert!(ev.windows(2).all(|w| w[0] <= w[1]));
}
