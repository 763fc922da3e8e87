//! Acceptance criteria. Each test prints one `criterion N: PASS|FAIL` line
//! (run with `--nocapture` to see them) and fails if the criterion fails.

use std::f64::consts::PI;
use std::time::Instant;

use num_traits::ToPrimitive;
use rayon::prelude::*;
use sectorlen::combinatorics::binom_f64;
use sectorlen::identities::{exact_rank, macwilliams_forms, macwilliams_residual, shadow_from_marginals, shadow_value};
use sectorlen::polytope::{facets, Membership, DEFAULT_TOL};
use sectorlen::proofs::{prove_a2, prove_a3, prove_an_even, prove_an_odd, shadow_insufficiency_report};
use sectorlen::rng::SeededRng;
use sectorlen::sectors::{
    entropies_to_sectors, mutual_entropies, mutual_to_entropies, sector_entropies, sector_lengths, sectors_to_entropies,
    EntropyVector, MutualVector, SectorVector,
};
use sectorlen::sssa::{verify_appendix_a, verify_appendix_b, verify_appendix_c, SuiteSize};
use sectorlen::state::DensityMatrix;
use sectorlen::{hull, zoo, VerificationReport};

const SEED: u64 = 20_190_101;

fn report(id: usize, title: &str, passed: bool, detail: &str) {
    println!("criterion {id}: {} {title} ({detail})", if passed { "PASS" } else { "FAIL" });
    assert!(passed, "criterion {id} failed: {title}: {detail}");
}

fn tail(v: &SectorVector) -> Vec<f64> {
    v.tail().to_vec()
}

/// `count` random states on `n` qubits cycling through every rank (rank 1 is
/// pure), generated in parallel chunks with derived seeds.
fn corpus<T: Send>(n: usize, count: usize, seed: u64, f: impl Fn(&DensityMatrix) -> T + Sync) -> Vec<T> {
    const CHUNK: usize = 500;
    let dim = 1usize << n;
    (0..count.div_ceil(CHUNK))
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = SeededRng::for_task(seed, c as u64);
            let len = CHUNK.min(count - c * CHUNK);
            (0..len)
                .map(|i| {
                    let rank = 1 + (c * CHUNK + i) % dim;
                    let rho = zoo::random_mixed_with(n, rank, &mut rng).expect("valid rank");
                    f(&rho)
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

fn pure_corpus<T: Send>(n: usize, count: usize, seed: u64, f: impl Fn(&DensityMatrix) -> T + Sync) -> Vec<T> {
    (0..count)
        .into_par_iter()
        .map(|i| f(&zoo::random_pure_with(n, &mut SeededRng::for_task(seed, i as u64)).expect("n >= 1")))
        .collect()
}

fn close(a: &[f64], b: &[f64], tol: f64) -> bool {
    a.len() == b.len() && a.iter().zip(b).all(|(x, y)| (x - y).abs() <= tol)
}

#[test]
fn criterion_01_named_states() {
    let t = Instant::now();
    let mut ok = close(&tail(&sector_lengths(&zoo::ghz(3).unwrap()).unwrap()), &[0.0, 3.0, 4.0], 1e-10);
    ok &= close(&tail(&sector_lengths(&zoo::chi4()).unwrap()), &[0.0, 2.0, 8.0, 5.0], 1e-10);
    for n in 1..=8 {
        let expected: Vec<f64> = (1..=n).map(|k| binom_f64(n, k)).collect();
        ok &= close(&tail(&sector_lengths(&zoo::product_zero(n).unwrap()).unwrap()), &expected, 1e-10);
    }
    for n in 2..=8 {
        let an = sector_lengths(&zoo::ghz(n).unwrap()).unwrap().get(n);
        let expected = 2f64.powi(n as i32 - 1) + if n % 2 == 0 { 1.0 } else { 0.0 };
        ok &= (an - expected).abs() <= 1e-10;
    }
    let elapsed = t.elapsed().as_secs_f64();
    report(1, "named-state sector tuples", ok && elapsed < 10.0, &format!("{elapsed:.2} s"));
}

#[test]
fn criterion_02_lp_certificates() {
    let t = Instant::now();
    let mut ok = true;
    let mut lines = Vec::new();
    for (n, v) in [(3, 4), (4, 8), (5, 10)] {
        let p = prove_a3(n).unwrap();
        ok &= p.certificate.replay(&p.lp).is_ok() && p.value().to_integer() == v.into() && p.value().is_integer();
        lines.push(format!("A3(n={n})={}", p.value()));
    }
    for n in 3..=10 {
        let (base, steps) = prove_a2(n).unwrap();
        ok &= base.certificate.replay(&base.lp).is_ok() && steps.iter().all(|s| s.matches);
        ok &= steps.last().unwrap().bound == (n * (n - 1) / 2).to_string();
    }
    lines.push("A2 lift n=3..10".into());
    for n in [4, 6, 8, 10] {
        let p = prove_an_even(n).unwrap();
        ok &= p.certificate.replay(&p.lp).is_ok() && p.value().to_i64() == Some((1 << (n - 1)) + 1) && p.value().is_integer();
        lines.push(format!("A{n}={}", p.value()));
    }
    for n in [3, 5, 7, 9] {
        let p = prove_an_odd(n).unwrap();
        ok &= p.certificate.replay(&p.lp).is_ok() && p.value().to_i64() == Some(1 << (n - 1)) && p.value().is_integer();
        lines.push(format!("A{n}={}", p.value()));
    }
    let elapsed = t.elapsed().as_secs_f64();
    report(2, "exact certificates", ok && elapsed < 60.0, &format!("{}; {elapsed:.2} s", lines.join(", ")));
}

#[test]
fn criterion_03_shadow_insufficiency() {
    let r = shadow_insufficiency_report(8, 4).unwrap();
    let witness: Vec<String> = r.witness.iter().map(|x| x.to_string()).collect();
    println!("criterion 3 witness: ({})", witness.join(", "));
    report(
        3,
        "A_4 at n = 8 exceeds C(8,4) under MacWilliams + shadows + A_2 cap",
        r.exceeds_binomial,
        &format!("optimum {} ~ {:.4} vs {}", r.certificate.value, r.certificate.value_f64(), r.binomial),
    );
}

fn polytope_violations(n: usize, count: usize, seed: u64) -> usize {
    let p = facets(n).unwrap();
    corpus(n, count, seed, |rho| {
        let v = sector_lengths(rho).unwrap();
        matches!(p.contains(&v, DEFAULT_TOL).unwrap().membership, Membership::Outside(_)) as usize
    })
    .into_iter()
    .sum()
}

#[test]
fn criterion_04_polytope_soundness() {
    let t = Instant::now();
    let count = 100_000;
    let v3 = polytope_violations(3, count, SEED);
    let v2 = polytope_violations(2, count, SEED + 1);
    let elapsed = t.elapsed().as_secs_f64();
    report(
        4,
        "polytope soundness",
        v3 == 0 && v2 == 0 && elapsed < 300.0,
        &format!("{count} states each, violations n=3: {v3}, n=2: {v2}, seed {SEED}; {elapsed:.1} s"),
    );
}

#[test]
fn criterion_05_polytope_tightness() {
    let g = 50;
    let grid = |i: usize| i as f64 / (g - 1) as f64;
    let mut families = Vec::new();
    let mut worst_inv = 0.0f64;
    let mut worst_sssa = 0.0f64;
    for i in 0..g {
        for j in 0..g {
            let (x, y) = (grid(i), grid(j));
            // q ≤ 1 − p/2 keeps the |000> weight nonnegative.
            let q = (y * x).min(1.0 - x / 2.0);
            for rho in [zoo::fam_a(x, y * PI).unwrap(), zoo::fam_b(x, y * PI).unwrap(), zoo::fam_c(x, q).unwrap()] {
                let a = sector_lengths(&rho).unwrap().a;
                worst_inv = worst_inv.max((1.0 - a[1] + a[2] - a[3]).abs());
                families.push(rho);
            }
            let d = zoo::fam_d(x * PI, y * PI).unwrap();
            let a = sector_lengths(&d).unwrap().a;
            worst_sssa = worst_sssa.max((a[1] + a[2] - 3.0 * (1.0 + a[3])).abs());
            families.push(d);
        }
    }
    let points: Vec<hull::Point3> = families
        .par_iter()
        .flat_map_iter(|rho| {
            (0..=10).map(move |k| {
                let a = sector_lengths(&zoo::inversion_mix(rho, k as f64 / 20.0).unwrap()).unwrap().a;
                [a[1], a[2], a[3]]
            })
        })
        .collect();
    let h = hull::support_hull(&points, 2000);
    let excess = corpus(3, 10_000, SEED + 2, |rho| {
        let a = sector_lengths(rho).unwrap().a;
        h.excess([a[1], a[2], a[3]])
    })
    .into_iter()
    .fold(f64::NEG_INFINITY, f64::max);
    report(
        5,
        "polytope tightness",
        worst_inv <= 1e-9 && worst_sssa <= 1e-9 && excess <= 1e-6,
        &format!(
            "state-inversion residual {worst_inv:.1e}, sssa residual {worst_sssa:.1e}, {} hull points, {} support vertices, worst excess {excess:.1e}",
            points.len(),
            h.vertices.len()
        ),
    );
}

fn report_suite(id: usize, title: &str, r: &VerificationReport) {
    print!("{}", r.to_text());
    let worst = r.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect::<Vec<_>>();
    report(id, title, r.passed, &format!("{} checks, failing: {worst:?}", r.checks.len()));
}

#[test]
fn criterion_06_partial_inversion_choi() {
    report_suite(6, "Choi matrix of the partial inversion", &verify_appendix_b(SuiteSize::FULL, SEED).unwrap());
}

#[test]
fn criterion_07_anticommuting_sets() {
    report_suite(7, "anticommuting sets and pair-sum bound", &verify_appendix_a(SuiteSize::FULL, SEED).unwrap());
}

#[test]
fn criterion_08_projector_representation() {
    report_suite(8, "projector representation", &verify_appendix_c(SuiteSize::FULL, SEED).unwrap());
}

#[test]
fn criterion_09_identity_suites() {
    let mut ok = true;
    let mut worst_mw = 0.0f64;
    let mut worst_shadow = f64::INFINITY;
    let mut worst_oracle = 0.0f64;
    let mut ranks = Vec::new();
    for n in 1..=6 {
        let rank = exact_rank(&macwilliams_forms(n).unwrap());
        ok &= rank == n.div_ceil(2);
        ranks.push(rank);
        let r = pure_corpus(n, 200, SEED + n as u64, |rho| {
            let v = sector_lengths(rho).unwrap();
            (0..=n).map(|m| macwilliams_residual(&v, m).unwrap().abs()).fold(0.0, f64::max)
        });
        worst_mw = r.into_iter().fold(worst_mw, f64::max);
        let s = corpus(n, 10_000, SEED + 10 + n as u64, |rho| {
            let v = sector_lengths(rho).unwrap();
            (0..=n).map(|k| shadow_value(&v, k).unwrap()).fold(f64::INFINITY, f64::min)
        });
        worst_shadow = s.into_iter().fold(worst_shadow, f64::min);
        if n <= 4 {
            let d = corpus(n, 200, SEED + 20 + n as u64, |rho| {
                let v = sector_lengths(rho).unwrap();
                (0..=n)
                    .map(|k| (shadow_from_marginals(rho, k).unwrap() - shadow_value(&v, k).unwrap()).abs())
                    .fold(0.0, f64::max)
            });
            worst_oracle = d.into_iter().fold(worst_oracle, f64::max);
        }
    }
    ok &= worst_mw <= 1e-8 && worst_shadow >= -1e-9 && worst_oracle <= 1e-9;
    report(
        9,
        "identity suites",
        ok,
        &format!("MacWilliams residual {worst_mw:.1e}, ranks {ranks:?}, min shadow {worst_shadow:.1e}, marginal oracle {worst_oracle:.1e}"),
    );
}

/// Table rows as `(label, min n, max n, predicate)`; each predicate returns
/// the slack, which must be ≥ −tol.
type Row = (&'static str, usize, usize, fn(usize, &SectorVector, &EntropyVector, &MutualVector) -> f64);

fn table_rows() -> Vec<Row> {
    fn b(n: usize, k: usize) -> f64 {
        binom_f64(n, k)
    }
    vec![
        ("A1 <= n", 1, 6, |n, v, _, _| n as f64 - v.get(1)),
        ("S1 >= 0", 1, 6, |_, _, e, _| e.get(1)),
        ("I1 >= 0", 1, 6, |_, _, _, m| m.get(1)),
        ("A2 <= C(n,2)", 3, 6, |n, v, _, _| b(n, 2) - v.get(2)),
        ("S2 >= (n-1)/2 S1", 3, 6, |n, _, e, _| e.get(2) - (n as f64 - 1.0) / 2.0 * e.get(1)),
        ("I2 <= (n-1)/2 I1", 3, 6, |n, _, _, m| (n as f64 - 1.0) / 2.0 * m.get(1) - m.get(2)),
        ("A3 <= C(n,3)", 5, 6, |n, v, _, _| b(n, 3) - v.get(3)),
        ("S3 >= (n-2)/2 S2 - C(n-1,2)/4 S1", 5, 6, |n, _, e, _| {
            e.get(3) - (n as f64 - 2.0) / 2.0 * e.get(2) + b(n - 1, 2) / 4.0 * e.get(1)
        }),
        ("I3 >= (n-2)/2 I2 - C(n-1,2)/4 I1", 5, 6, |n, _, _, m| {
            m.get(3) - (n as f64 - 2.0) / 2.0 * m.get(2) + b(n - 1, 2) / 4.0 * m.get(1)
        }),
        ("C(n,3) + A3 >= C(n-1,2)/3 A1 + (n-2)/3 A2", 3, 6, |n, v, _, _| {
            b(n, 3) + v.get(3) - b(n - 1, 2) / 3.0 * v.get(1) - (n as f64 - 2.0) / 3.0 * v.get(2)
        }),
        // Translated from the sector form; at n = 3 it is the SSSA row 3 S3 <= 2 S2 - S1.
        ("S3 <= 2(n-2)/3 S2 - C(n-1,2)/3 S1", 3, 6, |n, _, e, _| {
            2.0 * (n as f64 - 2.0) / 3.0 * e.get(2) - b(n - 1, 2) / 3.0 * e.get(1) - e.get(3)
        }),
        ("I3 <= (n-2)/3 I2", 3, 6, |n, _, _, m| (n as f64 - 2.0) / 3.0 * m.get(2) - m.get(3)),
        ("n=2 purity: A1 + A2 <= 3", 2, 2, |_, v, _, _| 3.0 - v.get(1) - v.get(2)),
        ("n=2 purity: S2 >= 0", 2, 2, |_, _, e, _| e.get(2)),
        ("n=2 purity: I2 <= I1", 2, 2, |_, _, _, m| m.get(1) - m.get(2)),
        ("n=2 state inv: A1 - A2 <= 1", 2, 2, |_, v, _, _| 1.0 - v.get(1) + v.get(2)),
        ("n=2 state inv: S2 <= S1", 2, 2, |_, _, e, _| e.get(1) - e.get(2)),
        ("n=2 state inv: I2 >= 0", 2, 2, |_, _, _, m| m.get(2)),
        ("n=3 purity: A1 + A2 + A3 <= 7", 3, 3, |_, v, _, _| 7.0 - v.get(1) - v.get(2) - v.get(3)),
        ("n=3 purity: S3 >= 0", 3, 3, |_, _, e, _| e.get(3)),
        ("n=3 purity: I3 >= I2 - I1", 3, 3, |_, _, _, m| m.get(3) - m.get(2) + m.get(1)),
        ("n=3 state inv: A1 - A2 + A3 <= 1", 3, 3, |_, v, _, _| 1.0 - v.get(1) + v.get(2) - v.get(3)),
        ("n=3 state inv: S3 >= S2 - S1", 3, 3, |_, _, e, _| e.get(3) - e.get(2) + e.get(1)),
        ("n=3 state inv: I3 >= 0", 3, 3, |_, _, _, m| m.get(3)),
        ("n=3 Schmidt: A2 <= 3", 3, 3, |_, v, _, _| 3.0 - v.get(2)),
        ("n=3 Schmidt: S2 >= S1", 3, 3, |_, _, e, _| e.get(2) - e.get(1)),
        ("n=3 Schmidt: I2 <= I1", 3, 3, |_, _, _, m| m.get(1) - m.get(2)),
        ("n=3 SSSA: A1 + A2 <= 3(1 + A3)", 3, 3, |_, v, _, _| 3.0 * (1.0 + v.get(3)) - v.get(1) - v.get(2)),
        ("n=3 SSSA: 3 S3 <= 2 S2 - S1", 3, 3, |_, _, e, _| 2.0 * e.get(2) - e.get(1) - 3.0 * e.get(3)),
        ("n=3 SSSA: I3 <= I2/3", 3, 3, |_, _, _, m| m.get(2) / 3.0 - m.get(3)),
    ]
}

#[test]
fn criterion_10_coordinates_and_tables() {
    let rows = table_rows();
    let mut worst_round = 0.0f64;
    let mut worst_rows = vec![f64::INFINITY; rows.len()];
    for n in 1..=6 {
        let per_state = corpus(n, 10_000, SEED + 30 + n as u64, |rho| {
            let v = sector_lengths(rho).unwrap();
            let e = sector_entropies(rho);
            let m = mutual_entropies(&e);
            let back_v = entropies_to_sectors(&sectors_to_entropies(&v)).unwrap();
            let back_e = mutual_to_entropies(&m).unwrap();
            let round = v.a.iter().zip(&back_v.a).chain(e.s.iter().zip(&back_e.s)).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
            let slacks: Vec<f64> = rows
                .iter()
                .map(|(_, lo, hi, f)| if (*lo..=*hi).contains(&n) { f(n, &v, &e, &m) } else { f64::INFINITY })
                .collect();
            (round, slacks)
        });
        for (round, slacks) in per_state {
            worst_round = worst_round.max(round);
            for (w, s) in worst_rows.iter_mut().zip(slacks) {
                *w = w.min(s);
            }
        }
    }
    let failing: Vec<&str> =
        rows.iter().zip(&worst_rows).filter(|(_, w)| **w < -1e-9).map(|((label, ..), _)| *label).collect();
    let min_slack = worst_rows.iter().copied().fold(f64::INFINITY, f64::min);
    report(
        10,
        "coordinate round-trips and table inequalities",
        worst_round <= 1e-12 && failing.is_empty(),
        &format!("round-trip {worst_round:.1e}, {} inequalities, min slack {min_slack:.1e}, failing {failing:?}", rows.len()),
    );
}
