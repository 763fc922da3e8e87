use std::collections::BTreeMap;
use std::f64::consts::PI;
use std::fmt::Write as _;
use std::path::Path;

use num_traits::Signed;
use rayon::prelude::*;
use serde_json::{json, Value};

use sectorlen::entanglement::{detect, pair_sum_check, representability_check, MarginalSpectra};
use sectorlen::identities::verify_identities;
use sectorlen::lp::{build_program, LpOutcome};
use sectorlen::polytope::{entanglement_lines, facets, scan_header, scan_record, Membership, Polytope};
use sectorlen::proofs::{corollary2_form, corollary2_under_shadows, prove_a2, prove_a3, prove_an, shadow_insufficiency_report, Proof};
use sectorlen::rng::SeededRng;
use sectorlen::sectors::{mutual_entropies, sector_lengths, sector_lengths_with, sectors_to_entropies, SectorRoute};
use sectorlen::sssa::{verify_appendix_a, verify_appendix_b, verify_appendix_c, SuiteSize};
use sectorlen::{zoo, Assumption, DensityMatrix, SectorVector, VerificationReport};

use crate::input::{load_state, num, read_text, tuple};
use crate::{BoundsArgs, Cli, CliError, CliResult, Command, Format, Prove, Route, ScanArgs, Suite};

/// Prints either the JSON value (with the seed added) or the text, prefixed
/// by the seed line.
fn emit(cli: &Cli, mut value: Value, text: &str) {
    if cli.json {
        if let Value::Object(map) = &mut value {
            map.insert("seed".into(), json!(cli.seed));
        }
        println!("{}", serde_json::to_string_pretty(&value).expect("serializable"));
    } else {
        println!("seed: {}", cli.seed);
        print!("{text}");
    }
}

pub fn run(cli: &Cli) -> CliResult<u8> {
    match &cli.command {
        Command::Compute { state, format, route } => compute(cli, state, *format, *route),
        Command::Bounds(args) => bounds(cli, args),
        Command::Polytope { n, point, tol } => polytope(cli, *n, point.as_deref(), *tol),
        Command::Scan(args) => scan(cli, args),
        Command::Verify { suite, quick } => verify(cli, *suite, *quick),
        Command::Detect { state, tol, pivot } => detect_cmd(cli, state, *tol, *pivot),
        Command::Represent { file, pivot } => represent(cli, file, *pivot),
    }
}

fn compute(cli: &Cli, state: &str, format: Format, route: Route) -> CliResult<u8> {
    let rho = load_state(state)?;
    let v = match route {
        Route::Auto => sector_lengths(&rho)?,
        Route::Pauli => sector_lengths_with(&rho, SectorRoute::PauliSum)?,
        Route::Purity => sector_lengths_with(&rho, SectorRoute::Purity)?,
    };
    let e = sectors_to_entropies(&v);
    let m = mutual_entropies(&e);
    let show = |f: Format| format == f || format == Format::All;
    let mut text = format!("state: {state} (n = {})\n", v.n);
    let mut value = json!({ "state": state, "n": v.n });
    if show(Format::Sector) {
        let _ = writeln!(text, "A   = {}", tuple(v.tail()));
        value["A"] = json!(v.tail());
    }
    if show(Format::Entropy) {
        let _ = writeln!(text, "S_L = {}", tuple(&e.s));
        value["S_L"] = json!(e.s);
    }
    if show(Format::Mutual) {
        let _ = writeln!(text, "I_L = {}", tuple(&m.i));
        value["I_L"] = json!(m.i);
    }
    emit(cli, value, &text);
    Ok(0)
}

fn proof_json(p: &Proof) -> Value {
    json!({
        "name": p.name,
        "n": p.lp.n,
        "value": p.value().to_string(),
        "certificate": p.certificate.to_json(),
        "tight_state": p.tight_state,
    })
}

fn bounds(cli: &Cli, args: &BoundsArgs) -> CliResult<u8> {
    let n = args.n;
    match (args.prove, args.maximize) {
        (Some(Prove::A3), _) => {
            let p = prove_a3(n)?;
            emit(cli, proof_json(&p), &p.to_text());
        }
        (Some(Prove::An), _) => {
            let p = prove_an(n)?;
            emit(cli, proof_json(&p), &p.to_text());
        }
        (Some(Prove::A2), _) => {
            let (p, steps) = prove_a2(n)?;
            let mut text = p.to_text();
            for s in &steps {
                let _ = writeln!(text, "lift n = {}: A_2 <= {} (C(n,2) = {}{})", s.n, s.bound, s.binomial, if s.matches { "" } else { ", not tight" });
            }
            let mut value = proof_json(&p);
            value["lift"] = json!(steps);
            value["bound"] = json!(steps.last().map(|s| s.bound.clone()));
            emit(cli, value, &text);
        }
        (Some(Prove::Corollary2), _) => {
            let form = corollary2_form(n)?;
            let (_, cert) = corollary2_under_shadows(n)?;
            let implied = !cert.value.is_negative();
            let mut text = format!("form: {form}\nminimum under all shadow inequalities: {} (~{})\n", cert.value, num(cert.value_f64()));
            let _ = writeln!(text, "implied by the shadow inequalities: {}", if implied { "yes" } else { "no" });
            text.push_str(&cert.to_text());
            emit(cli, json!({ "form": form.to_json(), "implied_by_shadows": implied, "certificate": cert.to_json() }), &text);
        }
        (Some(Prove::Insufficiency), _) => {
            let r = shadow_insufficiency_report(n, args.k)?;
            let witness: Vec<String> = r.witness.iter().map(ToString::to_string).collect();
            let mut text = format!(
                "maximize A_{} at n = {} under MacWilliams, all shadows and A_2 <= C(n,2)\noptimum {} (~{}) vs C({}, {}) = {}\nexceeds binomial: {}\nwitness A = ({})\n",
                r.k,
                r.n,
                r.certificate.value,
                num(r.certificate.value_f64()),
                r.n,
                r.k,
                r.binomial,
                r.exceeds_binomial,
                witness.join(", ")
            );
            text.push_str(&r.certificate.to_text());
            emit(
                cli,
                json!({
                    "n": r.n, "k": r.k, "binomial": r.binomial.to_string(),
                    "exceeds_binomial": r.exceeds_binomial, "witness": witness,
                    "certificate": r.certificate.to_json(),
                }),
                &text,
            );
        }
        (None, Some(k)) => {
            let assumptions = args
                .assume
                .iter()
                .map(|a| a.parse::<Assumption>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::usage(e.to_string()))?;
            let lp = build_program(n, &assumptions)?;
            match lp.maximize_sector(k)? {
                LpOutcome::Optimal(cert) => {
                    cert.replay(&lp)?;
                    emit(cli, json!({ "bounded": true, "certificate": cert.to_json() }), &cert.to_text());
                }
                LpOutcome::Unbounded => {
                    emit(cli, json!({ "bounded": false }), &format!("A_{k} is unbounded under the given assumptions\n"));
                }
            }
        }
        (None, None) => return Err(CliError::usage("give --prove <preset> or --maximize <k> with --assume")),
    }
    Ok(0)
}

fn polytope(cli: &Cli, n: usize, point: Option<&[f64]>, tol: f64) -> CliResult<u8> {
    let p = facets(n)?;
    let mut text = String::new();
    for f in &p.facets {
        let _ = writeln!(text, "facet {f}");
    }
    let exact = p.to_json().vertices_exact;
    for v in &exact {
        let _ = writeln!(text, "vertex ({})", v.join(", "));
    }
    let mut value = json!({ "polytope": p.to_json() });
    if let Some(point) = point {
        let v = SectorVector::from_tail(point).map_err(|e| CliError::input(e.to_string()))?;
        let c = p.contains(&v, tol)?;
        let (nearest, slack) = c.nearest_facet(&p);
        let _ = writeln!(text, "point {}: {}", tuple(point), describe(&c.membership));
        let _ = writeln!(text, "nearest facet {nearest} (slack {})", num(slack));
        value["classification"] = json!(c);
        value["nearest_facet"] = json!({ "name": nearest, "slack": slack });
        if n == 3 {
            let lines = entanglement_lines(&v)?;
            let _ = writeln!(text, "not fully separable: {}, GME: {}", lines.not_fully_separable, lines.gme_detected);
            value["entanglement"] = json!(lines);
        }
    }
    emit(cli, value, &text);
    Ok(0)
}

fn describe(m: &Membership) -> String {
    match m {
        Membership::Inside => "inside".into(),
        Membership::Boundary(names) => format!("boundary ({})", names.join(", ")),
        Membership::Outside(names) => format!("outside (violates {})", names.join(", ")),
    }
}

const SCAN_CHUNK: usize = 1000;

fn random_rows(n: usize, samples: usize, ranks: &[usize], seed: u64) -> CliResult<Vec<SectorVector>> {
    (0..samples.div_ceil(SCAN_CHUNK))
        .into_par_iter()
        .map(|c| -> sectorlen::Result<Vec<SectorVector>> {
            let mut rng = SeededRng::for_task(seed, c as u64);
            let start = c * SCAN_CHUNK;
            (start..samples.min(start + SCAN_CHUNK))
                .map(|i| sector_lengths(&zoo::random_mixed_with(n, ranks[i % ranks.len()], &mut rng)?))
                .collect()
        })
        .collect::<sectorlen::Result<Vec<_>>>()
        .map(|chunks| chunks.into_iter().flatten().collect())
        .map_err(CliError::from)
}

/// The boundary families on a `grid × grid` parameter grid, with the facet
/// each is expected to saturate.
fn family_rows(grid: usize) -> CliResult<Vec<(&'static str, &'static str, SectorVector)>> {
    if grid < 2 {
        return Err(CliError::usage("--grid must be at least 2"));
    }
    let t = |i: usize| i as f64 / (grid - 1) as f64;
    let cells: Vec<(usize, usize)> = (0..grid).flat_map(|i| (0..grid).map(move |j| (i, j))).collect();
    let build = |name: &str, x: f64, y: f64| -> sectorlen::Result<DensityMatrix> {
        match name {
            "fam_A" => zoo::fam_a(x, y * PI),
            "fam_B" => zoo::fam_b(x, y * PI),
            // q ≤ 1 − p/2 keeps the |000> weight nonnegative.
            "fam_C" => zoo::fam_c(x, (y * x).min(1.0 - x / 2.0)),
            _ => zoo::fam_d(x * PI, y * PI),
        }
    };
    let mut rows = Vec::new();
    for (name, facet) in [("fam_A", "state_inv"), ("fam_B", "state_inv"), ("fam_C", "state_inv"), ("fam_D", "sssa")] {
        let vs = cells
            .par_iter()
            .map(|&(i, j)| sector_lengths(&build(name, t(i), t(j))?))
            .collect::<sectorlen::Result<Vec<_>>>()?;
        rows.extend(vs.into_iter().map(|v| (name, facet, v)));
    }
    Ok(rows)
}

fn scan(cli: &Cli, args: &ScanArgs) -> CliResult<u8> {
    let p: Polytope = facets(args.n)?;
    if args.families && args.n != 3 {
        return Err(CliError::usage("--families sweeps the three-qubit boundary families; use --n 3"));
    }
    let dim = 1usize << args.n;
    let ranks: Vec<usize> = if args.ranks.is_empty() { (1..=dim).collect() } else { args.ranks.clone() };
    if let Some(r) = ranks.iter().find(|&&r| r == 0 || r > dim) {
        return Err(CliError::usage(format!("rank {r} outside 1..={dim}")));
    }
    let mut rows: Vec<(&str, Option<&str>, SectorVector)> =
        random_rows(args.n, args.samples, &ranks, cli.seed)?.into_iter().map(|v| ("random", None, v)).collect();
    if args.families {
        rows.extend(family_rows(args.grid)?.into_iter().map(|(name, facet, v)| (name, Some(facet), v)));
    }

    let mut violations = 0usize;
    let mut inside = 0usize;
    let mut saturation: BTreeMap<String, usize> = BTreeMap::new();
    let mut coverage: BTreeMap<String, (usize, usize)> = BTreeMap::new();
    let mut writer = match &args.out {
        Some(path) => Some(csv::Writer::from_path(path).map_err(|e| CliError::input(format!("{}: {e}", path.display())))?),
        None => None,
    };
    if let Some(w) = writer.as_mut() {
        let mut header = vec!["source".to_string()];
        header.extend(scan_header(args.n));
        w.write_record(&header).map_err(|e| CliError::input(e.to_string()))?;
    }
    for (source, expected, v) in &rows {
        let c = p.contains(v, args.tol)?;
        match &c.membership {
            Membership::Inside => inside += 1,
            Membership::Boundary(names) => {
                for name in names {
                    *saturation.entry(name.clone()).or_default() += 1;
                }
            }
            Membership::Outside(_) => violations += 1,
        }
        if let Some(facet) = expected {
            let hit = matches!(&c.membership, Membership::Boundary(names) if names.iter().any(|x| x == facet));
            let entry = coverage.entry(source.to_string()).or_default();
            entry.0 += hit as usize;
            entry.1 += 1;
        }
        if let Some(w) = writer.as_mut() {
            let mut record = vec![source.to_string()];
            record.extend(scan_record(&p, v, args.tol)?);
            w.write_record(&record).map_err(|e| CliError::input(e.to_string()))?;
        }
    }
    if let Some(mut w) = writer {
        w.flush().map_err(|e| CliError::input(e.to_string()))?;
    }
    let coverage_frac: BTreeMap<String, f64> = coverage.iter().map(|(k, (hit, all))| (k.clone(), *hit as f64 / *all as f64)).collect();
    let coverage_ok = coverage_frac.values().all(|&f| f >= 0.99);
    let passed = violations == 0 && coverage_ok;

    let mut text = format!("n = {}, random samples {}, ranks {:?}\n", args.n, args.samples, ranks);
    let _ = writeln!(text, "violations: {violations}");
    let _ = writeln!(text, "inside: {inside}");
    for (facet, count) in &saturation {
        let _ = writeln!(text, "on facet {facet}: {count}");
    }
    for (family, frac) in &coverage_frac {
        let _ = writeln!(text, "{family}: {:.2}% of grid cells on its facet", 100.0 * frac);
    }
    if let Some(path) = &args.out {
        let _ = writeln!(text, "wrote {} rows to {}", rows.len(), path.display());
    }
    let _ = writeln!(text, "result: {}", if passed { "pass" } else { "FAIL" });
    emit(
        cli,
        json!({
            "n": args.n, "samples": args.samples, "ranks": ranks, "violations": violations, "inside": inside,
            "saturation": saturation, "family_coverage": coverage_frac, "rows": rows.len(),
            "out": args.out.as_ref().map(|p| p.display().to_string()), "passed": passed,
        }),
        &text,
    );
    Ok(if passed { 0 } else { 1 })
}

fn verify(cli: &Cli, suite: Suite, quick: bool) -> CliResult<u8> {
    let size = if quick { SuiteSize::QUICK } else { SuiteSize::FULL };
    let (id_n, id_pure, id_mixed) = if quick { (4, 20, 200) } else { (6, 200, 10_000) };
    let want = |s: Suite| suite == s || suite == Suite::All;
    let mut reports: Vec<VerificationReport> = Vec::new();
    if want(Suite::AppendixA) {
        reports.push(verify_appendix_a(size, cli.seed)?);
    }
    if want(Suite::AppendixB) {
        reports.push(verify_appendix_b(size, cli.seed)?);
    }
    if want(Suite::AppendixC) {
        reports.push(verify_appendix_c(size, cli.seed)?);
    }
    if want(Suite::Identities) {
        reports.push(verify_identities(id_n, id_pure, id_mixed, cli.seed)?);
    }
    let passed = reports.iter().all(|r| r.passed);
    let mut text: String = reports.iter().map(VerificationReport::to_text).collect();
    let _ = writeln!(text, "overall: {}", if passed { "pass" } else { "FAIL" });
    emit(cli, json!({ "passed": passed, "reports": reports }), &text);
    Ok(if passed { 0 } else { 1 })
}

fn detect_cmd(cli: &Cli, state: &str, tol: f64, pivot: Option<usize>) -> CliResult<u8> {
    let rho = load_state(state)?;
    let v = sector_lengths(&rho)?;
    let d = detect(&v, tol)?;
    let mut text = format!("A = {}\n", tuple(v.tail()));
    for c in &d.criteria {
        let _ = writeln!(text, "  {}: value {} threshold {} -> {}", c.name, num(c.value), num(c.threshold), if c.fired { "fired" } else { "-" });
    }
    for note in &d.notes {
        let _ = writeln!(text, "note: {note}");
    }
    let verdict = if d.gme_detected {
        format!("GME ({})", d.criterion_used().unwrap_or_default())
    } else if d.entangled {
        format!("entangled, not fully separable ({})", d.criterion_used().unwrap_or_default())
    } else {
        "no flag".to_string()
    };
    let _ = writeln!(text, "verdict: {verdict}");
    let mut value = json!({ "state": state, "A": v.tail(), "detection": d, "verdict": verdict });
    if let Some(pivot) = pivot {
        let check = pair_sum_check(&rho, pivot)?;
        let _ = writeln!(text, "pair sum around qubit {pivot}: {} <= {}: {}", num(check.value), num(check.bound), if check.passes { "pass" } else { "FAIL" });
        if let Some(w) = &check.warning {
            let _ = writeln!(text, "warning: {w}");
        }
        value["pair_sum"] = json!(check);
    }
    emit(cli, value, &text);
    Ok(0)
}

fn represent(cli: &Cli, file: &Path, pivot: usize) -> CliResult<u8> {
    let spectra = MarginalSpectra::from_json(&read_text(file)?).map_err(|e| CliError::input(format!("{}: {e}", file.display())))?;
    let r = representability_check(&spectra, pivot)?;
    let text = format!(
        "pivot {pivot}: 2 sum pair purities = {} vs bound {}: {}\n",
        num(r.lhs),
        num(r.rhs),
        if r.passes { "pass (no obstruction)" } else { "FAIL (no global state has these marginals)" }
    );
    emit(cli, json!({ "file": file.display().to_string(), "pivot": pivot, "result": r }), &text);
    Ok(if r.passes { 0 } else { 1 })
}
