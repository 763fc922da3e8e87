//! Python bindings. States are given either as a reference string
//! (`"ghz:3"`, `"rand:4:seed=2:rank=3"`, ...) or as a square nested list of
//! complex numbers.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::sectorlen as core;
use core::linalg::{CMatrix, C64};
use core::polytope::{facets, Membership};
use core::sectors::{mutual_entropies, sector_lengths_with, sectors_to_entropies, SectorRoute};
use core::sssa::{verify_appendix_a, verify_appendix_b, verify_appendix_c, SuiteSize};
use core::{DensityMatrix, SectorVector, StateRecipe};

fn err(e: core::Error) -> PyErr {
    match e {
        core::Error::Infeasible(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn load(state: &Bound<'_, PyAny>) -> PyResult<DensityMatrix> {
    if let Ok(s) = state.extract::<String>() {
        let recipe: StateRecipe = s.parse().map_err(err)?;
        return recipe.build().map_err(err);
    }
    let rows: Vec<Vec<C64>> = state.extract()?;
    let d = rows.len();
    if rows.iter().any(|r| r.len() != d) {
        return Err(PyValueError::new_err("density matrix must be square"));
    }
    DensityMatrix::new(CMatrix::from_fn(d, d, |i, j| rows[i][j])).map_err(err)
}

fn sectors(state: &Bound<'_, PyAny>, route: &str) -> PyResult<SectorVector> {
    let rho = load(state)?;
    let v = match route {
        "auto" => core::sectors::sector_lengths(&rho),
        "pauli" => sector_lengths_with(&rho, SectorRoute::PauliSum),
        "purity" => sector_lengths_with(&rho, SectorRoute::Purity),
        other => return Err(PyValueError::new_err(format!("unknown route {other:?}"))),
    };
    v.map_err(err)
}

/// Sector lengths `[A_0, ..., A_n]`.
#[pyfunction]
#[pyo3(signature = (state, route = "auto"))]
fn sector_lengths(state: &Bound<'_, PyAny>, route: &str) -> PyResult<Vec<f64>> {
    Ok(sectors(state, route)?.a)
}

/// Averaged linear entropies `[S_1, ..., S_n]`.
#[pyfunction]
fn linear_entropies(state: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    Ok(sectors_to_entropies(&sectors(state, "auto")?).s)
}

/// Linear mutual entropies `[I_1, ..., I_n]`.
#[pyfunction]
fn mutual_information(state: &Bound<'_, PyAny>) -> PyResult<Vec<f64>> {
    Ok(mutual_entropies(&sectors_to_entropies(&sectors(state, "auto")?)).i)
}

fn fraction(s: &str) -> f64 {
    match s.split_once('/') {
        Some((p, q)) => p.parse::<f64>().unwrap_or(f64::NAN) / q.parse::<f64>().unwrap_or(f64::NAN),
        None => s.parse().unwrap_or(f64::NAN),
    }
}

/// Exact bound from a preset (`"a2"`, `"a3"`, `"an"`) as `(fraction, float)`.
#[pyfunction]
fn bound(n: usize, preset: &str) -> PyResult<(String, f64)> {
    let value = match preset {
        "a2" => {
            let (_, steps) = core::proofs::prove_a2(n).map_err(err)?;
            let last = steps.last().expect("the lift includes its base");
            return Ok((last.bound.clone(), fraction(&last.bound)));
        }
        "a3" => core::proofs::prove_a3(n),
        "an" => core::proofs::prove_an(n),
        other => return Err(PyValueError::new_err(format!("unknown preset {other:?}"))),
    }
    .map_err(err)?;
    Ok((value.value().to_string(), core::proofs::value_f64(value.value())))
}

/// Entanglement criteria; returns a dict with `entangled`, `gme_detected`
/// and the first criterion that fired.
#[pyfunction]
#[pyo3(signature = (state, tol = 1e-9))]
fn detect<'py>(py: Python<'py>, state: &Bound<'py, PyAny>, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let d = core::entanglement::detect(&sectors(state, "auto")?, tol).map_err(err)?;
    let out = PyDict::new(py);
    out.set_item("entangled", d.entangled)?;
    out.set_item("gme_detected", d.gme_detected)?;
    out.set_item("criterion", d.criterion_used())?;
    Ok(out)
}

/// Classifies `[A_1, ..., A_n]` against the n = 2 or 3 polytope:
/// `("inside" | "boundary" | "outside", facet names)`.
#[pyfunction]
#[pyo3(signature = (point, tol = 1e-9))]
fn classify(point: Vec<f64>, tol: f64) -> PyResult<(String, Vec<String>)> {
    let p = facets(point.len()).map_err(err)?;
    let v = SectorVector::from_tail(&point).map_err(err)?;
    Ok(match p.contains(&v, tol).map_err(err)?.membership {
        Membership::Inside => ("inside".into(), Vec::new()),
        Membership::Boundary(names) => ("boundary".into(), names),
        Membership::Outside(names) => ("outside".into(), names),
    })
}

/// Runs a verification suite (`"A"`, `"B"` or `"C"`) and returns `(passed, report)`.
#[pyfunction]
#[pyo3(signature = (suite, quick = true, seed = 1))]
fn verify(py: Python<'_>, suite: &str, quick: bool, seed: u64) -> PyResult<(bool, String)> {
    let size = if quick { SuiteSize::QUICK } else { SuiteSize::FULL };
    let run = match suite {
        "A" => verify_appendix_a,
        "B" => verify_appendix_b,
        "C" => verify_appendix_c,
        other => return Err(PyValueError::new_err(format!("unknown suite {other:?}"))),
    };
    let report = py.detach(|| run(size, seed)).map_err(err)?;
    Ok((report.passed, report.to_text()))
}

#[pymodule]
fn sectorlen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(sector_lengths, m)?)?;
    m.add_function(wrap_pyfunction!(linear_entropies, m)?)?;
    m.add_function(wrap_pyfunction!(mutual_information, m)?)?;
    m.add_function(wrap_pyfunction!(bound, m)?)?;
    m.add_function(wrap_pyfunction!(detect, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
