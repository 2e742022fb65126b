//! Python bindings for the Cohen-Ramanujan library.
//!
//! Rationals cross the boundary as `(numerator, denominator)` tuples of
//! Python ints; coefficient tables as `{r: (num, den)}` dicts.
//! Expansion families are selected by name: `"tau"`, `"sigma"`,
//! `"omega"`, or `"custom"` (which requires a `table`).

use std::cell::RefCell;
use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use cohen_ramanujan::crsum::CRQuery;
use cohen_ramanujan::expansion::{AdditiveFunctionSpec, CoefficientFamily};
use cohen_ramanujan::{arith, crsum, expansion, selftest};

fn lib_err(e: cohen_ramanujan::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

type PyRational = (BigInt, BigInt);

fn to_py_rational(r: &BigRational) -> PyRational {
    (r.numer().clone(), r.denom().clone())
}

fn from_py_rational((num, den): PyRational) -> PyResult<BigRational> {
    if den.is_zero() {
        return Err(PyValueError::new_err("denominator must be nonzero"));
    }
    Ok(BigRational::new(num, den))
}

// ---- multiplicative toolbox -------------------------------------------

#[pyfunction]
fn factor(n: u64) -> PyResult<Vec<(u64, u32)>> {
    Ok(arith::factor(n).map_err(lib_err)?.pairs().to_vec())
}

#[pyfunction]
fn mobius(n: u64) -> PyResult<i32> {
    arith::mobius(n).map_err(lib_err)
}

#[pyfunction]
fn divisors(n: u64) -> PyResult<Vec<u64>> {
    arith::divisors(n).map_err(lib_err)
}

#[pyfunction]
fn gcd_s(a: u64, b: u64, s: u32) -> PyResult<u64> {
    arith::gcd_s(a, b, s).map_err(lib_err)
}

#[pyfunction]
fn is_s_power_free(m: u64, s: u32) -> PyResult<bool> {
    arith::is_s_power_free(m, s).map_err(lib_err)
}

#[pyfunction]
fn tau_s(n: u64, s: u32) -> PyResult<u64> {
    arith::tau_s(n, s).map_err(lib_err)
}

#[pyfunction]
fn sigma_k(n: u64, k: u32) -> PyResult<BigInt> {
    arith::sigma_k(n, k).map_err(lib_err)
}

#[pyfunction]
fn sigma_k_s(n: u64, k: u32, s: u32) -> PyResult<BigInt> {
    arith::sigma_k_s(n, k, s).map_err(lib_err)
}

#[pyfunction]
fn xi(q: u64, n: u64, s: u32) -> PyResult<BigInt> {
    arith::xi(q, n, s).map_err(lib_err)
}

#[pyfunction]
fn jordan_totient(n: u64, s: u32) -> PyResult<BigInt> {
    arith::jordan_totient(n, s).map_err(lib_err)
}

#[pyfunction]
fn klee(n: u64, s: u32) -> PyResult<BigInt> {
    arith::klee(n, s).map_err(lib_err)
}

#[pyfunction]
fn omega(n: u64) -> PyResult<u32> {
    arith::omega(n).map_err(lib_err)
}

/// ζ(s) as `(value, error_bound)`.
#[pyfunction]
fn zeta(s: u32) -> PyResult<(f64, f64)> {
    let z = arith::zeta(s).map_err(lib_err)?;
    Ok((z.value, z.error_bound))
}

// ---- Cohen-Ramanujan sums ---------------------------------------------

#[pyfunction]
fn cr_sum(r: u64, s: u32, n: i64) -> PyResult<BigInt> {
    let q = CRQuery::new(r, s, n).map_err(lib_err)?;
    crsum::cr_sum(&q).map_err(lib_err)
}

/// `[c_1^s(n), ..., c_{r_max}^s(n)]` in one sieve pass.
#[pyfunction]
fn cr_sum_batch(n: u64, s: u32, r_max: u64) -> PyResult<Vec<BigInt>> {
    crsum::cr_sum_batch(n, s, r_max).map_err(lib_err)
}

/// Direct exponential-sum evaluation, returned as `(real, imag)`.
/// Raises if the imaginary part exceeds `tol` or r^s is out of range.
#[pyfunction]
#[pyo3(signature = (r, s, n, tol=1e-6))]
fn cr_sum_oracle(r: u64, s: u32, n: i64, tol: f64) -> PyResult<(f64, f64)> {
    let q = CRQuery::new(r, s, n).map_err(lib_err)?;
    let e = crsum::cr_sum_oracle(&q, tol).map_err(lib_err)?;
    Ok((e.real, e.imag))
}

/// σ_{1,s}(n), an upper bound for |c_r^s(n)| uniform in r.
#[pyfunction]
fn cr_bound(n: u64, s: u32) -> PyResult<BigInt> {
    crsum::cr_bound(n, s).map_err(lib_err)
}

/// True iff Σ_{r|q} c_r^s(n) = ξ_q^s(n) for every q <= q_max.
#[pyfunction]
fn cr_identity_check(q_max: u64, n: u64, s: u32) -> PyResult<bool> {
    Ok(crsum::cr_identity_check(q_max, n, s).map_err(lib_err)?.passed())
}

// ---- expansions -------------------------------------------------------

fn build_family(
    family: &str,
    s: u32,
    k: u32,
    table: Option<BTreeMap<u64, PyRational>>,
    p_max: u64,
    v_max: u32,
) -> PyResult<CoefficientFamily> {
    let fam = match family {
        "tau" => CoefficientFamily::TauS { s },
        "sigma" => CoefficientFamily::SigmaKS { k, s },
        "omega" => expansion::additive_coefficients(
            &AdditiveFunctionSpec::omega(p_max, v_max),
            s,
        )
        .map_err(lib_err)?,
        "custom" => {
            let table = table.ok_or_else(|| {
                PyValueError::new_err("custom family requires a table")
            })?;
            let mut parsed = BTreeMap::new();
            for (r, v) in table {
                parsed.insert(r, from_py_rational(v)?);
            }
            CoefficientFamily::custom(s, parsed).map_err(lib_err)?
        }
        other => {
            return Err(PyValueError::new_err(format!(
                "unknown family {other:?}; expected tau, sigma, omega, or custom"
            )))
        }
    };
    fam.validate().map_err(lib_err)?;
    Ok(fam)
}

/// Truncated expansion value at a. Returns a dict with `value`,
/// `tail_bound`, `multiplier`, `terms_used`, and the exact pre-multiplier
/// core as an `exact_core` rational tuple.
#[pyfunction]
#[pyo3(signature = (family, a, terms=5000, s=2, k=1, table=None, p_max=997, v_max=30))]
#[allow(clippy::too_many_arguments)]
fn eval_expansion<'py>(
    py: Python<'py>,
    family: &str,
    a: u64,
    terms: u64,
    s: u32,
    k: u32,
    table: Option<BTreeMap<u64, PyRational>>,
    p_max: u64,
    v_max: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = build_family(family, s, k, table, p_max, v_max)?;
    let r = expansion::eval_expansion(&fam, a, terms).map_err(lib_err)?;
    let out = PyDict::new(py);
    out.set_item("value", r.value)?;
    out.set_item("tail_bound", r.tail_bound)?;
    out.set_item("multiplier", r.multiplier)?;
    out.set_item("terms_used", r.terms_used)?;
    out.set_item("exact_core", to_py_rational(&r.exact_core))?;
    Ok(out)
}

/// ĝ(r) for the named family, as a rational tuple.
#[pyfunction]
#[pyo3(signature = (family, r, s=2, k=1, table=None, p_max=997, v_max=30))]
fn coefficient(
    family: &str,
    r: u64,
    s: u32,
    k: u32,
    table: Option<BTreeMap<u64, PyRational>>,
    p_max: u64,
    v_max: u32,
) -> PyResult<PyRational> {
    let fam = build_family(family, s, k, table, p_max, v_max)?;
    Ok(to_py_rational(&fam.coefficient(r).map_err(lib_err)?))
}

/// γ(a) = a^s Σ_{m<=mu_terms} ĝ(am) μ(m) as `(rational, tail_bound)`.
#[pyfunction]
#[pyo3(signature = (family, a, mu_terms=5000, s=2, k=1, table=None, p_max=997, v_max=30))]
#[allow(clippy::too_many_arguments)]
fn gamma_from_ghat(
    family: &str,
    a: u64,
    mu_terms: u64,
    s: u32,
    k: u32,
    table: Option<BTreeMap<u64, PyRational>>,
    p_max: u64,
    v_max: u32,
) -> PyResult<(PyRational, f64)> {
    let fam = build_family(family, s, k, table, p_max, v_max)?;
    let g = expansion::gamma_from_ghat(&fam, a, mu_terms).map_err(lib_err)?;
    Ok((to_py_rational(&g.value), g.tail_bound))
}

/// Recovers ĝ(n) from a Python callable `gamma(a) -> (num, den)`:
/// ĝ(n) = Σ_{n|a, a<=a_limit} μ(a/n) γ(a) / a^s.
#[pyfunction]
#[pyo3(signature = (gamma, n, a_limit, s=2))]
fn ghat_from_gamma(
    py: Python<'_>,
    gamma: Py<PyAny>,
    n: u64,
    a_limit: u64,
    s: u32,
) -> PyResult<PyRational> {
    let failure: RefCell<Option<PyErr>> = RefCell::new(None);
    let call = |a: u64| -> BigRational {
        if failure.borrow().is_some() {
            return BigRational::zero();
        }
        let result = gamma
            .call1(py, (a,))
            .and_then(|v| v.extract::<PyRational>(py))
            .and_then(from_py_rational);
        match result {
            Ok(v) => v,
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                BigRational::zero()
            }
        }
    };
    let out = expansion::ghat_from_gamma(call, n, a_limit, s).map_err(lib_err)?;
    if let Some(e) = failure.into_inner() {
        return Err(e);
    }
    Ok(to_py_rational(&out))
}

/// Cross-checks the direct series against the Möbius-transform route
/// for every a <= a_max. Returns a summary dict with per-row details.
#[pyfunction]
#[pyo3(signature = (family, a_max=20, terms=2000, mu_terms=2000, s=2, k=1, table=None, p_max=997, v_max=30))]
#[allow(clippy::too_many_arguments)]
fn verify_equivalence<'py>(
    py: Python<'py>,
    family: &str,
    a_max: u64,
    terms: u64,
    mu_terms: u64,
    s: u32,
    k: u32,
    table: Option<BTreeMap<u64, PyRational>>,
    p_max: u64,
    v_max: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = build_family(family, s, k, table, p_max, v_max)?;
    let report =
        expansion::verify_equivalence(&fam, a_max, terms, mu_terms).map_err(lib_err)?;
    let rows = report
        .rows
        .iter()
        .map(|row| {
            let d = PyDict::new(py);
            d.set_item("a", row.a)?;
            d.set_item("direct", row.direct)?;
            d.set_item("via_gamma", row.via_gamma)?;
            d.set_item("discrepancy", row.discrepancy)?;
            d.set_item("direct_tail", row.direct_tail)?;
            d.set_item("gamma_tail", row.gamma_tail)?;
            d.set_item("exact", row.exact)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let out = PyDict::new(py);
    out.set_item("rows", rows)?;
    out.set_item("max_discrepancy", report.max_discrepancy)?;
    out.set_item("all_within_bounds", report.all_within_bounds)?;
    out.set_item("exact_everywhere", report.exact_everywhere)?;
    Ok(out)
}

/// Expansion coefficients for ω as `{r: (num, den)}` for r <= r_max,
/// plus the builder's truncation-error estimate.
#[pyfunction]
#[pyo3(signature = (s=2, p_max=997, v_max=30, r_max=100))]
fn additive_omega_coefficients<'py>(
    py: Python<'py>,
    s: u32,
    p_max: u64,
    v_max: u32,
    r_max: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let fam = expansion::additive_coefficients(
        &AdditiveFunctionSpec::omega(p_max, v_max),
        s,
    )
    .map_err(lib_err)?;
    let coeffs = PyDict::new(py);
    for r in 1..=r_max {
        coeffs.set_item(r, to_py_rational(&fam.coefficient(r).map_err(lib_err)?))?;
    }
    let out = PyDict::new(py);
    out.set_item("coefficients", coeffs)?;
    if let CoefficientFamily::Additive(f) = &fam {
        out.set_item("truncation_error", f.truncation_error)?;
    }
    Ok(out)
}

/// Runs the library's internal consistency checks. Returns a list of
/// `(name, passed, detail)` triples.
#[pyfunction]
#[pyo3(signature = (quick=false))]
fn run_selftest(quick: bool) -> PyResult<Vec<(String, bool, String)>> {
    let results = selftest::run(selftest::SelftestConfig { quick }).map_err(lib_err)?;
    Ok(results
        .into_iter()
        .map(|r| (r.name.to_string(), r.passed, r.detail))
        .collect())
}

#[pymodule]
fn cohen_ramanujan_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(factor, m)?)?;
    m.add_function(wrap_pyfunction!(mobius, m)?)?;
    m.add_function(wrap_pyfunction!(divisors, m)?)?;
    m.add_function(wrap_pyfunction!(gcd_s, m)?)?;
    m.add_function(wrap_pyfunction!(is_s_power_free, m)?)?;
    m.add_function(wrap_pyfunction!(tau_s, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_k_s, m)?)?;
    m.add_function(wrap_pyfunction!(xi, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_totient, m)?)?;
    m.add_function(wrap_pyfunction!(klee, m)?)?;
    m.add_function(wrap_pyfunction!(omega, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(cr_sum, m)?)?;
    m.add_function(wrap_pyfunction!(cr_sum_batch, m)?)?;
    m.add_function(wrap_pyfunction!(cr_sum_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(cr_bound, m)?)?;
    m.add_function(wrap_pyfunction!(cr_identity_check, m)?)?;
    m.add_function(wrap_pyfunction!(eval_expansion, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_from_ghat, m)?)?;
    m.add_function(wrap_pyfunction!(ghat_from_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(verify_equivalence, m)?)?;
    m.add_function(wrap_pyfunction!(additive_omega_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(run_selftest, m)?)?;
    Ok(())
}
