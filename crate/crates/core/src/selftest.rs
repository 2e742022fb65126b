//! The full invariant suite behind `selftest`: summatory identity,
//! oracle equivalence, the σ bound, periodicity, multiplicativity in r,
//! the duality round trip, and tail-bound soundness.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::arith;
use crate::crsum::{self, CRQuery, CrOracle};
use crate::expansion::{self, CoefficientFamily};
use crate::rational::to_f64;
use crate::Result;

/// Outcome of one named check.
#[derive(Debug, Clone)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    /// First failing case, or a one-line summary on success.
    pub detail: String,
}

/// Ranges exercised by the suite.
#[derive(Debug, Clone, Copy)]
pub struct SelftestConfig {
    pub quick: bool,
}

pub fn run(config: SelftestConfig) -> Result<Vec<CheckResult>> {
    let q = config.quick;
    Ok(vec![
        check_identity(if q { 20 } else { 60 }, if q { 40 } else { 300 })?,
        check_oracle(if q { 10 } else { 24 }, if q { 20 } else { 100 })?,
        check_bound(if q { 60 } else { 200 }, if q { 30 } else { 100 })?,
        check_periodicity(if q { 8 } else { 20 }, if q { 12 } else { 50 })?,
        check_multiplicativity(if q { 12 } else { 30 }, if q { 20 } else { 100 })?,
        check_special_arguments(if q { 20 } else { 50 })?,
        check_round_trip(if q { 5 } else { 20 })?,
        check_tail_soundness(if q { 8 } else { 50 }, if q { 300 } else { 1000 })?,
    ])
}

pub fn all_passed(results: &[CheckResult]) -> bool {
    results.iter().all(|r| r.passed)
}

fn pass(name: &'static str, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed: true,
        detail,
    }
}

fn fail(name: &'static str, detail: String) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        detail,
    }
}

/// Σ_{r|q} c_r^s(n) = ξ_q^s(n), exact, for q <= q_max, n <= n_max,
/// s in {1,2,3}.
fn check_identity(q_max: u64, n_max: u64) -> Result<CheckResult> {
    const NAME: &str = "summatory_identity";
    let mut cases = 0u64;
    for s in 1..=3u32 {
        for n in 0..=n_max {
            let report = crsum::cr_identity_check(q_max, n, s)?;
            if let Some(v) = report.violations.first() {
                return Ok(fail(
                    NAME,
                    format!("q={} n={} s={}: {} != {}", v.q, n, s, v.lhs, v.rhs),
                ));
            }
            cases += q_max;
        }
    }
    Ok(pass(NAME, format!("{cases} cases exact")))
}

/// Exponential sum agrees with the Möbius form within 1e-6.
fn check_oracle(r_max: u64, n_max: i64) -> Result<CheckResult> {
    const NAME: &str = "oracle_equivalence";
    let tol = 1e-6;
    let mut cases = 0u64;
    for s in 1..=3u32 {
        for r in 1..=r_max {
            let oracle = CrOracle::new(r, s)?;
            for n in 0..=n_max {
                let exact = crsum::cr_sum(&CRQuery { r, s, n })?;
                let e = match oracle.eval(n, tol) {
                    Ok(e) => e,
                    Err(err) => return Ok(fail(NAME, err.to_string())),
                };
                if BigInt::from(e.value) != exact {
                    return Ok(fail(
                        NAME,
                        format!("r={r} s={s} n={n}: oracle {} != exact {exact}", e.value),
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(pass(NAME, format!("{cases} cases within {tol:e}")))
}

/// |c_r^s(n)| <= σ_{1,s}(n).
fn check_bound(r_max: u64, n_max: u64) -> Result<CheckResult> {
    const NAME: &str = "sigma_bound";
    for s in 1..=3u32 {
        for n in 1..=n_max {
            let bound = crsum::cr_bound(n, s)?;
            let table = crsum::cr_sum_batch(n, s, r_max)?;
            for r in 1..=r_max {
                let v = &table[r as usize - 1];
                if v.abs() > bound {
                    return Ok(fail(
                        NAME,
                        format!("r={r} s={s} n={n}: |{v}| > {bound}"),
                    ));
                }
            }
        }
    }
    Ok(pass(NAME, format!("exhaustive to r<={r_max}, n<={n_max}, s<=3")))
}

/// c_r^s(n) = c_r^s(n + r^s).
fn check_periodicity(r_max: u64, n_max: i64) -> Result<CheckResult> {
    const NAME: &str = "periodicity";
    for s in 1..=3u32 {
        for r in 1..=r_max {
            let period = (r as i64).pow(s);
            for n in 0..=n_max {
                let a = crsum::cr_sum(&CRQuery { r, s, n })?;
                let b = crsum::cr_sum(&CRQuery { r, s, n: n + period })?;
                if a != b {
                    return Ok(fail(NAME, format!("r={r} s={s} n={n}: {a} != {b}")));
                }
            }
        }
    }
    Ok(pass(NAME, format!("exhaustive to r<={r_max}, n<={n_max}, s<=3")))
}

/// c_{r1 r2}^s(n) = c_{r1}^s(n) c_{r2}^s(n) for coprime r1, r2.
fn check_multiplicativity(r_max: u64, n_max: i64) -> Result<CheckResult> {
    const NAME: &str = "multiplicativity_in_r";
    for s in 1..=3u32 {
        for r1 in 1..=r_max {
            for r2 in 1..=r_max {
                if num_integer::gcd(r1, r2) != 1 {
                    continue;
                }
                for n in 0..=n_max {
                    let prod = crsum::cr_sum(&CRQuery { r: r1, s, n })?
                        * crsum::cr_sum(&CRQuery { r: r2, s, n })?;
                    let joint = crsum::cr_sum(&CRQuery { r: r1 * r2, s, n })?;
                    if prod != joint {
                        return Ok(fail(
                            NAME,
                            format!("r1={r1} r2={r2} s={s} n={n}: {joint} != {prod}"),
                        ));
                    }
                }
            }
        }
    }
    Ok(pass(NAME, format!("coprime pairs to r<={r_max}, n<={n_max}, s<=3")))
}

/// c_r^s(0) = J_s(r) and c_r^s(1) = μ(r).
fn check_special_arguments(r_max: u64) -> Result<CheckResult> {
    const NAME: &str = "special_arguments";
    for s in 1..=3u32 {
        for r in 1..=r_max {
            let at_zero = crsum::cr_sum(&CRQuery { r, s, n: 0 })?;
            if at_zero != arith::jordan_totient(r, s)? {
                return Ok(fail(NAME, format!("c_{r}^{s}(0) != J_{s}({r})")));
            }
            let at_one = crsum::cr_sum(&CRQuery { r, s, n: 1 })?;
            if at_one != BigInt::from(arith::mobius(r)?) {
                return Ok(fail(NAME, format!("c_{r}^{s}(1) != mu({r})")));
            }
        }
    }
    Ok(pass(NAME, format!("r <= {r_max}, s <= 3")))
}

/// ĝ → γ → ĝ is the identity on finitely supported families, in exact
/// rational arithmetic.
fn check_round_trip(support: u64) -> Result<CheckResult> {
    const NAME: &str = "duality_round_trip";
    let s = 2u32;
    // deterministic pseudo-random coefficients on r <= support
    let mut table = BTreeMap::new();
    let mut state = 0x9e3779b97f4a7c15u64;
    for r in 1..=support {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let num = ((state >> 33) % 201) as i64 - 100;
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        let den = ((state >> 33) % 100) as i64 + 1;
        table.insert(r, BigRational::new(BigInt::from(num), BigInt::from(den)));
    }
    let fam = CoefficientFamily::custom(s, table.clone())?;
    let a_limit = support * support;
    for n in 1..=support {
        let recovered = expansion::ghat_from_gamma(
            |a| expansion::gamma_from_ghat(&fam, a, support).unwrap().value,
            n,
            a_limit,
            s,
        )?;
        let expected = table.get(&n).cloned().unwrap_or_else(BigRational::zero);
        if recovered != expected {
            return Ok(fail(
                NAME,
                format!("n={n}: recovered {recovered} != {expected}"),
            ));
        }
    }
    Ok(pass(NAME, format!("exact for n <= {support}")))
}

/// The reported tail bound dominates the true remainder:
/// |value(R) - value(R')| <= tail_bound(R) for R' >> R.
fn check_tail_soundness(n_max: u64, r_far: u64) -> Result<CheckResult> {
    const NAME: &str = "tail_soundness";
    let fam = CoefficientFamily::TauS { s: 2 };
    let r_near = r_far / 10;
    for a in 1..=n_max {
        let near = expansion::eval_expansion(&fam, a, r_near)?;
        let far = expansion::eval_expansion(&fam, a, r_far)?;
        let drift = (near.multiplier
            * to_f64(&(&near.exact_core - &far.exact_core)))
        .abs();
        if drift > near.tail_bound {
            return Ok(fail(
                NAME,
                format!("a={a}: drift {drift} > tail {}", near.tail_bound),
            ));
        }
        if far.tail_bound > near.tail_bound {
            return Ok(fail(NAME, format!("a={a}: tail bound not monotone")));
        }
    }
    Ok(pass(NAME, format!("tau_2 expansions, a <= {n_max}, R = {r_near}->{r_far}")))
}
