//! End-to-end acceptance suite. Each criterion prints one pass/fail
//! line; the test fails if any criterion does.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};

use cohen_ramanujan::arith;
use cohen_ramanujan::crsum::{self, CRQuery, CrOracle};
use cohen_ramanujan::expansion::{
    self, AdditiveFunctionSpec, CoefficientFamily,
};
use cohen_ramanujan::rational::to_f64;
use cohen_ramanujan::selftest;

struct Criterion {
    label: &'static str,
    failure: Option<String>,
}

fn record(results: &mut Vec<Criterion>, label: &'static str, failure: Option<String>) {
    let status = if failure.is_none() { "PASS" } else { "FAIL" };
    println!("{status} {label}");
    if let Some(f) = &failure {
        println!("     {f}");
    }
    results.push(Criterion { label, failure });
}

#[test]
fn acceptance() {
    let mut results = Vec::new();

    record(&mut results, "criterion 1: summatory identity (exact, q<=60, n<=300, s<=3)", criterion_identity());
    record(&mut results, "criterion 2: definition vs Mobius form (r<=24, s<=3, n<=100, 1e-6)", criterion_oracle());
    record(&mut results, "criterion 3: tau_2 expansion within tail bound (n<=50, R=5000)", criterion_tau());
    record(&mut results, "criterion 4: sigma_ks expansion within tail bound (k=1, s=2, n<=30, R=2000)", criterion_sigma());
    record(&mut results, "criterion 5: duality round trip exact on 50 random families", criterion_round_trip());
    record(&mut results, "criterion 6: additive omega coefficients and expansion", criterion_additive());
    record(&mut results, "criterion 7: property suite / selftest", criterion_selftest());

    let failures: Vec<&Criterion> = results.iter().filter(|c| c.failure.is_some()).collect();
    assert!(
        failures.is_empty(),
        "{} criterion(s) failed: {:?}",
        failures.len(),
        failures.iter().map(|c| c.label).collect::<Vec<_>>()
    );
}

fn criterion_identity() -> Option<String> {
    for s in 1..=3u32 {
        for n in 0..=300u64 {
            let report = crsum::cr_identity_check(60, n, s).unwrap();
            if let Some(v) = report.violations.first() {
                return Some(format!(
                    "q={} n={n} s={s}: {} != {}",
                    v.q, v.lhs, v.rhs
                ));
            }
        }
    }
    None
}

fn criterion_oracle() -> Option<String> {
    let tol = 1e-6;
    for s in 1..=3u32 {
        for r in 1..=24u64 {
            let oracle = CrOracle::new(r, s).unwrap();
            for n in 0..=100i64 {
                let exact = crsum::cr_sum(&CRQuery { r, s, n }).unwrap();
                let e = match oracle.eval(n, tol) {
                    Ok(e) => e,
                    Err(err) => return Some(err.to_string()),
                };
                let exact_f = exact.to_f64().unwrap();
                if (e.real - exact_f).abs() >= tol || e.imag.abs() >= tol {
                    return Some(format!(
                        "r={r} s={s} n={n}: oracle ({}, {}) vs exact {exact}",
                        e.real, e.imag
                    ));
                }
            }
        }
    }
    None
}

fn criterion_tau() -> Option<String> {
    let terms = 5000u64;
    let fam = CoefficientFamily::TauS { s: 2 };
    let zeta2 = arith::zeta(2).unwrap().value;
    for n in 1..=50u64 {
        let r = expansion::eval_expansion(&fam, n, terms).unwrap();
        let target = arith::tau_s(n, 2).unwrap() as f64;
        let diff = (r.value - target).abs();
        let stated_bound = zeta2
            * crsum::cr_bound(n, 2).unwrap().to_f64().unwrap()
            / (terms as f64 - 1.0);
        if diff > r.tail_bound || diff > stated_bound {
            return Some(format!(
                "n={n}: |{} - {target}| = {diff} vs tail {} / stated {stated_bound}",
                r.value, r.tail_bound
            ));
        }
        if diff >= 0.05 {
            return Some(format!("n={n}: empirical discrepancy {diff} >= 0.05"));
        }
    }
    None
}

fn criterion_sigma() -> Option<String> {
    let fam = CoefficientFamily::SigmaKS { k: 1, s: 2 };
    for n in 1..=30u64 {
        let r = expansion::eval_expansion(&fam, n, 2000).unwrap();
        // target σ_2(n)/n^2
        let target = to_f64(&BigRational::new(
            arith::sigma_k(n, 2).unwrap(),
            BigInt::from(n) * BigInt::from(n),
        ));
        let diff = (r.value - target).abs();
        if diff > r.tail_bound {
            return Some(format!(
                "n={n}: |{} - {target}| = {diff} > tail {}",
                r.value, r.tail_bound
            ));
        }
        if n == 1 && diff >= 1e-6 {
            return Some(format!("n=1 should reproduce 1 to 1e-6, got {}", r.value));
        }
    }
    None
}

fn criterion_round_trip() -> Option<String> {
    let s = 2u32;
    let mut state = 0x243f6a8885a308d3u64;
    let mut next = move || {
        state = state
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        state >> 33
    };
    for family_index in 0..50 {
        let mut table = BTreeMap::new();
        for r in 1..=20u64 {
            let num = (next() % 201) as i64 - 100;
            let den = (next() % 100) as i64 + 1;
            table.insert(r, BigRational::new(BigInt::from(num), BigInt::from(den)));
        }
        let fam = CoefficientFamily::custom(s, table.clone()).unwrap();
        for n in 1..=20u64 {
            let recovered = expansion::ghat_from_gamma(
                |a| expansion::gamma_from_ghat(&fam, a, 20).unwrap().value,
                n,
                400,
                s,
            )
            .unwrap();
            let expected = table.get(&n).cloned().unwrap_or_else(BigRational::zero);
            if recovered != expected {
                return Some(format!(
                    "family {family_index}, n={n}: {recovered} != {expected}"
                ));
            }
        }
        let report = expansion::verify_equivalence(&fam, 20, 25, 25).unwrap();
        if !report.exact_everywhere {
            return Some(format!(
                "family {family_index}: equivalence not exact (max disc {})",
                report.max_discrepancy
            ));
        }
    }
    None
}

fn criterion_additive() -> Option<String> {
    let spec = AdditiveFunctionSpec::omega(997, 30);
    let fam = expansion::additive_coefficients(&spec, 2).unwrap();

    // ĝ(p) = p^(-2) exact; ĝ(p^α) = 0 exact for α >= 2, p <= 97
    for p in arith::sieve_primes(97) {
        let got = fam.coefficient(p).unwrap();
        let want = BigRational::new(BigInt::one(), BigInt::from(p).pow(2));
        if got != want {
            return Some(format!("ghat({p}) = {got}, expected {want}"));
        }
        for alpha in 2..=6u32 {
            let key = match p.checked_pow(alpha) {
                Some(k) => k,
                None => break,
            };
            if !fam.coefficient(key).unwrap().is_zero() {
                return Some(format!("ghat({p}^{alpha}) != 0"));
            }
        }
    }

    // truncated expansion within 0.1 of ω(a), improving from p_max 97 to 997
    let small = expansion::additive_coefficients(
        &AdditiveFunctionSpec::omega(97, 30),
        2,
    )
    .unwrap();
    for a in [2u64, 6, 12, 30, 64] {
        let target = arith::omega(a).unwrap() as f64;
        let coarse = expansion::eval_expansion(&small, a, 5000).unwrap();
        let fine = expansion::eval_expansion(&fam, a, 5000).unwrap();
        let coarse_diff = (coarse.value - target).abs();
        let fine_diff = (fine.value - target).abs();
        if fine_diff >= 0.1 {
            return Some(format!(
                "a={a}: expansion {} vs omega {target} (diff {fine_diff})",
                fine.value
            ));
        }
        if fine_diff > coarse_diff {
            return Some(format!(
                "a={a}: discrepancy grew from p_max 97 ({coarse_diff}) to 997 ({fine_diff})"
            ));
        }
    }

    // γ(p^α) = ω(p^α) - ω(p^(α-1)) within the reported truncation error
    let tol = match &fam {
        CoefficientFamily::Additive(f) => f.truncation_error + 1e-12,
        _ => unreachable!(),
    };
    for p in [2u64, 3, 5, 7, 11] {
        for alpha in 1..=4u32 {
            let g = expansion::gamma_from_ghat(&fam, p.pow(alpha), 2000).unwrap();
            let expect = if alpha == 1 { 1.0 } else { 0.0 };
            if (to_f64(&g.value) - expect).abs() > tol {
                return Some(format!(
                    "gamma({p}^{alpha}) = {} vs {expect} (tol {tol})",
                    to_f64(&g.value)
                ));
            }
        }
    }
    None
}

fn criterion_selftest() -> Option<String> {
    let results = selftest::run(selftest::SelftestConfig { quick: false }).unwrap();
    for r in &results {
        println!("     selftest {}: {}", r.name, if r.passed { "ok" } else { "FAILED" });
    }
    results
        .iter()
        .find(|r| !r.passed)
        .map(|r| format!("{}: {}", r.name, r.detail))
}
