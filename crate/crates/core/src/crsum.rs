//! The Cohen-Ramanujan sum c_r^s(n).
//!
//! The exact evaluator uses the Möbius form
//! c_r^s(n) = Σ_{d|r, d^s|n} μ(r/d) d^s; the oracle evaluates the
//! defining exponential sum Σ e^(2πinh/r^s) over 1 <= h <= r^s with
//! (h, r^s)_s = 1 and checks that it lands on the same integer.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::arith;
use crate::{Error, Result};

/// Largest r^s the exponential-sum oracle will evaluate.
pub const ORACLE_MODULUS_LIMIT: u128 = 10_000_000;

/// One Cohen-Ramanujan sum evaluation: the triple (r, s, n).
///
/// The value depends on n only through n mod r^s, so any sign of n is
/// accepted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CRQuery {
    pub r: u64,
    pub s: u32,
    pub n: i64,
}

impl CRQuery {
    pub fn new(r: u64, s: u32, n: i64) -> Result<Self> {
        if r == 0 {
            return Err(Error::nonpositive("r", 0));
        }
        if s == 0 {
            return Err(Error::nonpositive("s", 0));
        }
        Ok(CRQuery { r, s, n })
    }

    /// n reduced into [0, r^s).
    fn reduced_argument(&self) -> BigInt {
        let modulus = BigInt::from(self.r).pow(self.s);
        let n = BigInt::from(self.n) % &modulus;
        if n.is_negative() {
            n + modulus
        } else {
            n
        }
    }
}

/// Exact c_r^s(n) via the Möbius form. n = 0 (mod r^s) uses the
/// convention that every d^s divides 0, which matches the exponential
/// sum, where every retained term is 1.
pub fn cr_sum(q: &CRQuery) -> Result<BigInt> {
    CRQuery::new(q.r, q.s, q.n)?;
    let n = q.reduced_argument();
    let mut total = BigInt::zero();
    for d in arith::divisors(q.r)? {
        let ds = BigInt::from(d).pow(q.s);
        if n.is_zero() || (&n % &ds).is_zero() {
            total += BigInt::from(arith::mobius(q.r / d)?) * ds;
        }
    }
    Ok(total)
}

/// c_r^s(n) for every r in 1..=r_max at once, for n >= 0.
///
/// Sieve formulation: for each d with d^s | n (every d when n = 0),
/// scatter μ(q) d^s onto the multiples r = dq. One μ sieve, no per-r
/// factorization; this is the expansion engine's hot path.
pub fn cr_sum_batch(n: u64, s: u32, r_max: u64) -> Result<Vec<BigInt>> {
    if s == 0 {
        return Err(Error::nonpositive("s", 0));
    }
    if r_max == 0 {
        return Err(Error::nonpositive("r_max", 0));
    }
    let mu = arith::mobius_sieve(r_max);
    let mut table = vec![BigInt::zero(); r_max as usize + 1];
    for d in 1..=r_max {
        if n != 0 {
            match checked_pow(d, s) {
                Some(ds) if ds <= n as u128 && (n as u128) % ds == 0 => {}
                _ => continue,
            }
        }
        let ds_big = BigInt::from(d).pow(s);
        let mut r = d;
        let mut q = 1u64;
        while r <= r_max {
            let m = mu[q as usize];
            if m != 0 {
                table[r as usize] += BigInt::from(m) * &ds_big;
            }
            q += 1;
            r += d;
        }
    }
    table.remove(0);
    Ok(table)
}

fn checked_pow(base: u64, exp: u32) -> Option<u128> {
    let mut v: u128 = 1;
    for _ in 0..exp {
        v = v.checked_mul(base as u128)?;
    }
    Some(v)
}

/// Result of one exponential-sum evaluation.
#[derive(Debug, Clone, Copy)]
pub struct OracleEval {
    /// The accumulated sum rounded to the nearest integer.
    pub value: i64,
    pub real: f64,
    pub imag: f64,
}

/// Direct evaluator for the defining exponential sum, reusable across
/// many arguments n for fixed (r, s).
pub struct CrOracle {
    r: u64,
    s: u32,
    modulus: u64,
    /// residues h with (h, r^s)_s = 1
    coprime: Vec<u64>,
}

impl CrOracle {
    pub fn new(r: u64, s: u32) -> Result<Self> {
        CRQuery::new(r, s, 0)?;
        let modulus = match checked_pow(r, s) {
            Some(m) if m <= ORACLE_MODULUS_LIMIT => m as u64,
            Some(m) => return Err(Error::OracleRange { modulus: m, limit: ORACLE_MODULUS_LIMIT }),
            None => {
                return Err(Error::OracleRange {
                    modulus: u128::MAX,
                    limit: ORACLE_MODULUS_LIMIT,
                })
            }
        };
        let coprime = (1..=modulus)
            .filter(|&h| arith::gcd_s(h, modulus, s).unwrap() == 1)
            .collect();
        Ok(CrOracle { r, s, modulus, coprime })
    }

    /// Accumulates Σ e^(2πi n h / r^s) with compensated summation and
    /// checks the result is real and integral within `tol`.
    pub fn eval(&self, n: i64, tol: f64) -> Result<OracleEval> {
        let m = self.modulus;
        let n_red = (n.rem_euclid(m as i64)) as u64;
        let (mut re, mut im) = (Kahan::new(), Kahan::new());
        for &h in &self.coprime {
            let j = ((n_red as u128 * h as u128) % m as u128) as u64;
            let angle = 2.0 * std::f64::consts::PI * (j as f64) / (m as f64);
            re.add(angle.cos());
            im.add(angle.sin());
        }
        let (real, imag) = (re.total(), im.total());
        let value = real.round();
        if imag.abs() >= tol || (real - value).abs() >= tol {
            return Err(Error::OracleInconsistent {
                r: self.r,
                s: self.s,
                n,
                real,
                imag,
                tol,
            });
        }
        Ok(OracleEval {
            value: value as i64,
            real,
            imag,
        })
    }
}

/// One-shot oracle evaluation of a query.
pub fn cr_sum_oracle(q: &CRQuery, tol: f64) -> Result<OracleEval> {
    CrOracle::new(q.r, q.s)?.eval(q.n, tol)
}

/// σ_{1,s}(n), an upper bound for |c_r^s(n)| uniform in r.
pub fn cr_bound(n: u64, s: u32) -> Result<BigInt> {
    arith::sigma_k_s(n, 1, s)
}

/// One failed instance of the summatory identity.
#[derive(Debug, Clone)]
pub struct IdentityViolation {
    pub q: u64,
    pub lhs: BigInt,
    pub rhs: BigInt,
}

/// Result of checking Σ_{r|q} c_r^s(n) = ξ_q^s(n) for q <= q_max.
#[derive(Debug, Clone)]
pub struct IdentityReport {
    pub q_max: u64,
    pub n: u64,
    pub s: u32,
    pub violations: Vec<IdentityViolation>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the summatory identity Σ_{r|q} c_r^s(n) = ξ_q^s(n) exactly for
/// every q <= q_max.
pub fn cr_identity_check(q_max: u64, n: u64, s: u32) -> Result<IdentityReport> {
    if q_max == 0 {
        return Err(Error::nonpositive("q_max", 0));
    }
    let table = cr_sum_batch(n, s, q_max)?;
    let mut violations = Vec::new();
    for q in 1..=q_max {
        let lhs: BigInt = arith::divisors(q)?
            .iter()
            .map(|&r| table[r as usize - 1].clone())
            .sum();
        let rhs = arith::xi(q, n, s)?;
        if lhs != rhs {
            violations.push(IdentityViolation { q, lhs, rhs });
        }
    }
    Ok(IdentityReport {
        q_max,
        n,
        s,
        violations,
    })
}

struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    fn new() -> Self {
        Kahan { sum: 0.0, comp: 0.0 }
    }
    fn add(&mut self, x: f64) {
        let y = x - self.comp;
        let t = self.sum + y;
        self.comp = (t - self.sum) - y;
        self.sum = t;
    }
    fn total(&self) -> f64 {
        self.sum
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn cr(r: u64, s: u32, n: i64) -> BigInt {
        cr_sum(&CRQuery { r, s, n }).unwrap()
    }

    #[test]
    fn trivial_values() {
        for s in 1..=3u32 {
            for n in -5..=5i64 {
                assert_eq!(cr(1, s, n), BigInt::one());
            }
        }
        assert_eq!(cr(2, 2, 4), BigInt::from(3));
    }

    #[test]
    fn argument_one_gives_mobius() {
        for r in 1..=30u64 {
            for s in 1..=3u32 {
                assert_eq!(cr(r, s, 1), BigInt::from(arith::mobius(r).unwrap()));
            }
        }
    }

    #[test]
    fn rejects_bad_query() {
        assert!(cr_sum(&CRQuery { r: 0, s: 1, n: 1 }).is_err());
        assert!(cr_sum(&CRQuery { r: 1, s: 0, n: 1 }).is_err());
    }

    #[test]
    fn classical_ramanujan_sum_at_s_one() {
        // oracle: Eq. (1)-style exponential sum over m coprime to r
        for r in 1..=30u64 {
            let oracle = CrOracle::new(r, 1).unwrap();
            for n in 0..=30i64 {
                let e = oracle.eval(n, 1e-9).unwrap();
                assert_eq!(BigInt::from(e.value), cr(r, 1, n), "r={r} n={n}");
            }
        }
    }

    #[test]
    fn oracle_examples() {
        let e = cr_sum_oracle(&CRQuery { r: 2, s: 2, n: 4 }, 1e-9).unwrap();
        assert_eq!(e.value, 3);
        let e = cr_sum_oracle(&CRQuery { r: 1, s: 1, n: 7 }, 1e-9).unwrap();
        assert_eq!(e.value, 1);
        let e = cr_sum_oracle(&CRQuery { r: 6, s: 1, n: 3 }, 1e-9).unwrap();
        assert_eq!(BigInt::from(e.value), cr(6, 1, 3));
    }

    #[test]
    fn oracle_range_guard() {
        assert!(matches!(
            CrOracle::new(100_000, 2),
            Err(Error::OracleRange { .. })
        ));
    }

    #[test]
    fn periodicity() {
        for r in 1..=20u64 {
            for s in 1..=3u32 {
                let period = (r as i64).pow(s);
                for n in 0..=50i64 {
                    assert_eq!(cr(r, s, n), cr(r, s, n + period));
                    assert_eq!(cr(r, s, n), cr(r, s, n - period));
                }
            }
        }
    }

    #[test]
    fn negative_argument_reduces() {
        assert_eq!(cr(6, 2, -1), cr(6, 2, 35));
    }

    #[test]
    fn multiplicative_in_r_for_coprime_parts() {
        for r1 in 1..=30u64 {
            for r2 in 1..=30u64 {
                if num_integer::gcd(r1, r2) != 1 {
                    continue;
                }
                for s in 1..=3u32 {
                    for n in (0..=100i64).step_by(7) {
                        assert_eq!(
                            cr(r1 * r2, s, n),
                            cr(r1, s, n) * cr(r2, s, n),
                            "r1={r1} r2={r2} s={s} n={n}"
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn zero_argument_is_jordan_totient() {
        for r in 1..=50u64 {
            for s in 1..=3u32 {
                assert_eq!(cr(r, s, 0), arith::jordan_totient(r, s).unwrap());
            }
        }
    }

    #[test]
    fn bounded_by_sigma() {
        for s in 1..=3u32 {
            for n in 1..=100u64 {
                let bound = cr_bound(n, s).unwrap();
                for r in 1..=200u64 {
                    let v = cr(r, s, n as i64);
                    assert!(v.abs() <= bound, "r={r} s={s} n={n}: |{v}| > {bound}");
                }
            }
        }
        assert_eq!(cr_bound(4, 2).unwrap(), BigInt::from(5));
        assert_eq!(cr_bound(1, 3).unwrap(), BigInt::one());
    }

    #[test]
    fn batch_matches_pointwise() {
        for s in 1..=3u32 {
            for n in [0u64, 1, 2, 12, 36, 64, 97] {
                let table = cr_sum_batch(n, s, 60).unwrap();
                for r in 1..=60u64 {
                    assert_eq!(table[r as usize - 1], cr(r, s, n as i64), "r={r} s={s} n={n}");
                }
            }
        }
    }

    #[test]
    fn identity_check_examples() {
        // c_1^2(8)+c_2^2(8)+c_4^2(8) = ξ_4^2(8) = 0
        let total = cr(1, 2, 8) + cr(2, 2, 8) + cr(4, 2, 8);
        assert_eq!(total, BigInt::zero());
        assert_eq!(arith::xi(4, 8, 2).unwrap(), BigInt::zero());

        let report = cr_identity_check(30, 8, 2).unwrap();
        assert!(report.passed());
        let report = cr_identity_check(1, 17, 3).unwrap();
        assert!(report.passed());
    }
}
