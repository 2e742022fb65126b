//! Exact integer arithmetic functions: factorization, Möbius, divisors,
//! the generalized GCD, divisor-power sums, Jordan totient, Klee's
//! function, and ζ(s) with a certified error bound.
//!
//! Every multiplicative function here is computed from the prime
//! factorization rather than by scanning divisors; the scanning variants
//! only appear in tests as independent oracles.

use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::{Error, Result};

const SIEVE_LIMIT: u64 = 1_000_000;

/// Canonical prime-power decomposition of a positive integer.
///
/// Primes are strictly increasing and exponents are at least 1; the
/// factorization of 1 is the empty list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Factorization {
    pairs: Vec<(u64, u32)>,
}

impl Factorization {
    /// (prime, exponent) pairs with primes strictly increasing.
    pub fn pairs(&self) -> &[(u64, u32)] {
        &self.pairs
    }

    /// Multiplies the factorization back out.
    pub fn value(&self) -> u64 {
        self.pairs
            .iter()
            .fold(1u64, |acc, &(p, e)| acc * p.pow(e))
    }

    pub fn distinct_primes(&self) -> usize {
        self.pairs.len()
    }
}

fn primes() -> &'static [u64] {
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| sieve_primes(SIEVE_LIMIT))
}

/// All primes up to and including `limit`, by sieve of Eratosthenes.
pub fn sieve_primes(limit: u64) -> Vec<u64> {
    let limit = limit as usize;
    let mut composite = vec![false; limit + 1];
    let mut out = Vec::new();
    for p in 2..=limit {
        if !composite[p] {
            out.push(p as u64);
            let mut m = p * p;
            while m <= limit {
                composite[m] = true;
                m += p;
            }
        }
    }
    out
}

/// Möbius values μ(1..=limit) by sieve; index 0 is unused.
pub fn mobius_sieve(limit: u64) -> Vec<i8> {
    let limit = limit as usize;
    let mut mu = vec![1i8; limit + 1];
    let mut least = vec![0u32; limit + 1];
    let mut primes = Vec::new();
    // linear sieve on least prime factors
    for i in 2..=limit {
        if least[i] == 0 {
            least[i] = i as u32;
            primes.push(i);
            mu[i] = -1;
        }
        for &p in &primes {
            let ip = i * p;
            if p > least[i] as usize || ip > limit {
                break;
            }
            least[ip] = p as u32;
            mu[ip] = if p == least[i] as usize { 0 } else { -mu[i] };
        }
    }
    if limit >= 1 {
        mu[1] = 1;
    }
    mu
}

fn require_positive(name: &'static str, value: i64) -> Result<()> {
    if value <= 0 {
        return Err(Error::nonpositive(name, value));
    }
    Ok(())
}

/// Factors `n >= 1` by trial division over a precomputed prime sieve.
pub fn factor(n: u64) -> Result<Factorization> {
    require_positive("n", n as i64)?;
    let mut rest = n;
    let mut pairs = Vec::new();
    for &p in primes() {
        if p * p > rest {
            break;
        }
        if rest % p == 0 {
            let mut e = 0u32;
            while rest % p == 0 {
                rest /= p;
                e += 1;
            }
            pairs.push((p, e));
        }
    }
    if rest > 1 {
        if rest > SIEVE_LIMIT * SIEVE_LIMIT {
            return Err(Error::Overflow {
                what: "factor: cofactor exceeds the sieve's reach",
            });
        }
        // cofactor has no prime factor <= sqrt(cofactor), hence prime
        pairs.push((rest, 1));
    }
    Ok(Factorization { pairs })
}

/// μ(n): 0 when n is not squarefree, otherwise (-1)^(number of primes).
pub fn mobius(n: u64) -> Result<i32> {
    let f = factor(n)?;
    if f.pairs().iter().any(|&(_, e)| e > 1) {
        return Ok(0);
    }
    Ok(if f.pairs().len() % 2 == 0 { 1 } else { -1 })
}

/// All positive divisors of n, ascending.
pub fn divisors(n: u64) -> Result<Vec<u64>> {
    let f = factor(n)?;
    let mut out = vec![1u64];
    for &(p, e) in f.pairs() {
        let prev = out.clone();
        let mut pe = 1u64;
        for _ in 0..e {
            pe *= p;
            out.extend(prev.iter().map(|d| d * pe));
        }
    }
    out.sort_unstable();
    Ok(out)
}

/// The generalized GCD (a, b)_s: the largest d^s dividing both a and b.
pub fn gcd_s(a: u64, b: u64, s: u32) -> Result<u64> {
    require_positive("a", a as i64)?;
    require_positive("b", b as i64)?;
    require_positive("s", s as i64)?;
    let g = num_integer::gcd(a, b);
    if s == 1 {
        return Ok(g);
    }
    // d^s | a and d^s | b  <=>  d^s | gcd(a, b)
    let mut result = 1u64;
    for &(p, e) in factor(g)?.pairs() {
        result *= p.pow((e / s) * s);
    }
    Ok(result)
}

/// True iff no prime s-th power divides m (defined for s > 1).
pub fn is_s_power_free(m: u64, s: u32) -> Result<bool> {
    require_positive("m", m as i64)?;
    if s <= 1 {
        return Err(Error::InvalidArgument {
            name: "s",
            value: s as i64,
            reason: "s-power-freeness is defined for s > 1",
        });
    }
    Ok(factor(m)?.pairs().iter().all(|&(_, e)| e < s))
}

/// τ_s(n): the number of s-th powers dividing n.
pub fn tau_s(n: u64, s: u32) -> Result<u64> {
    require_positive("s", s as i64)?;
    let f = factor(n)?;
    Ok(f.pairs()
        .iter()
        .map(|&(_, e)| (e / s + 1) as u64)
        .product())
}

/// σ_k(n) = Σ_{d|n} d^k, exact.
pub fn sigma_k(n: u64, k: u32) -> Result<BigInt> {
    sigma_k_s(n, k, 1)
}

/// σ_{k,s}(n) = Σ_{d^s|n} (d^s)^k, exact.
pub fn sigma_k_s(n: u64, k: u32, s: u32) -> Result<BigInt> {
    require_positive("s", s as i64)?;
    let f = factor(n)?;
    let mut result = BigInt::one();
    for &(p, e) in f.pairs() {
        // Σ_{j=0}^{e/s} p^(s k j)
        let step = BigInt::from(p).pow(s * k);
        let mut sum = BigInt::one();
        let mut term = BigInt::one();
        for _ in 0..(e / s) {
            term *= &step;
            sum += &term;
        }
        result *= sum;
    }
    Ok(result)
}

/// ξ_q^s(n): q^s when q^s | n, else 0. Every integer divides 0, so
/// ξ_q^s(0) = q^s.
pub fn xi(q: u64, n: u64, s: u32) -> Result<BigInt> {
    require_positive("q", q as i64)?;
    require_positive("s", s as i64)?;
    let qs = BigInt::from(q).pow(s);
    if n == 0 || (BigInt::from(n) % &qs).is_zero() {
        Ok(qs)
    } else {
        Ok(BigInt::zero())
    }
}

/// Jordan totient J_s(n) = n^s Π_{p|n} (1 - p^{-s}), exact.
///
/// Computed literally in rational arithmetic and checked integral.
pub fn jordan_totient(n: u64, s: u32) -> Result<BigInt> {
    require_positive("s", s as i64)?;
    let f = factor(n)?;
    let mut value = BigRational::from_integer(BigInt::from(n).pow(s));
    for &(p, _) in f.pairs() {
        let ps = BigInt::from(p).pow(s);
        value *= BigRational::new(&ps - 1, ps);
    }
    rational_to_integer(value, "Jordan totient")
}

/// Klee's function Φ_s(n) = n Π_{p^s|n} (1 - p^{-s}), exact.
///
/// The product runs over primes whose s-th power divides n.
pub fn klee(n: u64, s: u32) -> Result<BigInt> {
    require_positive("s", s as i64)?;
    let f = factor(n)?;
    let mut value = BigRational::from_integer(BigInt::from(n));
    for &(p, e) in f.pairs() {
        if e >= s {
            let ps = BigInt::from(p).pow(s);
            value *= BigRational::new(&ps - 1, ps);
        }
    }
    rational_to_integer(value, "Klee's function")
}

fn rational_to_integer(value: BigRational, what: &'static str) -> Result<BigInt> {
    if !value.is_integer() {
        return Err(Error::NotIntegral { what });
    }
    Ok(value.to_integer())
}

/// ω(n): the number of distinct prime divisors.
pub fn omega(n: u64) -> Result<u32> {
    Ok(factor(n)?.distinct_primes() as u32)
}

/// A ζ(s) approximation together with a certified error bound.
#[derive(Debug, Clone, Copy)]
pub struct ZetaValue {
    pub value: f64,
    pub error_bound: f64,
}

/// ζ(s) for integer s >= 2 by partial sum plus Euler-Maclaurin tail
/// correction. The returned bound certifies |value - ζ(s)| <= error_bound,
/// with error_bound <= 1e-12.
pub fn zeta(s: u32) -> Result<ZetaValue> {
    if s < 2 {
        return Err(Error::InvalidArgument {
            name: "s",
            value: s as i64,
            reason: "zeta requires s >= 2 (pole at s = 1)",
        });
    }
    let n = 1000u64;
    let sf = s as f64;
    let nf = n as f64;
    // small terms first, compensated
    let mut sum = 0.0f64;
    let mut comp = 0.0f64;
    for m in (1..n).rev() {
        let term = (m as f64).powi(-(s as i32));
        let y = term - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    // tail Σ_{m >= N} m^{-s} = N^(1-s)/(s-1) + N^(-s)/2 + s N^(-s-1)/12 + R
    let tail = nf.powf(1.0 - sf) / (sf - 1.0) + 0.5 * nf.powf(-sf)
        + sf * nf.powf(-sf - 1.0) / 12.0;
    let value = sum + tail;
    // |R| <= s(s+1)(s+2)/720 * N^(-s-3); add slack for f64 rounding
    let remainder = sf * (sf + 1.0) * (sf + 2.0) / 720.0 * nf.powf(-sf - 3.0);
    let error_bound = remainder + 1e-13;
    Ok(ZetaValue { value, error_bound })
}
