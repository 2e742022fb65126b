//! Truncated Cohen-Ramanujan expansions g(a) = Σ_r ĝ(r) c_r^s(·) with
//! rigorous tail bounds, the duality between the coefficient sequence ĝ
//! and γ = μ∗g, and coefficient construction for additive functions.
//!
//! Series cores are accumulated in exact rational arithmetic; the
//! transcendental ζ multiplier is applied exactly once at the end. This
//! keeps the duality round trip exact on finitely supported families and
//! avoids float cancellation across thousands of signed terms.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::arith;
use crate::crsum::{self, CRQuery};
use crate::rational::{sum_pairwise, to_f64};
use crate::{Error, Result};

/// Default truncation of the expansion Σ_{r<=R} ĝ(r) c_r^s(·).
pub const DEFAULT_EXPANSION_TERMS: u64 = 5000;
/// Default truncation of the μ-series in γ(a) = a^s Σ_{m<=M} ĝ(am) μ(m).
pub const DEFAULT_MU_TERMS: u64 = 5000;
/// Default prime truncation for additive-function coefficients.
pub const DEFAULT_PRIME_LIMIT: u64 = 997;
/// Default prime-power exponent truncation for additive coefficients.
pub const DEFAULT_EXPONENT_LIMIT: u32 = 30;

/// Whether the expansion is evaluated at n = a or at n = a^s.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArgumentMode {
    Direct,
    Power,
}

/// A coefficient sequence ĝ(r) with its decay metadata.
#[derive(Debug, Clone)]
pub enum CoefficientFamily {
    /// ĝ(r) = 1/r^s with external multiplier ζ(s); expands τ_s(n)
    /// at the direct argument n. Requires s >= 2.
    TauS { s: u32 },
    /// ĝ(r) = 1/r^((k+1)s) with external multiplier ζ((k+1)s); expands
    /// σ_ks(a)/a^(ks) at the power argument a^s. Requires k >= 1.
    SigmaKS { k: u32, s: u32 },
    /// Coefficients of an additive function, supported on {1} and prime
    /// powers, built by [`additive_coefficients`].
    Additive(AdditiveFamily),
    /// A finitely supported coefficient table; tail is exactly zero
    /// beyond the support.
    Custom {
        s: u32,
        table: BTreeMap<u64, BigRational>,
    },
}

/// Coefficients ĝ for an additive function, truncated at `p_max`/`v_max`.
#[derive(Debug, Clone)]
pub struct AdditiveFamily {
    pub s: u32,
    pub name: String,
    /// ĝ(p^α) keyed by p^α; entries may be exactly zero.
    table: BTreeMap<u64, BigRational>,
    /// ĝ(1) = Σ_{p <= p_max} ĝ(p)
    ghat_one: BigRational,
    /// Estimated error from truncating the inner v-series and the prime
    /// sum; what the constructor can see, not a certified bound.
    pub truncation_error: f64,
    pub p_max: u64,
    pub v_max: u32,
}

impl AdditiveFamily {
    pub fn coefficient(&self, r: u64) -> BigRational {
        if r == 1 {
            self.ghat_one.clone()
        } else {
            self.table.get(&r).cloned().unwrap_or_else(BigRational::zero)
        }
    }
}

impl CoefficientFamily {
    pub fn custom(s: u32, table: BTreeMap<u64, BigRational>) -> Result<Self> {
        if s == 0 {
            return Err(Error::nonpositive("s", 0));
        }
        if table.contains_key(&0) {
            return Err(Error::nonpositive("r", 0));
        }
        Ok(CoefficientFamily::Custom { s, table })
    }

    pub fn s(&self) -> u32 {
        match self {
            CoefficientFamily::TauS { s }
            | CoefficientFamily::SigmaKS { s, .. }
            | CoefficientFamily::Custom { s, .. } => *s,
            CoefficientFamily::Additive(f) => f.s,
        }
    }

    pub fn argument_mode(&self) -> ArgumentMode {
        match self {
            CoefficientFamily::TauS { .. } => ArgumentMode::Direct,
            _ => ArgumentMode::Power,
        }
    }

    /// ĝ(r), exact.
    pub fn coefficient(&self, r: u64) -> Result<BigRational> {
        if r == 0 {
            return Err(Error::nonpositive("r", 0));
        }
        Ok(match self {
            CoefficientFamily::TauS { s } => {
                BigRational::new(BigInt::one(), BigInt::from(r).pow(*s))
            }
            CoefficientFamily::SigmaKS { k, s } => {
                BigRational::new(BigInt::one(), BigInt::from(r).pow((k + 1) * s))
            }
            CoefficientFamily::Additive(f) => f.coefficient(r),
            CoefficientFamily::Custom { table, .. } => {
                table.get(&r).cloned().unwrap_or_else(BigRational::zero)
            }
        })
    }

    /// The ζ factor applied outside the rational core (1 when none).
    pub fn multiplier(&self) -> Result<f64> {
        Ok(match self {
            CoefficientFamily::TauS { s } => arith::zeta(*s)?.value,
            CoefficientFamily::SigmaKS { k, s } => arith::zeta((k + 1) * s)?.value,
            _ => 1.0,
        })
    }

    /// (β, C) with |ĝ(r)| <= C r^(-β), or None for finite support.
    pub fn decay(&self) -> Option<(f64, f64)> {
        match self {
            CoefficientFamily::TauS { s } => Some((*s as f64, 1.0)),
            CoefficientFamily::SigmaKS { k, s } => Some((((k + 1) * s) as f64, 1.0)),
            _ => None,
        }
    }

    /// Largest r with a (possibly zero) stored coefficient, for finitely
    /// supported families.
    pub fn support_bound(&self) -> Option<u64> {
        match self {
            CoefficientFamily::Additive(f) => {
                Some(f.table.keys().next_back().copied().unwrap_or(1).max(1))
            }
            CoefficientFamily::Custom { table, .. } => {
                Some(table.keys().next_back().copied().unwrap_or(1).max(1))
            }
            _ => None,
        }
    }

    /// Support entries (r, ĝ(r)) with r <= limit, including r = 1 for
    /// additive families. Only for finitely supported families.
    fn support_iter(&self, limit: u64) -> Option<Vec<(u64, BigRational)>> {
        match self {
            CoefficientFamily::Additive(f) => {
                let mut v = vec![(1u64, f.ghat_one.clone())];
                v.extend(
                    f.table
                        .range(..=limit)
                        .map(|(&r, c)| (r, c.clone()))
                        .filter(|(r, _)| *r > 1),
                );
                Some(v)
            }
            CoefficientFamily::Custom { table, .. } => Some(
                table
                    .range(..=limit)
                    .map(|(&r, c)| (r, c.clone()))
                    .collect(),
            ),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            CoefficientFamily::TauS { s } => {
                if *s < 2 {
                    return Err(Error::InvalidArgument {
                        name: "s",
                        value: *s as i64,
                        reason: "the tau_s expansion requires s > 1",
                    });
                }
            }
            CoefficientFamily::SigmaKS { k, s } => {
                if *k < 1 {
                    return Err(Error::nonpositive("k", *k as i64));
                }
                if *s < 1 {
                    return Err(Error::nonpositive("s", *s as i64));
                }
            }
            CoefficientFamily::Additive(f) => {
                if f.s < 1 {
                    return Err(Error::nonpositive("s", f.s as i64));
                }
            }
            CoefficientFamily::Custom { s, .. } => {
                if *s < 1 {
                    return Err(Error::nonpositive("s", *s as i64));
                }
            }
        }
        Ok(())
    }
}

/// Value of a truncated expansion with its certificate.
#[derive(Debug, Clone)]
pub struct PartialSumResult {
    /// multiplier × exact_core, as f64.
    pub value: f64,
    /// Σ_{r<=R} ĝ(r) c_r^s(arg) before the ζ multiplier, exact.
    pub exact_core: BigRational,
    pub terms_used: u64,
    /// Upper bound on the omitted tail (in `value` units, multiplier
    /// included). Exactly 0 once R covers a finite support.
    pub tail_bound: f64,
    pub multiplier: f64,
}

fn checked_pow_u64(base: u64, exp: u32) -> Result<u64> {
    let mut v = 1u64;
    for _ in 0..exp {
        v = v.checked_mul(base).ok_or(Error::Overflow {
            what: "argument a^s exceeds u64",
        })?;
    }
    Ok(v)
}

/// Σ_{r<=R} ĝ(r) c_r^s(arg) exactly, plus a bound on the omitted core
/// tail (no multiplier applied).
fn expansion_core(
    fam: &CoefficientFamily,
    arg: u64,
    terms: u64,
) -> Result<(BigRational, f64)> {
    let s = fam.s();
    let core = match fam.support_iter(terms) {
        Some(support) => {
            let mut parts = Vec::with_capacity(support.len());
            for (r, c) in support {
                if c.is_zero() {
                    continue;
                }
                let cr = crsum::cr_sum(&CRQuery {
                    r,
                    s,
                    n: arg as i64,
                })?;
                parts.push(c * BigRational::from_integer(cr));
            }
            sum_pairwise(parts)
        }
        None => {
            let table = crsum::cr_sum_batch(arg, s, terms)?;
            let parts: Vec<BigRational> = (1..=terms)
                .filter(|&r| !table[r as usize - 1].is_zero())
                .map(|r| {
                    let c = fam.coefficient(r).expect("r >= 1");
                    c * BigRational::from_integer(table[r as usize - 1].clone())
                })
                .collect();
            sum_pairwise(parts)
        }
    };

    let tail = match fam.decay() {
        Some((beta, c)) => {
            // Σ_{r>R} |ĝ(r) c_r^s(arg)| <= C σ_{1,s}(arg) R^(1-β)/(β-1)
            let bound = crsum::cr_bound(arg.max(1), s)?
                .to_f64()
                .unwrap_or(f64::INFINITY);
            c * bound * (terms as f64).powf(1.0 - beta) / (beta - 1.0)
        }
        None => {
            // finite support: sum the omitted coefficients exactly
            let support = fam.support_iter(u64::MAX).expect("finite support");
            let bound = crsum::cr_bound(arg.max(1), s)?;
            let omitted: BigRational = support
                .into_iter()
                .filter(|(r, _)| *r > terms)
                .map(|(_, c)| c.abs())
                .sum();
            to_f64(&(omitted * BigRational::from_integer(bound)))
        }
    };
    Ok((core, tail))
}

/// Evaluates the truncated expansion for `fam` at a, using `terms`
/// series terms. The argument passed to c_r^s is a or a^s according to
/// the family's argument mode.
pub fn eval_expansion(
    fam: &CoefficientFamily,
    a: u64,
    terms: u64,
) -> Result<PartialSumResult> {
    fam.validate()?;
    if a == 0 {
        return Err(Error::nonpositive("a", 0));
    }
    if terms == 0 {
        return Err(Error::nonpositive("terms", 0));
    }
    let arg = match fam.argument_mode() {
        ArgumentMode::Direct => a,
        ArgumentMode::Power => checked_pow_u64(a, fam.s())?,
    };
    let (exact_core, core_tail) = expansion_core(fam, arg, terms)?;
    let multiplier = fam.multiplier()?;
    Ok(PartialSumResult {
        value: multiplier * to_f64(&exact_core),
        exact_core,
        terms_used: terms,
        tail_bound: multiplier * core_tail,
        multiplier,
    })
}

/// An exact rational plus a bound on what truncation discarded.
#[derive(Debug, Clone)]
pub struct TailedRational {
    pub value: BigRational,
    pub tail_bound: f64,
}

/// γ(a) = a^s Σ_{m<=M} ĝ(am) μ(m), exact (no ζ multiplier applied).
pub fn gamma_from_ghat(
    fam: &CoefficientFamily,
    a: u64,
    mu_terms: u64,
) -> Result<TailedRational> {
    if a == 0 {
        return Err(Error::nonpositive("a", 0));
    }
    if mu_terms == 0 {
        return Err(Error::nonpositive("mu_terms", 0));
    }
    let s = fam.s();
    let mu = arith::mobius_sieve(mu_terms);
    let mut parts = Vec::new();
    for m in 1..=mu_terms {
        let sign = mu[m as usize];
        if sign == 0 {
            continue;
        }
        let am = match a.checked_mul(m) {
            Some(v) => v,
            None => break,
        };
        if let Some(bound) = fam.support_bound() {
            if am > bound {
                continue;
            }
        }
        let c = fam.coefficient(am)?;
        if !c.is_zero() {
            parts.push(c * BigInt::from(sign));
        }
    }
    let scale = BigRational::from_integer(BigInt::from(a).pow(s));
    let value = scale * sum_pairwise(parts);
    let tail_bound = match fam.decay() {
        Some((beta, c)) => {
            // a^s Σ_{m>M} |ĝ(am)| <= a^s C a^(-β) M^(1-β)/(β-1)
            (a as f64).powi(s as i32)
                * c
                * (a as f64).powf(-beta)
                * (mu_terms as f64).powf(1.0 - beta)
                / (beta - 1.0)
        }
        None => {
            let bound = fam.support_bound().unwrap();
            if a.saturating_mul(mu_terms) >= bound {
                0.0
            } else {
                // truncated inside the support; bound the rest crudely
                let support = fam.support_iter(u64::MAX).unwrap();
                let omitted: BigRational = support
                    .into_iter()
                    .filter(|(r, _)| *r > a * mu_terms)
                    .map(|(_, c)| c.abs())
                    .sum();
                to_f64(&omitted) * (a as f64).powi(s as i32)
            }
        }
    };
    Ok(TailedRational { value, tail_bound })
}

/// (μ ∗ g)(a) = Σ_{d|a} μ(a/d) g(d).
pub fn mobius_convolve_g<F>(g: F, a: u64) -> Result<BigRational>
where
    F: Fn(u64) -> BigRational,
{
    if a == 0 {
        return Err(Error::nonpositive("a", 0));
    }
    let mut total = BigRational::zero();
    for d in arith::divisors(a)? {
        let m = arith::mobius(a / d)?;
        if m != 0 {
            total += g(d) * BigInt::from(m);
        }
    }
    Ok(total)
}

/// Recovers ĝ(n) from γ: Σ_{a <= A, n|a} γ(a)/a^s.
///
/// Exact inverse of [`gamma_from_ghat`] on finitely supported families
/// once A covers the support; on decaying families it converges to ĝ(n)
/// as A grows.
pub fn ghat_from_gamma<F>(gamma: F, n: u64, a_limit: u64, s: u32) -> Result<BigRational>
where
    F: Fn(u64) -> BigRational,
{
    if n == 0 {
        return Err(Error::nonpositive("n", 0));
    }
    if s == 0 {
        return Err(Error::nonpositive("s", 0));
    }
    if a_limit < n {
        return Err(Error::InvalidArgument {
            name: "a_limit",
            value: a_limit as i64,
            reason: "must be at least n",
        });
    }
    let mut parts = Vec::new();
    let mut a = n;
    while a <= a_limit {
        let g = gamma(a);
        if !g.is_zero() {
            parts.push(g / BigInt::from(a).pow(s));
        }
        a += n;
    }
    Ok(sum_pairwise(parts))
}

/// An additive function given by its values on prime powers, with the
/// truncation limits used when building expansion coefficients.
///
/// Additivity is the caller's contract: the full function is the sum of
/// g(p^v) over the prime powers in the factorization, and g(1) = 0.
pub struct AdditiveFunctionSpec {
    pub name: String,
    on_prime_power: Box<dyn Fn(u64, u32) -> BigRational + Send + Sync>,
    pub p_max: u64,
    pub v_max: u32,
    /// When set, g(p^v) is taken as constant beyond v_max and the inner
    /// geometric tail is completed exactly instead of merely estimated.
    pub eventually_constant: bool,
}

impl AdditiveFunctionSpec {
    pub fn new<F>(name: &str, on_prime_power: F, p_max: u64, v_max: u32) -> Self
    where
        F: Fn(u64, u32) -> BigRational + Send + Sync + 'static,
    {
        AdditiveFunctionSpec {
            name: name.to_string(),
            on_prime_power: Box::new(on_prime_power),
            p_max,
            v_max,
            eventually_constant: false,
        }
    }

    /// ω, the number of distinct prime divisors: g(p^v) = 1.
    pub fn omega(p_max: u64, v_max: u32) -> Self {
        let mut spec = Self::new("omega", |_, _| BigRational::one(), p_max, v_max);
        spec.eventually_constant = true;
        spec
    }

    /// g(p^v), with g(p^0) = 0.
    pub fn on_prime_power(&self, p: u64, v: u32) -> BigRational {
        if v == 0 {
            BigRational::zero()
        } else {
            (self.on_prime_power)(p, v)
        }
    }

    /// The additive extension: Σ g(p^v) over the factorization of n.
    pub fn value_at(&self, n: u64) -> Result<BigRational> {
        let mut total = BigRational::zero();
        for &(p, e) in arith::factor(n)?.pairs() {
            total += self.on_prime_power(p, e);
        }
        Ok(total)
    }
}

/// Builds the Cohen-Ramanujan coefficients of an additive function:
///
/// ĝ(p^α) = -g(p^(α-1))/p^(αs) + (1 - p^(-s)) Σ_{v>=α} g(p^v)/p^(vs),
/// ĝ(1) = Σ_p ĝ(p), and ĝ(n) = 0 off {1} ∪ prime powers.
///
/// Inner series are summed highest-exponent-first in exact rationals and
/// truncated at `v_max`; the prime sum is truncated at `p_max`. The
/// reported `truncation_error` estimates both truncations (geometric
/// ratio 1/p^s for the inner series).
pub fn additive_coefficients(
    spec: &AdditiveFunctionSpec,
    s: u32,
) -> Result<CoefficientFamily> {
    if s == 0 {
        return Err(Error::nonpositive("s", 0));
    }
    if spec.p_max < 2 {
        return Err(Error::InvalidArgument {
            name: "p_max",
            value: spec.p_max as i64,
            reason: "must cover at least the prime 2",
        });
    }
    if spec.v_max < 1 {
        return Err(Error::nonpositive("v_max", 0));
    }

    let mut table = BTreeMap::new();
    let mut ghat_primes = Vec::new();
    let mut truncation_error = 0.0f64;
    let mut last_prime_coeff = BigRational::zero();
    let mut last_prime = 2u64;

    for p in arith::sieve_primes(spec.p_max) {
        let ps = BigInt::from(p).pow(s);
        // t_v = g(p^v)/p^(vs), v = 1..=v_max
        let terms: Vec<BigRational> = (1..=spec.v_max)
            .map(|v| {
                spec.on_prime_power(p, v)
                    / BigRational::from_integer(BigInt::from(p).pow(v * s))
            })
            .collect();

        // sanity: terms over the sampled range must not grow
        let window = terms.len().saturating_sub(5);
        for w in terms[window..].windows(2) {
            if w[1].abs() > w[0].abs() {
                return Err(Error::NonConvergentSeries {
                    p,
                    detail: format!(
                        "|g(p^v)/p^(vs)| increases near v = {}",
                        spec.v_max
                    ),
                });
            }
        }

        // suffix sums Σ_{v>=α} t_v, accumulated highest exponent first
        let mut suffix = vec![BigRational::zero(); spec.v_max as usize + 2];
        for v in (1..=spec.v_max as usize).rev() {
            suffix[v] = &suffix[v + 1] + &terms[v - 1];
        }

        // geometric completion: assume g(p^v) = g(p^v_max) for v > v_max
        let completion = if spec.eventually_constant {
            let g_last = spec.on_prime_power(p, spec.v_max);
            // Σ_{v>v_max} p^(-vs) = 1 / (p^(v_max s) (p^s - 1))
            g_last
                / BigRational::from_integer(
                    BigInt::from(p).pow(spec.v_max * s) * (&ps - 1),
                )
        } else {
            let last = terms.last().unwrap();
            // remainder estimate: |t_vmax| * ratio / (1 - ratio)
            truncation_error += to_f64(&last.abs()) / (ps.to_f64().unwrap_or(f64::MAX) - 1.0);
            BigRational::zero()
        };

        let one_minus = BigRational::one()
            - BigRational::new(BigInt::one(), ps.clone());
        let mut key = 1u64;
        for alpha in 1..=spec.v_max {
            key = match key.checked_mul(p) {
                Some(k) => k,
                None => break,
            };
            let inner = &suffix[alpha as usize] + &completion;
            let head = -spec.on_prime_power(p, alpha - 1)
                / BigRational::from_integer(BigInt::from(p).pow(alpha * s));
            let coeff = head + &one_minus * inner;
            if alpha == 1 {
                ghat_primes.push(coeff.clone());
                last_prime_coeff = coeff.clone();
                last_prime = p;
            }
            table.insert(key, coeff);
        }
    }

    // prime-sum truncation for ĝ(1): model |ĝ(p)| ~ C p^(-s) past p_max
    let tail_est = if s > 1 {
        to_f64(&last_prime_coeff.abs()) * last_prime as f64 / (s as f64 - 1.0)
    } else {
        to_f64(&last_prime_coeff.abs()) * last_prime as f64
    };
    truncation_error += tail_est;

    let ghat_one = sum_pairwise(ghat_primes);
    Ok(CoefficientFamily::Additive(AdditiveFamily {
        s,
        name: spec.name.clone(),
        table,
        ghat_one,
        truncation_error,
        p_max: spec.p_max,
        v_max: spec.v_max,
    }))
}

/// One row of the duality cross-check.
#[derive(Debug, Clone)]
pub struct EquivRow {
    pub a: u64,
    /// Σ_{r<=R} ĝ(r) c_r^s(a^s), as f64 (no multiplier).
    pub direct: f64,
    /// Σ_{d|a} γ(d), as f64 (no multiplier).
    pub via_gamma: f64,
    pub discrepancy: f64,
    pub direct_tail: f64,
    pub gamma_tail: f64,
    /// Exact rational equality held (finite-support case).
    pub exact: bool,
}

/// Report of [`verify_equivalence`].
#[derive(Debug, Clone)]
pub struct EquivalenceReport {
    pub rows: Vec<EquivRow>,
    pub max_discrepancy: f64,
    /// Every discrepancy within the sum of the two tail bounds.
    pub all_within_bounds: bool,
    /// Every row compared exactly equal.
    pub exact_everywhere: bool,
}

/// Cross-checks both expansion directions: for each a <= a_max, compares
/// the direct series Σ_{r<=R} ĝ(r) c_r^s(a^s) against Σ_{d|a} γ(d) with
/// γ from [`gamma_from_ghat`]. The duality is stated at the power
/// argument a^s, so that argument is used here for every family.
pub fn verify_equivalence(
    fam: &CoefficientFamily,
    a_max: u64,
    terms: u64,
    mu_terms: u64,
) -> Result<EquivalenceReport> {
    if a_max == 0 {
        return Err(Error::nonpositive("a_max", 0));
    }
    let s = fam.s();
    let mut rows = Vec::with_capacity(a_max as usize);
    let mut max_discrepancy = 0.0f64;
    let mut all_within = true;
    let mut exact_everywhere = true;

    // γ(d) for every divisor that can occur
    let mut gamma_cache: BTreeMap<u64, TailedRational> = BTreeMap::new();

    for a in 1..=a_max {
        let arg = checked_pow_u64(a, s)?;
        let (direct_core, direct_tail) = expansion_core(fam, arg, terms)?;

        let mut via = BigRational::zero();
        let mut gamma_tail = 0.0f64;
        for d in arith::divisors(a)? {
            let entry = match gamma_cache.get(&d) {
                Some(e) => e.clone(),
                None => {
                    let e = gamma_from_ghat(fam, d, mu_terms)?;
                    gamma_cache.insert(d, e.clone());
                    e
                }
            };
            via += &entry.value;
            gamma_tail += entry.tail_bound;
        }

        let exact = direct_core == via && direct_tail == 0.0 && gamma_tail == 0.0;
        let discrepancy = to_f64(&(&direct_core - &via)).abs();
        max_discrepancy = max_discrepancy.max(discrepancy);
        if discrepancy > direct_tail + gamma_tail + 1e-12 {
            all_within = false;
        }
        exact_everywhere &= exact;
        rows.push(EquivRow {
            a,
            direct: to_f64(&direct_core),
            via_gamma: to_f64(&via),
            discrepancy,
            direct_tail,
            gamma_tail,
            exact,
        });
    }
    Ok(EquivalenceReport {
        rows,
        max_discrepancy,
        all_within_bounds: all_within,
        exact_everywhere,
    })
}
