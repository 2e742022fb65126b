//! Helpers for exact rational accumulation and deterministic rendering.

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Signed, ToPrimitive, Zero};

/// Sums a list of rationals by pairwise tree reduction.
///
/// Balanced merging keeps intermediate numerators and denominators close
/// in size, so the gcd reductions stay cheap even for thousands of terms
/// with pairwise-coprime denominators (e.g. Σ c_r / r^s up to r = 5000).
pub fn sum_pairwise(mut terms: Vec<BigRational>) -> BigRational {
    if terms.is_empty() {
        return BigRational::zero();
    }
    while terms.len() > 1 {
        let mut next = Vec::with_capacity(terms.len().div_ceil(2));
        let mut it = terms.into_iter();
        while let Some(a) = it.next() {
            match it.next() {
                Some(b) => next.push(a + b),
                None => next.push(a),
            }
        }
        terms = next;
    }
    terms.pop().unwrap()
}

/// Converts a rational to `f64`, correct even when numerator and
/// denominator are far too large for `f64` individually.
pub fn to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    let num = r.numer();
    let den = r.denom();
    let negative = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
    let num = num.magnitude();
    let den = den.magnitude();

    // Shift so the integer quotient carries ~96 bits, then scale back.
    let diff = num.bits() as i64 - den.bits() as i64;
    let shift = 96 - diff;
    let q = if shift >= 0 {
        (num << shift as u64) / den
    } else {
        num / (den << (-shift) as u64)
    };
    let mut v = q.to_f64().unwrap_or(f64::INFINITY);
    // Apply 2^(-shift) in two steps to stay inside the f64 exponent range.
    let (h1, h2) = (-shift / 2, -shift - (-shift / 2));
    for h in [h1, h2] {
        if h.abs() > 2000 {
            return if (h > 0) == (v > 0.0) || v == 0.0 {
                if h > 0 && v != 0.0 {
                    if negative { f64::NEG_INFINITY } else { f64::INFINITY }
                } else {
                    if negative { -0.0 } else { 0.0 }
                }
            } else {
                0.0
            };
        }
        v *= 2f64.powi(h as i32);
    }
    if negative {
        -v
    } else {
        v
    }
}

/// Renders a rational to 15 significant decimal digits, round-half-even.
///
/// Plain positional notation is used for decimal exponents in [-4, 14];
/// scientific notation otherwise. The output is locale-independent.
pub fn decimal_15(r: &BigRational) -> String {
    const DIGITS: u32 = 15;
    if r.is_zero() {
        return "0".to_string();
    }
    let negative = r.is_negative();
    let num = r.numer().magnitude().clone();
    let den = r.denom().magnitude().clone();

    // Decimal exponent e with |r| ∈ [10^e, 10^(e+1)).
    let mut e = num.to_string().len() as i64 - den.to_string().len() as i64;
    let below = if e >= 0 {
        BigInt::from(num.clone()) < BigInt::from(den.clone()) * pow10_abs(e as u64)
    } else {
        BigInt::from(num.clone()) * pow10_abs((-e) as u64) < BigInt::from(den.clone())
    };
    if below {
        e -= 1;
    }

    // Scale so the quotient has exactly DIGITS digits, then round.
    let want = DIGITS as i64 - 1 - e;
    let (scaled_num, scaled_den) = if want >= 0 {
        (BigInt::from(num) * pow10_abs(want as u64), BigInt::from(den))
    } else {
        (BigInt::from(num), BigInt::from(den) * pow10_abs((-want) as u64))
    };
    let (mut q, rem) = num_integer::Integer::div_rem(&scaled_num, &scaled_den);
    let twice: BigInt = &rem * 2;
    let round_up = match twice.cmp(&scaled_den) {
        std::cmp::Ordering::Greater => true,
        std::cmp::Ordering::Equal => num_integer::Integer::is_odd(&q),
        std::cmp::Ordering::Less => false,
    };
    if round_up {
        q += 1;
    }
    let mut digits = q.to_string();
    if digits.len() as u32 > DIGITS {
        // Rounding carried 999... over to 1000...; drop the extra digit.
        digits.truncate(DIGITS as usize);
        e += 1;
    }
    debug_assert_eq!(digits.len(), DIGITS as usize);

    let body = if (-4..=14).contains(&e) {
        if e >= 0 {
            let point = (e + 1) as usize;
            format!("{}.{}", &digits[..point], &digits[point..])
        } else {
            format!("0.{}{}", "0".repeat((-e - 1) as usize), digits)
        }
    } else {
        format!("{}.{}e{}", &digits[..1], &digits[1..], e)
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn pow10_abs(e: u64) -> BigInt {
    BigInt::from(10u32).pow(e as u32)
}

/// Parses "p/q" or a bare integer into an exact rational.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((p, q)) = text.split_once('/') {
        let num: BigInt = p.trim().parse().ok()?;
        let den: BigInt = q.trim().parse().ok()?;
        if den.is_zero() {
            return None;
        }
        Some(BigRational::new(num, den))
    } else {
        let num: BigInt = text.parse().ok()?;
        Some(BigRational::from_integer(num))
    }
}
