//! Exact evaluation of Cohen-Ramanujan sums and related arithmetic
//! functions, plus truncated Ramanujan-type series expansions with
//! rigorous tail bounds.
//!
//! The crate is organized in three layers:
//!
//! * [`arith`] — exact integer arithmetic functions (factorization,
//!   Möbius, generalized GCD, divisor functions, Jordan totient,
//!   Klee's function, ζ(s) with an error certificate).
//! * [`crsum`] — the Cohen-Ramanujan sum `c_r^s(n)`, evaluated exactly
//!   from its Möbius form, cross-checked against the defining
//!   exponential sum, with the summatory identity and the σ bound.
//! * [`expansion`] — truncated expansions `g(a) = Σ ĝ(r) c_r^s(·)`,
//!   the duality between ĝ and γ = μ∗g, and coefficient construction
//!   for additive functions.
//!
//! All series cores are accumulated in exact rational arithmetic; a
//! single floating multiplier (a ζ value) is applied at the end.

pub mod arith;
pub mod crsum;
pub mod expansion;
pub mod rational;
pub mod selftest;

mod error;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
