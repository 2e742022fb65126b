use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// An argument was outside the domain of the operation.
    #[error("invalid argument {name} = {value}: {reason}")]
    InvalidArgument {
        name: &'static str,
        value: i64,
        reason: &'static str,
    },

    /// The exponential-sum oracle would need more than the supported
    /// number of terms.
    #[error("oracle range exceeded: r^s = {modulus} > {limit}")]
    OracleRange { modulus: u128, limit: u128 },

    /// The exponential-sum oracle did not land on an integer within
    /// tolerance. This signals an implementation bug, not a domain error.
    #[error("oracle inconsistency for (r={r}, s={s}, n={n}): real = {real}, imag = {imag}, tol = {tol}")]
    OracleInconsistent {
        r: u64,
        s: u32,
        n: i64,
        real: f64,
        imag: f64,
        tol: f64,
    },

    /// A derived quantity that must be an integer was not.
    #[error("{what} did not reduce to an integer")]
    NotIntegral { what: &'static str },

    /// Coefficient construction saw an inner series whose terms do not
    /// decrease over the sampled range.
    #[error("inner series for prime {p} does not look convergent: {detail}")]
    NonConvergentSeries { p: u64, detail: String },

    /// Overflow in fixed-width intermediate arithmetic.
    #[error("overflow computing {what}")]
    Overflow { what: &'static str },
}

impl Error {
    pub(crate) fn nonpositive(name: &'static str, value: i64) -> Self {
        Error::InvalidArgument {
            name,
            value,
            reason: "must be positive",
        }
    }
}
