use thiserror::Error;

/// Errors raised by the numerical library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("{name} = {value} is outside the allowed range {range}")]
    Domain {
        name: &'static str,
        value: f64,
        range: &'static str,
    },

    /// Log-gamma was asked for a pole (non-positive real integer).
    #[error("log-gamma pole at z = {re} + {im}i")]
    Pole { re: f64, im: f64 },

    /// A quantity that is mathematically bounded drifted out of its range.
    #[error("internal consistency check failed: {0}")]
    Consistency(String),

    /// The transmissivity formula produced a non-finite or out-of-range value.
    #[error("transmissivity evaluation failed at k = {k}: {reason}")]
    Evaluation { k: f64, reason: String },

    /// Closed-form critical values are undefined at this point.
    #[error("singular point: {0}")]
    Singular(String),

    /// The symmetric-ensemble region is only valid for eta >= 1/2.
    #[error("eta = {eta} < 1/2: the symmetric-ensemble region does not apply, use the two-letter form")]
    Regime { eta: f64 },

    /// A density matrix or ensemble failed validation.
    #[error("invalid state: {0}")]
    State(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_unit(name: &'static str, value: f64) -> Result<f64> {
    const TOL: f64 = 1e-12;
    if value >= -TOL && value <= 1.0 + TOL {
        Ok(value.clamp(0.0, 1.0))
    } else {
        Err(Error::Domain {
            name,
            value,
            range: "[0, 1]",
        })
    }
}
