//! Special functions and generic fits used by every other module:
//! Bessel functions of fractional order (real argument and the
//! purely-imaginary-argument modified variant) and log-log power-law
//! regression.

mod bessel;
mod powerlaw;

pub use bessel::{bessel_i_neg_imag, bessel_j, bessel_j_batch};
pub use powerlaw::{fit_power_law, hausdorff_from_exponent, PowerLawFit};

/// Errors raised by the special-function kernels.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpecFunError {
    #[error("domain error: {0}")]
    Domain(&'static str),
    #[error("overflow: {0}")]
    Overflow(&'static str),
    #[error("invalid fit input: {0}")]
    FitInput(&'static str),
}
