use num_complex::Complex64;
use thiserror::Error;

use crate::specfun::PoleRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("quadrature domain too small: integrand reaches {boundary:e} on the boundary (tolerance {tol:e})")]
    DomainTooSmall { boundary: f64, tol: f64 },

    #[error("grid functions do not share grids and configuration")]
    GridMismatch,

    #[error("band limit violated: out-of-band fraction {fraction:e} exceeds {tol:e} for band {band}")]
    BandViolation { fraction: f64, tol: f64, band: f64 },

    #[error("grid too coarse: Nyquist frequency {nyquist} below {required} for band {band}")]
    UnderResolved { nyquist: f64, required: f64, band: f64 },

    #[error("rescaled points leave the spatial grid while |g| = {magnitude:e} (tolerance {tol:e})")]
    SupportOverflow { magnitude: f64, tol: f64 },

    #[error("modular multiplier bound {bound:e} exceeds the overflow budget {budget:e}")]
    ModularOverflow { bound: f64, budget: f64 },

    #[error("gamma function pole at z = {0}")]
    GammaPole(Complex64),

    #[error("hypergeometric lower parameter c = {0} is a non-positive integer")]
    HypergeometricPole(Complex64),

    #[error("{what} did not converge: error estimate {estimate:e} exceeds {tol:e}")]
    NonConvergence { what: &'static str, estimate: f64, tol: f64 },

    #[error("evaluation at a pole z = {}", .0.location)]
    AtPole(PoleRecord),

    #[error("{0} is not a pole of the zeta function")]
    NotAPole(Complex64),

    #[error("residue circle of radius {radius} around {center} reaches the pole at {other}")]
    CircleOverlap {
        center: Complex64,
        other: Complex64,
        radius: f64,
    },

    #[error("convergence classifier inconclusive: tail fit R^2 = {r_squared}")]
    ClassifierInconclusive { r_squared: f64 },

    #[error("PBW degree bound {bound} exceeded by a term of degree {degree}")]
    DegreeBound { bound: usize, degree: usize },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("container format error: {0}")]
    Format(String),
}
