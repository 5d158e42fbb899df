//! Numerical and exact machinery for κ-Minkowski space: the solvable group,
//! the deformed star-product algebra with its KMS weight, the twisted Dirac
//! symbol, the weighted spectral zeta function and the twisted
//! Chevalley–Eilenberg / Hochschild complexes of the enveloping algebra.

pub mod dirac;
pub mod error;
pub mod exact;
pub mod field;
pub mod homology;
pub mod lie_group;
pub mod pbw;
pub mod quad;
pub mod specfun;

pub use error::{Error, Result};
