//! Special functions and the weighted spectral zeta function.

pub mod gamma;
pub mod hyp2f1;
pub mod specdim;
pub mod zeta;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use gamma::{digamma, gamma, rgamma};
pub use hyp2f1::{hyp2f1, Hyp2f1Value};
pub use specdim::{modular_composition_check, spectral_dimension_scan, SpecDimReport};
pub use zeta::{
    classical_limit, i_c, i_lambda, i_total, pole_table, residue_check, spinor_prefactor, zeta_value, ResidueCheck,
    ZetaContext,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PoleOrigin {
    Commutative,
    Deformed,
}

/// A pole of ζ_f. `residue` is the residue of ζ_f per unit weight ω(f).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PoleRecord {
    pub location: Complex64,
    pub residue: Complex64,
    pub origin: PoleOrigin,
    pub order: u32,
}
