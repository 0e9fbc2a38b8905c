//! The cyclic minimal A∞-algebra on `Ext*(G, G)`: products, pairing,
//! Stasheff and cyclicity residuals, Hochschild cochains and the
//! variation equations.

mod basis;
mod cochain;
mod oracle;
mod products;
mod variation;

pub use basis::{basis, composable, composable_strings, BasisElement, Combination, Object};
pub use cochain::{builtin_cochain, circ, gerstenhaber, Builtin, Cochain, Convention};
pub use oracle::perturbation_oracle;
pub use products::{
    cyclic_residual, mu, pairing_e, stasheff_combination, stasheff_residual, type_i_strings, unital_residual,
    AinfConfig, Param, TypeI,
};
pub use variation::{insertion_form, variation_residual, variation_residuals, Form};
