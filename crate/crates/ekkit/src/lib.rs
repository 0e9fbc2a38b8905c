//! Eisenstein–Kronecker numbers through Gaussian-damped lattice series,
//! the cyclic A∞ structure on the elliptic curve built from them, and
//! machine checks of their identities.

// `!(x > 0.0)` style guards are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ainfinity;
pub mod classical;
pub mod ekseries;
pub mod error;
pub mod harness;
pub mod lattice;
pub mod symrec;

pub use error::{EkError, Result};
pub use lattice::{Lattice, StratifiedPoint, Stratum, C64};
