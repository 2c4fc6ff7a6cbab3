//! Almost-commuting matrices with symmetries.
//!
//! Dense complex linear algebra, symmetry maps on `M_n(C)`, smooth spectral
//! localization, projection surgery and the bootstrap that turns a commuting
//! approximant of an almost-commuting pair into an exactly commuting pair
//! with the same symmetries.
//!
//! The crate is `no_std` and only needs `alloc`.

#![cfg_attr(not(test), no_std)]
// `num_traits::Float` supplies f64 math without std; once std is in the
// build graph the inherent methods win and the import goes unused.

extern crate alloc;

pub mod bootstrap;
pub mod error;
pub mod generate;
pub mod linalg;
pub mod localization;
pub mod oracle;
pub mod projection;
pub mod region;
pub mod rho;
pub mod symmetry;

pub use error::{Error, Result};
pub use linalg::{ComplexMatrix, C64};
