//! Exact symbolic engine for super Nambu brackets.
//!
//! Values are polynomials over commuting and anticommuting coordinates
//! ([`graded`]). Brackets are defined by term lists ([`bracket`]) and the
//! graded Nambu-Poisson axioms, the divergence operator and the Lie-algebra
//! construction are checked exactly on random inputs.

pub mod error;
pub mod bracket;
pub mod bv;
pub mod dynamics;
pub mod graded;
pub mod identities;
pub mod laws;
pub mod lie;
pub mod report;

pub use error::{Error, Result};
