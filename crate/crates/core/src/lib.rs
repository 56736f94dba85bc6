//! Numerical laboratory for holomorphic self-maps of the unit disk.
//!
//! The crate evaluates Schwarz–Pick type quantities and the reverse bound
//! `Q_φ(z) <= |𝒪(z)| ((1+|z|)/((1-ω)(1-|z|)))^{1-ω}` over concrete map
//! families, together with every intermediate inequality of its proof.

// `!(x <= y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod angular;
pub mod bounds;
pub mod error;
pub(crate) mod extended_real;
pub mod geometry;
pub mod verify;
pub mod zoo;

pub use error::{LabError, Result};
