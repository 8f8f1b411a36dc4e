//! Discrete closed curves in three-dimensional volume manifolds viewed as
//! points of the non-linear Grassmannian: the tilde calculus of ambient
//! forms, the binormal (vortex filament) flow, moment maps and cocycles of
//! exact divergence-free fields, and prequantization chain integrals.

pub mod acceptance;
pub mod ambient;
pub mod error;
pub mod extension;
pub mod flow;
pub mod formats;
pub mod loops;
pub mod prequant;
pub mod quadrature;
pub mod runner;
pub mod tilde;

pub use error::{Error, Result};
