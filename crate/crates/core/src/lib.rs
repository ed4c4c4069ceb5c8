//! Numerical tensor calculus for almost paracontact paracomplex Riemannian
//! manifolds.

pub mod apcpc;
pub mod cli;
pub mod constructions;
pub mod curvature;
pub mod error;
pub mod geometry;
pub mod jet;
pub mod report;
pub mod tensor;
pub mod transform;

pub use error::{GeometryError, Result};
