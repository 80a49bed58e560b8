//! Relative Lipschitz-like moduli of polyhedral and piecewise-linear set-valued mappings.
//!
//! The crate computes, exactly for polyhedral data, the projectional coderivative of a
//! mapping relative to a polyhedral set, decides the relative Lipschitz-like property from
//! it, and evaluates the modulus as the outer norm of that coderivative. A sampling
//! [`oracle`] gives independent lower bounds from difference quotients.
//!
//! All numerical types are generic over [`Scalar`] (`f64` and `f32`); the aliases at the
//! crate root fix the reference precision `f64`.

pub mod coderivative;
pub mod error;
pub mod functions;
pub mod geometry;
pub mod io;
pub mod linalg;
pub mod lp;
pub mod oracle;
pub mod qp;
pub mod reproduce;
mod rng;
pub mod scalar;
pub mod stratified;
pub mod tolerance;

pub use error::{Error, Result};
pub use scalar::Scalar;
pub use tolerance::Tol;

pub type HPolyhedronF64 = geometry::HPolyhedron<f64>;
pub type PolyConeF64 = geometry::PolyCone<f64>;
pub type ConeUnionF64 = geometry::ConeUnion<f64>;
pub type FaceF64 = geometry::Face<f64>;
pub type StratifiedMappingF64 = stratified::StratifiedMapping<f64>;
pub type PhMapF64 = coderivative::PhMap<f64>;
pub type PlFunctionF64 = functions::PlFunction<f64>;

pub type HPolyhedronF32 = geometry::HPolyhedron<f32>;
pub type PolyConeF32 = geometry::PolyCone<f32>;
pub type StratifiedMappingF32 = stratified::StratifiedMapping<f32>;
