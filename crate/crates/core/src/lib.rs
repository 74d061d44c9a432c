//! Flexibility classification of domains for minimal surfaces.
//!
//! The crate is organised around five subsystems:
//!
//! - [`convexgeo`]: convex bodies in halfspace form or as analytic round bodies,
//!   Euclidean projection, lineality spaces and supporting hyperplanes.
//! - [`domains`]: the catalogue of domain families with membership and
//!   clearance (distance to the complement).
//! - [`flexcheck`]: tube/growth certificates, witness planes and the rule-based
//!   classifiers for real and complex domains.
//! - [`psh`]: p-plurisubharmonicity of scalar fields, p-convexity certificates
//!   and contact-order estimation.
//! - [`weierstrass`]: null quadric utilities, sampled conformal minimal
//!   surfaces, residuals, periods, integration and arc extension.
//!
//! The [`cli`] module drives everything from JSON descriptors.

pub mod cli;
pub mod convexgeo;
pub mod domains;
mod error;
pub mod flexcheck;
pub mod linalg;
pub mod psh;
pub mod report;
pub mod weierstrass;

pub use error::{Error, Result};

/// Points and directions in R^n.
pub type Point = nalgebra::DVector<f64>;
