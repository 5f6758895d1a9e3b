//! Radiated fields, energy densities and Casimir-Polder energies of a
//! ground-state two-level atom in front of a perfectly conducting wall.
//!
//! All quantities are in reduced units (`hbar = c = k0 = 1`); see [`units`].

#![allow(clippy::needless_range_loop, clippy::excessive_precision)]

pub mod casimir;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod oracle;
pub mod quadrature;
pub mod response;
pub mod units;

pub use casimir::{CPEnergy, Route};
pub use error::{Error, QuadratureError, Result};
pub use fields::{DensityOptions, DensityResult, FieldKernel, FieldKind, PolarizabilityModel};
pub use geometry::{derive_frame, reflection_sign, AtomSource, Axis, Branch, GeometryFrame, Vec3};
pub use quadrature::{QuadratureSpec, Scheme};
pub use response::{f_tensor, g_tensor, ResponseTensor};
