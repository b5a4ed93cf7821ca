//! Photon-fluid simulator for a planar Kerr cavity.
//!
//! Two descriptions of the same physics live side by side: the quantum
//! Bogoliubov theory of a weakly interacting 2D photon gas ([`theory`]) and
//! the classical Lugiato-Lefever mean-field model ([`meanfield`]) with a
//! split-step pseudospectral integrator ([`solver`]). [`experiments`] runs
//! the numerical measurements that connect them, and [`cli_io`] handles
//! configuration, unit conversion and file formats.

pub mod cli_io;
pub mod error;
pub mod experiments;
pub mod grid;
pub mod meanfield;
pub mod par;
pub mod solver;
pub mod special;
pub mod spectral;
pub mod theory;
pub mod units;

pub use error::{Error, Result};
pub use grid::{ComplexField, GridSpec, RealField};
pub use num_complex::Complex64;
