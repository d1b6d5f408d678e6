//! Gaussian cubature on the parabolic domain and minimal cubature on the
//! square, built from Jacobi polynomials, with the matching Lagrange
//! interpolation operators and Lebesgue-constant estimates.

pub mod cli;
pub mod cubature;
pub mod error;
pub mod geometry;
pub mod interp;
pub mod io;
pub mod jacobi;
pub mod maximize;
pub mod oracle;
pub mod orthopoly;
pub mod special;
pub mod tridiag;

pub use cubature::{CubatureRule, Gamma, WeightFamily, WeightSpec};
pub use error::{Error, Result};
pub use geometry::{DomainTag, Point2};
pub use jacobi::{JacobiParams, QuadRule1D};
