//! Numerical and combinatorial tools for deciding whether the geodesic flow
//! of a positively curved sphere of revolution is left-handed.

pub mod clairaut;
pub mod diagram;
pub mod error;
pub mod linking;
pub mod ode;
pub mod profile;
pub mod quadrature;
pub mod roots;
pub mod spline;

pub use error::{Error, Result};
pub use profile::{CurvatureReport, EquatorInfo, ProfileJet, ProfileSurface, SurfaceSpec};
