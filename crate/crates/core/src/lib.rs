//! Simulation and fitting toolkit for few-photon nonlinear optics in an
//! optically dense atomic ensemble confined to a single guided mode.
//!
//! The model chain goes: atomic response `f(omega)` of the two-/three-/four-
//! level system ([`response`]), spectral-filter pulse propagation and the
//! closed-form switch attenuation ([`pulse`]), conversions between photon
//! numbers, atom numbers and model parameters ([`photometry`]), the
//! incoherent pump switch ([`incoherent`]), dipole-trap broadened absorption
//! profiles ([`trap`]), and nonlinear least-squares extraction of model
//! parameters from transmission spectra ([`fit`]). The [`scenario`] module
//! drives all of it from declarative configs.
//!
//! Internal unit system is SI with angular frequencies (rad/s) throughout.

pub mod constants;
pub mod error;
pub mod fit;
pub mod incoherent;
pub mod photometry;
pub mod pulse;
pub mod quadrature;
pub mod response;
pub mod scenario;
pub mod spectrum;
pub mod svg;
pub mod trap;

pub use error::{Error, Result};
pub use photometry::{EnsembleSpec, Geometry};
pub use pulse::{GridSpec, PropagationResult, PulseSpec};
pub use response::{MediumParams, TransitionParams};
