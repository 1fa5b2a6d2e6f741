//! Near-field diffraction and N-photon correlation imaging.
//!
//! The crate models point emitters a fraction of a wavelength behind an
//! opaque screen pierced by two sub-wavelength circular apertures. Each
//! emitter's scalar field is diffracted through the apertures and recorded by
//! detectors in the far zone. Correlation signals of order N are formed from
//! the permanent of the detector-by-emitter amplitude matrix.
//!
//! All lengths are expressed in wavelengths (`λ = 1`, `k = 2π`).
//!
//! Modules, bottom up:
//!
//! - [`geometry`]: setup, aperture mask and emitter/detector placement
//! - [`quadrature`]: Gauss-Legendre rules and the adaptive aperture cubature
//! - [`diffraction`]: near-field Kirchhoff amplitude and the far-zone reference
//! - [`spectrum`]: angular-spectrum (Weyl) decomposition tools
//! - [`permanent`] and [`correlation`]: amplitude matrices and `G(N)` signals
//! - [`imaging`]: scans, contrast metric and parameter sweeps

pub mod correlation;
pub mod diffraction;
pub mod error;
pub mod geometry;
pub mod imaging;
pub mod permanent;
pub mod quadrature;
pub mod reduce;
pub mod special;
pub mod spectrum;

pub use correlation::{AmplitudeMatrix, CorrelationValue};
pub use diffraction::{Illumination, SourceField};
pub use error::{Error, Result};
pub use geometry::{DetectorSet, EmitterArray, Point3, SetupConfig};
pub use imaging::{ContrastOptions, ContrastReport, CorrelationCurve, CorrelationImage, Imager};
pub use quadrature::QuadratureSpec;

pub use num_complex::Complex64;

/// Wavenumber `k = 2π/λ` with `λ = 1`.
pub const WAVENUMBER: f64 = 2.0 * std::f64::consts::PI;
