//! Scalar diffraction of point-emitter fields through the double aperture.
//!
//! The near-field amplitude at a far-zone detector `r` for an emitter `R`
//! just behind the mask is
//!
//! ```text
//! U(r, R) = -Φ/(r_z λ) ∬_S e^{i(k/r_z)(ρ_x r_x + ρ_y r_y)} (e^{iks}/s) (R_z/s) (1 - 1/(iks)) dρ
//! Φ       = exp(i k r_z + i k (r_x² + r_y²) / (2 r_z)),     s = |R - ρ|
//! ```
//!
//! The paraxial detector phase is used as written even for `|r_x|` of order
//! `r_z`. `Φ` is kept in every amplitude although it drops out of all
//! correlation moduli.
//!
//! A [`SourceField`] folds the emitter-dependent factor into a cubature rule
//! once, after which each detector costs one weighted sum per aperture.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Point3, SetupConfig};
use crate::quadrature::{adaptive_half_disk, HalfDiskRule, QuadratureSpec, RuleDiagnostics};
use crate::special::jinc;
use crate::WAVENUMBER;

/// Outgoing spherical wave `e^{iks}/s`.
pub fn spherical_wave(separation: f64) -> Result<Complex64> {
    if !(separation.is_finite() && separation > 0.0) {
        return Err(Error::Domain(format!(
            "separation must be > 0, got {separation}"
        )));
    }
    Ok(Complex64::from_polar(
        1.0 / separation,
        WAVENUMBER * separation,
    ))
}

/// Emitter-dependent part of the Kirchhoff integrand at aperture point `(x, y, 0)`:
/// `(e^{iks}/s)(R_z/s)(1 - 1/(iks))`.
#[inline]
pub fn source_factor(x: f64, y: f64, emitter: &Point3) -> Complex64 {
    let (dx, dy, dz) = (x - emitter.x, y - emitter.y, emitter.z);
    let s = (dx * dx + dy * dy + dz * dz).sqrt();
    let ks = WAVENUMBER * s;
    let wave = Complex64::from_polar(1.0 / s, ks);
    // 1 - 1/(iks) = 1 + i/(ks)
    wave * (emitter.z / s) * Complex64::new(1.0, 1.0 / ks)
}

/// Detector phase `Φ = exp(i k r_z + i k (r_x² + r_y²)/(2 r_z))`.
pub fn detector_phase(detector: &Point3) -> Complex64 {
    let rz = detector.z;
    let phase = WAVENUMBER * rz
        + WAVENUMBER * (detector.x * detector.x + detector.y * detector.y) / (2.0 * rz);
    Complex64::from_polar(1.0, phase)
}

/// Full near-field integrand at aperture point `ρ = (x, y, 0)`.
pub fn nearfield_integrand(
    aperture_point: (f64, f64),
    emitter: &Point3,
    detector: &Point3,
) -> Complex64 {
    let (x, y) = aperture_point;
    let phase = WAVENUMBER / detector.z * (x * detector.x + y * detector.y);
    Complex64::from_polar(1.0, phase) * source_factor(x, y, emitter)
}

fn check_emitter(emitter: &Point3) -> Result<()> {
    if !(emitter.z < 0.0 && emitter.z.is_finite()) {
        return Err(Error::Domain(format!(
            "emitter must lie behind the aperture plane (z < 0), got z = {}",
            emitter.z
        )));
    }
    if emitter.y != 0.0 {
        return Err(Error::Domain(format!(
            "emitters are confined to the xz plane, got y = {}",
            emitter.y
        )));
    }
    if !emitter.x.is_finite() {
        return Err(Error::Domain("emitter x must be finite".into()));
    }
    Ok(())
}

/// Convergence record for one emitter's cubature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceDiagnostics {
    pub emitter: Point3,
    pub left: RuleDiagnostics,
    pub right: RuleDiagnostics,
}

/// One emitter's diffracted field, ready to evaluate at any detector.
#[derive(Debug, Clone)]
pub struct SourceField {
    emitter: Point3,
    left: HalfDiskRule,
    right: HalfDiskRule,
    max_transverse_ratio: f64,
}

impl SourceField {
    pub fn new(emitter: Point3, config: &SetupConfig, quad: &QuadratureSpec) -> Result<Self> {
        config.validate()?;
        quad.validate()?;
        check_emitter(&emitter)?;
        let radius = config.aperture_radius;
        let center = config.mask().center_offset;

        // The left aperture's rule is the reflection of the right aperture's
        // rule for the reflected emitter, which makes U(r_x; R_x) and
        // U(-r_x; -R_x) bit-identical.
        let build = |ex: f64| {
            let e = Point3::new(ex, 0.0, emitter.z);
            adaptive_half_disk(center, radius, quad, move |x, y| source_factor(x, y, &e))
        };
        let right = build(emitter.x)?;
        let left = if emitter.x == 0.0 {
            right.mirrored()
        } else {
            build(-emitter.x)?.mirrored()
        };
        Ok(Self {
            emitter,
            left,
            right,
            max_transverse_ratio: quad.max_transverse_ratio,
        })
    }

    pub fn emitter(&self) -> Point3 {
        self.emitter
    }

    pub fn diagnostics(&self) -> SourceDiagnostics {
        SourceDiagnostics {
            emitter: self.emitter,
            left: self.left.diagnostics,
            right: self.right.diagnostics,
        }
    }

    /// The aperture integral without the `-Φ/(r_z λ)` prefactor.
    pub fn aperture_integral(&self, detector: &Point3) -> Result<Complex64> {
        let rz = detector.z;
        if !(rz.is_finite() && rz > 0.0) {
            return Err(Error::Domain(format!(
                "detector must lie at z > 0, got {rz}"
            )));
        }
        let ratio = detector.x.hypot(detector.y) / rz;
        if ratio > self.max_transverse_ratio * (1.0 + 1e-12) {
            return Err(Error::Domain(format!(
                "detector |r_perp|/r_z = {ratio:.4} exceeds the resolved range {}",
                self.max_transverse_ratio
            )));
        }
        let alpha = WAVENUMBER * detector.x / rz;
        let beta = WAVENUMBER * detector.y / rz;
        Ok(self.left.evaluate(alpha, beta) + self.right.evaluate(alpha, beta))
    }

    /// `U(r, R)` including the detector phase `Φ`.
    pub fn amplitude(&self, detector: &Point3) -> Result<Complex64> {
        let integral = self.aperture_integral(detector)?;
        Ok(-detector_phase(detector) / detector.z * integral)
    }
}

/// `U(r, R)` for a single detector/emitter pair.
///
/// Builds a fresh [`SourceField`]; reuse one when evaluating many detectors.
pub fn diffracted_amplitude(
    detector: &Point3,
    emitter: &Point3,
    config: &SetupConfig,
    quad: &QuadratureSpec,
) -> Result<Complex64> {
    SourceField::new(*emitter, config, quad)?.amplitude(detector)
}

/// Far-zone reference: normally incident unit plane wave on the mask.
///
/// The aperture integral is the mask's Fourier transform at spatial frequency
/// `q = k r_⊥ / r_z`: each circle contributes `π a² · 2J1(qa)/(qa)` with a
/// center phase `e^{i q·c}`.
pub fn farfield_amplitude(detector: &Point3, config: &SetupConfig) -> Complex64 {
    let rz = detector.z;
    let alpha = WAVENUMBER * detector.x / rz;
    let beta = WAVENUMBER * detector.y / rz;
    let a = config.aperture_radius;
    let q = alpha.hypot(beta);
    let envelope = std::f64::consts::PI * a * a * jinc(q * a);
    let centers = 2.0 * (alpha * config.mask().center_offset).cos();
    -detector_phase(detector) / rz * (envelope * centers)
}

/// How the mask is illuminated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Illumination {
    /// Point emitters a short standoff behind the mask.
    NearField,
    /// Normally incident plane wave; the far-zone (Rayleigh-limited) reference.
    PlaneWave,
}

/// Anything that produces an amplitude at a detector.
#[derive(Debug, Clone)]
pub enum Source {
    Emitter(SourceField),
    PlaneWave(SetupConfig),
}

impl Source {
    pub fn amplitude(&self, detector: &Point3) -> Result<Complex64> {
        match self {
            Source::Emitter(field) => field.amplitude(detector),
            Source::PlaneWave(config) => Ok(farfield_amplitude(detector, config)),
        }
    }

    pub fn diagnostics(&self) -> Option<SourceDiagnostics> {
        match self {
            Source::Emitter(field) => Some(field.diagnostics()),
            Source::PlaneWave(_) => None,
        }
    }
}

impl From<SourceField> for Source {
    fn from(f: SourceField) -> Self {
        Source::Emitter(f)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const I: Complex64 = Complex64::new(0.0, 1.0);

    fn close(a: Complex64, b: Complex64, rel: f64) -> bool {
        (a - b).norm() <= rel * b.norm().max(1e-300)
    }

    #[test]
    fn spherical_wave_phases() {
        assert!(close(
            spherical_wave(1.0).unwrap(),
            Complex64::new(1.0, 0.0),
            1e-14
        ));
        assert!(close(
            spherical_wave(0.5).unwrap(),
            Complex64::new(-2.0, 0.0),
            1e-14
        ));
        assert!(close(
            spherical_wave(0.25).unwrap(),
            Complex64::new(0.0, 4.0),
            1e-14
        ));
        assert!(spherical_wave(0.0).is_err());
        assert!(spherical_wave(-1.0).is_err());
    }

    #[test]
    fn integrand_on_axis_collapse() {
        let eps = 0.1;
        let emitter = Point3::new(0.3, 0.0, -eps);
        let detector = Point3::new(0.0, 0.0, 500.0);
        let got = nearfield_integrand((0.3, 0.0), &emitter, &detector);
        let k = WAVENUMBER;
        let want = -(Complex64::from_polar(1.0, k * eps) / eps) * (1.0 - 1.0 / (I * k * eps));
        assert!(close(got, want, 1e-14), "{got} vs {want}");
    }

    #[test]
    fn integrand_far_limit() {
        // (1 - 1/(iks)) → 1 within 1/(ks)
        let emitter = Point3::new(0.0, 0.0, -50.0);
        let detector = Point3::new(0.0, 0.0, 500.0);
        let rho = (0.4, 0.2);
        let s = (0.16f64 + 0.04 + 2500.0).sqrt();
        let got = nearfield_integrand(rho, &emitter, &detector);
        let bare = Complex64::from_polar(1.0 / s, WAVENUMBER * s) * (-50.0 / s);
        assert!((got - bare).norm() <= bare.norm() / (WAVENUMBER * s) * 1.000001);
    }

    #[test]
    fn integrand_regression_by_direct_arithmetic() {
        // Lateral offset λ/10 at ε = λ/10, detector on axis.
        let emitter = Point3::new(0.0, 0.0, -0.1);
        let detector = Point3::new(0.0, 0.0, 500.0);
        let got = nearfield_integrand((0.1, 0.0), &emitter, &detector);
        // Independent evaluation of the closed-form factors.
        let s = 0.02f64.sqrt();
        let ks = 2.0 * std::f64::consts::PI * s;
        let mag = (1.0 / s) * (0.1 / s) * (1.0 + 1.0 / (ks * ks)).sqrt();
        assert!((got.norm() - mag).abs() < 1e-12 * mag);
        // arg = ks + π (from R_z < 0) + atan(1/(ks))
        let arg = ks + std::f64::consts::PI + (1.0 / ks).atan();
        let want = Complex64::from_polar(mag, arg);
        assert!(close(got, want, 1e-13));
        assert!((mag - 7.527_474_336_603_916).abs() < 1e-12, "{mag}");
    }

    #[test]
    fn phase_factor_unit_modulus() {
        for x in [-1000.0, -3.0, 0.0, 17.5, 999.0] {
            let p = detector_phase(&Point3::new(x, 0.5 * x, 500.0));
            assert!((p.norm() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn emitter_validation() {
        let c = SetupConfig::default();
        let q = QuadratureSpec::default();
        assert!(SourceField::new(Point3::new(0.0, 0.1, -0.1), &c, &q).is_err());
        assert!(SourceField::new(Point3::new(0.0, 0.0, 0.1), &c, &q).is_err());
        let f = SourceField::new(Point3::new(0.0, 0.0, -0.1), &c, &q).unwrap();
        assert!(f.amplitude(&Point3::new(2000.0, 0.0, 500.0)).is_err());
    }

    #[test]
    fn farfield_symmetry_and_peak() {
        let c = SetupConfig::default();
        let on_axis = farfield_amplitude(&Point3::new(0.0, 0.0, 500.0), &c).norm();
        // Both apertures add in phase at zero spatial frequency.
        let area = 2.0 * std::f64::consts::PI * 0.25;
        assert!((on_axis - area / 500.0).abs() < 1e-15);
        for x in [1.0, 50.0, 200.0, 333.3, 700.0] {
            let p = farfield_amplitude(&Point3::new(x, 0.0, 500.0), &c).norm();
            let m = farfield_amplitude(&Point3::new(-x, 0.0, 500.0), &c).norm();
            assert_eq!(p, m);
            assert!(p < on_axis);
        }
    }

    #[test]
    fn farfield_first_airy_zero() {
        // Bisection on the single-circle kernel J1(k a r_x / r_z) for its first root.
        let c = SetupConfig::default();
        let kernel =
            |x: f64| crate::special::bessel_j1(WAVENUMBER * c.aperture_radius * x / c.detector_z);
        let (mut lo, mut hi) = (400.0, 800.0);
        assert!(kernel(lo) * kernel(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if kernel(lo) * kernel(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let zero = 0.5 * (lo + hi);
        assert!((zero - 609.834).abs() < 1e-2, "{zero}");
        let at_zero = farfield_amplitude(&Point3::new(zero, 0.0, 500.0), &c).norm();
        assert!(at_zero < 1e-12);
    }
}
