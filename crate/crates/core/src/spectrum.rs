//! Angular-spectrum (Weyl) analysis of a point emitter's field.
//!
//! A spherical wave seen on the aperture plane from an emitter at depth `ε`
//! expands into plane waves over all transverse wavenumbers `k_∥`:
//!
//! ```text
//! e^{iks}/s = (i/2π) ∬ dk_x dk_y e^{i(k_x Δx + k_y Δy) + i k_z ε} / k_z
//! k_z = sqrt(k² - k_∥²)        for k_∥ ≤ k
//!     = i sqrt(k_∥² - k²)      for k_∥ > k
//! ```
//!
//! After the azimuthal integral the kernel is `J0(k_∥ ρ)` with `ρ` the
//! lateral offset. The propagating band is integrated in `k_z ∈ [0, k]` and
//! the evanescent band in `κ = -i k_z`, both smooth in their variables.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point3;
use crate::quadrature::GaussLegendre;
use crate::special::bessel_j0;
use crate::WAVENUMBER;

/// `k_z` for transverse components given in units of `k`; the result is also in units of `k`.
pub fn weyl_kz(kx: f64, ky: f64) -> Complex64 {
    let q2 = kx * kx + ky * ky;
    if q2 <= 1.0 {
        Complex64::new((1.0 - q2).sqrt(), 0.0)
    } else {
        Complex64::new(0.0, (q2 - 1.0).sqrt())
    }
}

/// A plane-wave component of the angular spectrum (units of `k`).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavevectorComponent {
    pub kx: f64,
    pub ky: f64,
    pub kz: Complex64,
}

impl WavevectorComponent {
    pub fn new(kx: f64, ky: f64) -> Self {
        Self {
            kx,
            ky,
            kz: weyl_kz(kx, ky),
        }
    }

    pub fn transverse(&self) -> f64 {
        self.kx.hypot(self.ky)
    }

    pub fn is_evanescent(&self) -> bool {
        self.transverse() > 1.0
    }
}

/// Result of a truncated Weyl reconstruction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeylReconstruction {
    pub value: Complex64,
    /// Contribution of `k_∥ ≤ min(k, k_max)`.
    pub propagating: Complex64,
    /// Contribution of `k < k_∥ ≤ k_max`.
    pub evanescent: Complex64,
    /// Closed-form `e^{iks}/s`.
    pub reference: Complex64,
    pub relative_error: f64,
}

/// Panels for a band of width `span` whose integrand oscillates or decays on
/// the scale `1/(depth + offset)`.
fn panel_count(span: f64, depth: f64, offset: f64) -> usize {
    ((span * (depth + offset) / 2.0).ceil() as usize).max(1) + (span / WAVENUMBER).ceil() as usize
}

fn separation(emitter: &Point3, aperture_point: (f64, f64)) -> Result<(f64, f64)> {
    let depth = -emitter.z;
    if !(depth.is_finite() && depth > 0.0) {
        return Err(Error::Domain(format!(
            "emitter must lie behind the aperture plane, got z = {}",
            emitter.z
        )));
    }
    let offset = (emitter.x - aperture_point.0).hypot(emitter.y - aperture_point.1);
    Ok((depth, offset))
}

/// Reconstruct `e^{iks}/s` from its angular spectrum truncated at `k_∥ ≤ k_max`.
///
/// `k_max` is in units of `k`; `grid_order` is the Gauss-Legendre order used
/// on every panel of both bands.
pub fn weyl_reconstruct(
    emitter: &Point3,
    aperture_point: (f64, f64),
    k_max: f64,
    grid_order: usize,
) -> Result<WeylReconstruction> {
    let (depth, offset) = separation(emitter, aperture_point)?;
    if !(k_max.is_finite() && k_max > 0.0) {
        return Err(Error::Domain(format!("k_max must be > 0, got {k_max}")));
    }
    if grid_order < 2 {
        return Err(Error::Domain(format!(
            "grid_order must be >= 2, got {grid_order}"
        )));
    }
    let k = WAVENUMBER;
    let q_max = k_max * k;
    let gl = GaussLegendre::new(grid_order);

    // i ∫ e^{i k_z ε} J0(sqrt(k² - k_z²) ρ) dk_z over k_z ∈ [sqrt(k² - q_max²), k]
    let kz_lo = if q_max < k {
        (k * k - q_max * q_max).sqrt()
    } else {
        0.0
    };
    let panels = panel_count(k - kz_lo, depth, offset);
    let propagating: Complex64 = Complex64::i()
        * gl.integrate_composite(kz_lo, k, panels, |kz| {
            let q = (k * k - kz * kz).max(0.0).sqrt();
            Complex64::from_polar(bessel_j0(q * offset), kz * depth)
        });

    // ∫ e^{-κ ε} J0(sqrt(k² + κ²) ρ) dκ over κ ∈ [0, sqrt(q_max² - k²)]
    let evanescent = if q_max > k {
        let kappa_max = (q_max * q_max - k * k).sqrt();
        let panels = panel_count(kappa_max, depth, offset);
        let v: f64 = gl.integrate_composite(0.0, kappa_max, panels, |kappa| {
            (-kappa * depth).exp() * bessel_j0((k * k + kappa * kappa).sqrt() * offset)
        });
        Complex64::new(v, 0.0)
    } else {
        Complex64::new(0.0, 0.0)
    };

    let value = propagating + evanescent;
    let s = depth.hypot(offset);
    let reference = Complex64::from_polar(1.0 / s, k * s);
    Ok(WeylReconstruction {
        value,
        propagating,
        evanescent,
        reference,
        relative_error: (value - reference).norm() / reference.norm(),
    })
}

/// Share of the angular spectrum's magnitude carried by evanescent components.
///
/// Each band is weighted by the modulus of its integrand, `∫|·|`, so the
/// split measures how much of the spectrum lies beyond `k_∥ = k` rather than
/// how the two complex band integrals happen to interfere:
///
/// ```text
/// fraction = E / (E + P),  E = ∫_0^∞ e^{-κε} |J0(k_∥ ρ)| dκ,  P = ∫_0^k |J0(k_∥ ρ)| dk_z
/// ```
///
/// On axis (`ρ = 0`) this is `1 / (1 + kε)`.
pub fn evanescent_fraction(standoff: f64, lateral_offset: f64) -> Result<f64> {
    if !(standoff.is_finite() && standoff > 0.0) {
        return Err(Error::Domain(format!(
            "standoff must be > 0, got {standoff}"
        )));
    }
    if !(lateral_offset.is_finite() && lateral_offset >= 0.0) {
        return Err(Error::Domain(format!(
            "lateral offset must be >= 0, got {lateral_offset}"
        )));
    }
    let k = WAVENUMBER;
    let gl = GaussLegendre::new(16);
    // |J0| has kinks at its zeros; many short panels keep that error small.
    let fine = |span: f64| 8 * panel_count(span, standoff, lateral_offset);

    let propagating: f64 = gl.integrate_composite(0.0, k, fine(k), |kz| {
        bessel_j0((k * k - kz * kz).max(0.0).sqrt() * lateral_offset).abs()
    });
    // e^{-κε} < 1e-16 beyond κ = 37/ε.
    let kappa_end = 37.0 / standoff;
    let evanescent: f64 = gl.integrate_composite(0.0, kappa_end, fine(kappa_end), |kappa| {
        (-kappa * standoff).exp() * bessel_j0((k * k + kappa * kappa).sqrt() * lateral_offset).abs()
    });
    Ok(evanescent / (evanescent + propagating))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kz_branches() {
        assert_eq!(weyl_kz(0.0, 0.0), Complex64::new(1.0, 0.0));
        let kz = weyl_kz(5.0, 0.0);
        assert_eq!(kz.re, 0.0);
        assert!((kz.im - 24f64.sqrt()).abs() < 1e-15);
        assert!((kz.im - 4.898_979_485_566_356).abs() < 1e-12);
        assert_eq!(weyl_kz(1.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(weyl_kz(0.6, 0.8).norm(), 0.0);
        assert!(WavevectorComponent::new(5.0, 0.0).is_evanescent());
        assert!(!WavevectorComponent::new(0.3, 0.4).is_evanescent());
    }

    #[test]
    fn kz_continuous_at_branch_point() {
        for q in [1.0 - 1e-9, 1.0 + 1e-9] {
            assert!(weyl_kz(q, 0.0).norm() <= 1e-4);
        }
    }

    #[test]
    fn on_axis_band_integrals_have_closed_forms() {
        // Propagating: (e^{ikε} - 1)/ε; evanescent: (1 - e^{-κ_max ε})/ε.
        let eps = 0.5;
        let w = weyl_reconstruct(&Point3::new(0.0, 0.0, -eps), (0.0, 0.0), 3.0, 16).unwrap();
        let k = WAVENUMBER;
        let prop = (Complex64::from_polar(1.0, k * eps) - 1.0) / eps;
        let kappa_max = (8.0f64).sqrt() * k;
        let evan = (1.0 - (-kappa_max * eps).exp()) / eps;
        assert!((w.propagating - prop).norm() < 1e-12);
        assert!((w.evanescent.re - evan).abs() < 1e-12);
    }

    #[test]
    fn reconstruction_matches_spherical_wave() {
        let w = weyl_reconstruct(&Point3::new(0.0, 0.0, -0.5), (0.0, 0.0), 8.0, 16).unwrap();
        assert!(w.relative_error <= 1e-3, "{}", w.relative_error);
        let w = weyl_reconstruct(&Point3::new(0.0, 0.0, -5.0), (0.0, 0.0), 2.0, 16).unwrap();
        assert!(w.relative_error <= 1e-3, "{}", w.relative_error);
        // Laterally displaced aperture point.
        let w = weyl_reconstruct(&Point3::new(0.2, 0.0, -0.5), (0.5, 0.1), 8.0, 16).unwrap();
        assert!(w.relative_error <= 1e-3, "{}", w.relative_error);
    }

    #[test]
    fn propagating_only_fails_in_near_field() {
        let w = weyl_reconstruct(&Point3::new(0.0, 0.0, -0.1), (0.0, 0.0), 0.99, 16).unwrap();
        assert!(w.relative_error > 0.5, "{}", w.relative_error);
        assert_eq!(w.evanescent, Complex64::new(0.0, 0.0));
    }

    #[test]
    fn error_shrinks_along_kmax_ladder() {
        let e = Point3::new(0.0, 0.0, -0.5);
        let errors: Vec<f64> = [1.5, 2.0, 3.0, 4.0, 6.0, 8.0]
            .iter()
            .map(|&km| {
                weyl_reconstruct(&e, (0.0, 0.0), km, 16)
                    .unwrap()
                    .relative_error
            })
            .collect();
        for pair in errors.windows(2) {
            assert!(pair[1] < pair[0], "{errors:?}");
        }
    }

    #[test]
    fn evanescent_fraction_on_axis_oracle() {
        for eps in [0.1, 0.5, 1.0, 10.0] {
            let got = evanescent_fraction(eps, 0.0).unwrap();
            let want = 1.0 / (1.0 + WAVENUMBER * eps);
            assert!((got - want).abs() < 1e-10, "eps={eps}: {got} vs {want}");
        }
        assert!(evanescent_fraction(0.1, 0.0).unwrap() > 0.5);
        assert!(evanescent_fraction(10.0, 0.0).unwrap() < 0.02);
        assert!(evanescent_fraction(0.0, 0.0).is_err());
    }

    #[test]
    fn evanescent_fraction_decreases_with_standoff() {
        for offset in [0.0, 0.2, 0.6] {
            let ladder: Vec<f64> = [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 5.0]
                .iter()
                .map(|&e| evanescent_fraction(e, offset).unwrap())
                .collect();
            for pair in ladder.windows(2) {
                assert!(pair[0] >= pair[1], "offset {offset}: {ladder:?}");
            }
        }
    }
}
