//! Experimental geometry: the double-aperture mask, the source and detector
//! planes, and the placement rules for emitters and detectors.
//!
//! The aperture plane is `z = 0`. Emitters sit on the source plane
//! `z = -standoff` in the `xz` plane; detectors sit on `z = detector_z`.
//! The aperture gap `d` is the edge-to-edge distance between the two circles,
//! so the mask spans `4a + d` along `x`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point3 {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl Point3 {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }
}

/// Far-zone requirement: `detector_z >= FAR_ZONE_FACTOR * (4a + d)`.
pub const FAR_ZONE_FACTOR: f64 = 100.0;

/// Geometry of the source plane, aperture mask and detector plane.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SetupConfig {
    /// Radius `a` of each circular aperture.
    pub aperture_radius: f64,
    /// Edge-to-edge gap `d` between the two apertures.
    pub aperture_gap: f64,
    /// Distance `ε` from the source plane to the aperture plane.
    pub standoff: f64,
    /// Distance `r_z` from the aperture plane to the detector plane.
    pub detector_z: f64,
}

impl Default for SetupConfig {
    fn default() -> Self {
        Self {
            aperture_radius: 0.5,
            aperture_gap: 0.25,
            standoff: 0.1,
            detector_z: 500.0,
        }
    }
}

impl SetupConfig {
    pub fn new(
        aperture_radius: f64,
        aperture_gap: f64,
        standoff: f64,
        detector_z: f64,
    ) -> Result<Self> {
        let config = Self {
            aperture_radius,
            aperture_gap,
            standoff,
            detector_z,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |field: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(
                    field,
                    format!("must be finite and > 0, got {v}"),
                ))
            }
        };
        positive("geometry.aperture_radius", self.aperture_radius)?;
        positive("geometry.epsilon", self.standoff)?;
        positive("geometry.detector_z", self.detector_z)?;
        if !(self.aperture_gap.is_finite() && self.aperture_gap >= 0.0) {
            return Err(Error::invalid(
                "geometry.aperture_gap",
                format!("must be finite and >= 0, got {}", self.aperture_gap),
            ));
        }
        let min_z = FAR_ZONE_FACTOR * self.mask_extent();
        if self.detector_z < min_z {
            return Err(Error::invalid(
                "geometry.detector_z",
                format!(
                    "far-zone detector requires detector_z >= {min_z} (100 x mask extent), got {}",
                    self.detector_z
                ),
            ));
        }
        Ok(())
    }

    /// Total x-extent of the mask, `4a + d`.
    pub fn mask_extent(&self) -> f64 {
        4.0 * self.aperture_radius + self.aperture_gap
    }

    pub fn with_standoff(mut self, standoff: f64) -> Result<Self> {
        self.standoff = standoff;
        self.validate()?;
        Ok(self)
    }

    pub fn mask(&self) -> ApertureMask {
        ApertureMask {
            radius: self.aperture_radius,
            center_offset: self.aperture_radius + self.aperture_gap / 2.0,
        }
    }
}

/// Two circles of equal radius centered at `(±center_offset, 0)` on `z = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApertureMask {
    pub radius: f64,
    pub center_offset: f64,
}

impl ApertureMask {
    pub fn centers(&self) -> [(f64, f64); 2] {
        [(-self.center_offset, 0.0), (self.center_offset, 0.0)]
    }

    /// Strictly inside either circle; the rim is excluded.
    pub fn contains(&self, x: f64, y: f64) -> bool {
        let r2 = self.radius * self.radius;
        self.centers().iter().any(|&(cx, cy)| {
            let (dx, dy) = (x - cx, y - cy);
            dx * dx + dy * dy < r2
        })
    }
}

pub fn aperture_centers(config: &SetupConfig) -> [(f64, f64); 2] {
    config.mask().centers()
}

pub fn in_aperture(point: (f64, f64), config: &SetupConfig) -> bool {
    config.mask().contains(point.0, point.1)
}

/// Characteristic emitter separation `δ = λ·standoff / (2(4a + d))`.
///
/// `steepness` is the optional evanescent factor `p > 1` with `|k_x| = p·k`;
/// when given, `δ` is scaled by `1/sqrt(p² - 1)`.
pub fn delta_scale(standoff: f64, config: &SetupConfig, steepness: Option<f64>) -> Result<f64> {
    if !(standoff.is_finite() && standoff > 0.0) {
        return Err(Error::invalid(
            "standoff",
            format!("must be > 0, got {standoff}"),
        ));
    }
    let base = standoff / (2.0 * config.mask_extent());
    match steepness {
        None => Ok(base),
        Some(p) if p.is_finite() && p > 1.0 => Ok(base / (p * p - 1.0).sqrt()),
        Some(p) => Err(Error::invalid("steepness", format!("must be > 1, got {p}"))),
    }
}

/// Ordered emitter positions on the source plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmitterArray {
    positions: Vec<Point3>,
}

impl EmitterArray {
    /// Emitters at the given x-coordinates, all at `y = 0, z = -standoff`.
    pub fn from_x(xs: &[f64], standoff: f64) -> Result<Self> {
        if xs.is_empty() {
            return Err(Error::invalid(
                "emitters",
                "at least one emitter is required",
            ));
        }
        if !(standoff.is_finite() && standoff > 0.0) {
            return Err(Error::invalid(
                "standoff",
                format!("must be > 0, got {standoff}"),
            ));
        }
        if let Some(x) = xs.iter().find(|x| !x.is_finite()) {
            return Err(Error::invalid(
                "emitters",
                format!("non-finite position {x}"),
            ));
        }
        Ok(Self {
            positions: xs.iter().map(|&x| Point3::new(x, 0.0, -standoff)).collect(),
        })
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn standoff(&self) -> f64 {
        -self.positions[0].z
    }
}

/// Emitter placement presets for `N ∈ {1, 2, 4}`.
///
/// `N = 2` puts the pair at `[0, δ]`; `N = 4` uses `[-δ, 0, δ/2, δ]`.
pub fn emitter_positions(
    order: usize,
    config: &SetupConfig,
    standoff: f64,
) -> Result<EmitterArray> {
    let delta = delta_scale(standoff, config, None)?;
    let xs: Vec<f64> = match order {
        1 => vec![0.0],
        2 => vec![0.0, delta],
        4 => vec![-delta, 0.0, delta / 2.0, delta],
        n => return Err(Error::UnsupportedOrder(n)),
    };
    EmitterArray::from_x(&xs, standoff)
}

/// Detector positions on `z = detector_z`, with scan metadata.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DetectorSet {
    positions: Vec<Point3>,
    /// Free scan coordinates the set was generated from.
    pub scan: (f64, f64),
    /// Which detectors follow the scan coordinate; the rest are fixed.
    pub moving: Vec<bool>,
}

impl DetectorSet {
    /// Arbitrary detectors at `(x, y)` pairs; every detector is marked moving.
    pub fn from_xy(points: &[(f64, f64)], config: &SetupConfig) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::invalid(
                "detectors",
                "at least one detector is required",
            ));
        }
        Ok(Self {
            positions: points
                .iter()
                .map(|&(x, y)| Point3::new(x, y, config.detector_z))
                .collect(),
            scan: points[0],
            moving: vec![true; points.len()],
        })
    }

    pub(crate) fn with_metadata(mut self, scan: (f64, f64), moving: Vec<bool>) -> Self {
        debug_assert_eq!(moving.len(), self.positions.len());
        self.scan = scan;
        self.moving = moving;
        self
    }

    pub fn positions(&self) -> &[Point3] {
        &self.positions
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }
}

/// Detector-plane analogue of `δ`: `Δ = λ·r_z / (2(4a + d))`.
pub fn detector_shift(config: &SetupConfig) -> f64 {
    config.detector_z / (2.0 * config.mask_extent())
}

/// Detector placement presets slaved to one scan coordinate.
///
/// - `N = 1`: `[x]`
/// - `N = 2`: `[x, -x]`
/// - `N = 4`: `[x, -x, -x + Δ, x + Δ/2]`
///
/// Every detector shares `y = scan_y`.
pub fn detector_positions(
    order: usize,
    scan_x: f64,
    scan_y: f64,
    config: &SetupConfig,
) -> Result<DetectorSet> {
    let shift = detector_shift(config);
    let xs: Vec<f64> = match order {
        1 => vec![scan_x],
        2 => vec![scan_x, -scan_x],
        4 => vec![scan_x, -scan_x, -scan_x + shift, scan_x + shift / 2.0],
        n => return Err(Error::UnsupportedOrder(n)),
    };
    let points: Vec<(f64, f64)> = xs.into_iter().map(|x| (x, scan_y)).collect();
    let n = points.len();
    Ok(DetectorSet::from_xy(&points, config)?.with_metadata((scan_x, scan_y), vec![true; n]))
}
