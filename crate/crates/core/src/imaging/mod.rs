//! Detector scans producing correlation curves and images.
//!
//! Scan points are independent: each one places its detectors, fills the
//! amplitude matrix from per-emitter [`SourceField`](crate::SourceField)s and
//! evaluates `G(N)`. Points are evaluated on a private thread pool and
//! collected by index, so outputs do not depend on the thread count.

mod contrast;
#[cfg(test)]
mod scan_tests;
mod sweep;

pub use contrast::{contrast, shape_similarity, ContrastOptions, ContrastReport};
pub use contrast::{contrast_values, MIN_SAMPLES};
pub use sweep::{DistancePoint, SweepMatrix};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::correlation::{correlation_from_matrix, emitter_sources, matrix_from_sources};
use crate::diffraction::{Illumination, Source, SourceDiagnostics};
use crate::error::{Error, Result};
use crate::geometry::{
    detector_positions, detector_shift, emitter_positions, DetectorSet, EmitterArray, Point3,
    SetupConfig,
};
use crate::quadrature::QuadratureSpec;

/// Evenly spaced samples over `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanAxis {
    pub lo: f64,
    pub hi: f64,
    pub samples: usize,
}

impl ScanAxis {
    pub fn new(lo: f64, hi: f64, samples: usize) -> Result<Self> {
        let axis = Self { lo, hi, samples };
        axis.validate("scan.axis")?;
        Ok(axis)
    }

    pub fn symmetric(half_width: f64, samples: usize) -> Result<Self> {
        Self::new(-half_width, half_width, samples)
    }

    pub fn validate(&self, field: &str) -> Result<()> {
        if !(self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi) {
            return Err(Error::invalid(
                field,
                format!(
                    "range must be finite with lo < hi, got [{}, {}]",
                    self.lo, self.hi
                ),
            ));
        }
        if self.samples < 2 {
            return Err(Error::invalid(
                field,
                format!("need at least 2 samples, got {}", self.samples),
            ));
        }
        Ok(())
    }

    /// Sample positions. For a symmetric range, sample `i` is the exact
    /// negative of sample `n - 1 - i`.
    pub fn points(&self) -> Vec<f64> {
        let mid = 0.5 * (self.lo + self.hi);
        let half = 0.5 * (self.hi - self.lo);
        let last = (self.samples - 1) as f64;
        (0..self.samples)
            .map(|i| {
                let t = (2.0 * i as f64 - last) / last;
                if i + 1 == self.samples {
                    self.hi
                } else if i == 0 {
                    self.lo
                } else {
                    mid + half * t
                }
            })
            .collect()
    }
}

/// Which detectors follow the scan coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectorMode {
    /// Every detector follows the placement preset for the order.
    FourMoving,
    /// Detectors 1 and 2 at `x` and `-x`; detectors 3 and 4 stationary.
    TwoMovingTwoFixed,
    /// Detector 1 at `x`; detectors 2 to 4 stationary.
    OneMovingThreeFixed,
}

impl DetectorMode {
    pub fn moving(&self) -> usize {
        match self {
            DetectorMode::FourMoving => 4,
            DetectorMode::TwoMovingTwoFixed => 2,
            DetectorMode::OneMovingThreeFixed => 1,
        }
    }

    /// Stationary detector x-positions from the four-detector preset at scan 0,
    /// i.e. `[0, 0, Δ, Δ/2]` with the moving ones removed.
    pub fn default_fixed(&self, config: &SetupConfig) -> Vec<f64> {
        let shift = detector_shift(config);
        let preset = [0.0, 0.0, shift, shift / 2.0];
        preset[self.moving()..].to_vec()
    }
}

/// Everything that defines a scan besides its sampling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanSetup {
    pub order: usize,
    pub illumination: Illumination,
    pub standoff: f64,
    /// Explicit emitter x-positions; `None` uses the placement preset.
    pub emitter_x: Option<Vec<f64>>,
    /// Only meaningful for `order = 4`; other orders use all-moving placement.
    pub detector_mode: DetectorMode,
    /// Stationary detector x-positions; `None` uses [`DetectorMode::default_fixed`].
    pub fixed_x: Option<Vec<f64>>,
}

impl ScanSetup {
    /// Preset emitters and detectors, all detectors moving.
    pub fn preset(order: usize, standoff: f64) -> Self {
        Self {
            order,
            illumination: Illumination::NearField,
            standoff,
            emitter_x: None,
            detector_mode: DetectorMode::FourMoving,
            fixed_x: None,
        }
    }

    /// Single detector under plane-wave illumination.
    pub fn far_field() -> Self {
        Self {
            illumination: Illumination::PlaneWave,
            ..Self::preset(1, 1.0)
        }
    }

    pub fn emitters(&self, config: &SetupConfig) -> Result<EmitterArray> {
        match &self.emitter_x {
            Some(xs) => {
                if xs.len() != self.order {
                    return Err(Error::invalid(
                        "scan.emitter_x",
                        format!("expected {} emitters, got {}", self.order, xs.len()),
                    ));
                }
                EmitterArray::from_x(xs, self.standoff)
            }
            None => emitter_positions(self.order, config, self.standoff),
        }
    }

    fn fixed(&self, config: &SetupConfig) -> Result<Vec<f64>> {
        let want = 4 - self.detector_mode.moving();
        let fixed = self
            .fixed_x
            .clone()
            .unwrap_or_else(|| self.detector_mode.default_fixed(config));
        if fixed.len() != want {
            return Err(Error::invalid(
                "sweep.fixed_positions",
                format!(
                    "{:?} needs {want} stationary detectors, got {}",
                    self.detector_mode,
                    fixed.len()
                ),
            ));
        }
        Ok(fixed)
    }

    pub fn validate(&self, config: &SetupConfig) -> Result<()> {
        match self.illumination {
            Illumination::PlaneWave => {
                if self.order != 1 {
                    return Err(Error::invalid(
                        "scan.order",
                        "plane-wave illumination supports only order 1",
                    ));
                }
            }
            Illumination::NearField => {
                self.emitters(config)?;
            }
        }
        if self.detector_mode != DetectorMode::FourMoving {
            if self.order != 4 {
                return Err(Error::invalid(
                    "sweep.detector_mode",
                    format!(
                        "{:?} requires order 4, got {}",
                        self.detector_mode, self.order
                    ),
                ));
            }
            self.fixed(config)?;
        } else {
            detector_positions(self.order, 0.0, 0.0, config)?;
        }
        Ok(())
    }

    /// Detector set for scan coordinate `(x, y)`. Stationary detectors stay on `y = 0`.
    pub fn detectors(&self, x: f64, y: f64, config: &SetupConfig) -> Result<DetectorSet> {
        match self.detector_mode {
            DetectorMode::FourMoving => detector_positions(self.order, x, y, config),
            mode => {
                let fixed = self.fixed(config)?;
                let mut points = match mode {
                    DetectorMode::TwoMovingTwoFixed => vec![(x, y), (-x, y)],
                    _ => vec![(x, y)],
                };
                points.extend(fixed.iter().map(|&f| (f, 0.0)));
                let mut moving = vec![true; mode.moving()];
                moving.extend(std::iter::repeat_n(false, fixed.len()));
                Ok(DetectorSet::from_xy(&points, config)?.with_metadata((x, y), moving))
            }
        }
    }
}

/// A 1-D correlation scan along `x` at constant `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationCurve {
    pub scan_x: Vec<f64>,
    pub values: Vec<f64>,
    pub order: usize,
    pub scan_y: f64,
    /// Values divided by their maximum.
    pub normalized: bool,
    /// Maximum of the raw values.
    pub peak: f64,
    pub config: SetupConfig,
    pub setup: ScanSetup,
    pub quadrature: Vec<SourceDiagnostics>,
}

impl CorrelationCurve {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Copy scaled so the maximum is exactly 1 (all-zero curves stay zero).
    pub fn normalized(&self) -> Self {
        let mut out = self.clone();
        if !self.normalized {
            let max = self.values.iter().cloned().fold(0.0, f64::max);
            if max > 0.0 {
                out.values.iter_mut().for_each(|v| *v /= max);
            }
            out.normalized = true;
        }
        out
    }
}

/// A 2-D grid of correlation values; `values[iy][ix]` with `y` ascending.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorrelationImage {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub values: Vec<Vec<f64>>,
    pub order: usize,
    pub normalized: bool,
    pub peak: f64,
    pub config: SetupConfig,
    pub setup: ScanSetup,
    pub quadrature: Vec<SourceDiagnostics>,
}

impl CorrelationImage {
    /// Index of the row closest to `y = 0` (lowest index on ties).
    pub fn central_row_index(&self) -> usize {
        let mut best = 0;
        for (i, y) in self.ys.iter().enumerate() {
            if y.abs() < self.ys[best].abs() {
                best = i;
            }
        }
        best
    }

    pub fn row(&self, iy: usize) -> CorrelationCurve {
        CorrelationCurve {
            scan_x: self.xs.clone(),
            values: self.values[iy].clone(),
            order: self.order,
            scan_y: self.ys[iy],
            normalized: self.normalized,
            peak: self.peak,
            config: self.config,
            setup: self.setup.clone(),
            quadrature: self.quadrature.clone(),
        }
    }

    pub fn max(&self) -> f64 {
        self.values.iter().flatten().cloned().fold(0.0, f64::max)
    }
}

/// Runs scans for one setup geometry and quadrature spec.
pub struct Imager {
    config: SetupConfig,
    quad: QuadratureSpec,
    pool: rayon::ThreadPool,
    threads: usize,
}

impl std::fmt::Debug for Imager {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Imager")
            .field("config", &self.config)
            .field("quad", &self.quad)
            .field("threads", &self.threads)
            .finish()
    }
}

impl Imager {
    /// `threads = None` uses rayon's default.
    pub fn new(config: SetupConfig, quad: QuadratureSpec, threads: Option<usize>) -> Result<Self> {
        config.validate()?;
        quad.validate()?;
        if threads == Some(0) {
            return Err(Error::invalid("threads", "must be >= 1"));
        }
        let mut builder = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            builder = builder.num_threads(n);
        }
        let pool = builder
            .build()
            .map_err(|e| Error::invalid("threads", e.to_string()))?;
        let threads = pool.current_num_threads();
        Ok(Self {
            config,
            quad,
            pool,
            threads,
        })
    }

    pub fn config(&self) -> &SetupConfig {
        &self.config
    }

    pub fn quadrature(&self) -> &QuadratureSpec {
        &self.quad
    }

    pub fn threads(&self) -> usize {
        self.threads
    }

    pub fn sources(&self, setup: &ScanSetup) -> Result<Vec<Source>> {
        setup.validate(&self.config)?;
        match setup.illumination {
            Illumination::PlaneWave => Ok(vec![Source::PlaneWave(self.config)]),
            Illumination::NearField => {
                let emitters = setup.emitters(&self.config)?;
                self.pool
                    .install(|| emitter_sources(&emitters, &self.config, &self.quad))
            }
        }
    }

    fn evaluate(
        &self,
        setup: &ScanSetup,
        sources: &[Source],
        points: &[(f64, f64)],
    ) -> Result<Vec<f64>> {
        self.pool.install(|| {
            points
                .par_iter()
                .map(|&(x, y)| {
                    let detectors = setup.detectors(x, y, &self.config)?;
                    let m = matrix_from_sources(detectors.positions(), sources)?;
                    Ok(correlation_from_matrix(&m)?.value)
                })
                .collect()
        })
    }

    /// `G(N)` along `x` at constant `scan_y`.
    pub fn curve(
        &self,
        setup: &ScanSetup,
        axis: &ScanAxis,
        scan_y: f64,
        normalize: bool,
    ) -> Result<CorrelationCurve> {
        axis.validate("scan.x_range")?;
        let sources = self.sources(setup)?;
        let xs = axis.points();
        let points: Vec<(f64, f64)> = xs.iter().map(|&x| (x, scan_y)).collect();
        let values = self.evaluate(setup, &sources, &points)?;
        let peak = values.iter().cloned().fold(0.0, f64::max);
        let curve = CorrelationCurve {
            scan_x: xs,
            values,
            order: setup.order,
            scan_y,
            normalized: false,
            peak,
            config: self.config,
            setup: setup.clone(),
            quadrature: sources.iter().filter_map(Source::diagnostics).collect(),
        };
        Ok(if normalize { curve.normalized() } else { curve })
    }

    /// Preset scan: `order` emitters at `standoff`, detectors at `y = 0`.
    pub fn scan_1d(
        &self,
        order: usize,
        standoff: f64,
        axis: &ScanAxis,
        normalize: bool,
    ) -> Result<CorrelationCurve> {
        self.curve(&ScanSetup::preset(order, standoff), axis, 0.0, normalize)
    }

    /// Row-by-row scan; every row is a [`curve`](Self::curve) at constant `y`.
    pub fn image(
        &self,
        setup: &ScanSetup,
        x_axis: &ScanAxis,
        y_axis: &ScanAxis,
        normalize: bool,
    ) -> Result<CorrelationImage> {
        x_axis.validate("scan.x_range")?;
        y_axis.validate("scan.y_range")?;
        let sources = self.sources(setup)?;
        let (xs, ys) = (x_axis.points(), y_axis.points());
        let points: Vec<(f64, f64)> = ys
            .iter()
            .flat_map(|&y| xs.iter().map(move |&x| (x, y)))
            .collect();
        let flat = self.evaluate(setup, &sources, &points)?;
        let peak = flat.iter().cloned().fold(0.0, f64::max);
        let scale = if normalize && peak > 0.0 { peak } else { 1.0 };
        let values = flat
            .chunks(xs.len())
            .map(|row| row.iter().map(|v| v / scale).collect())
            .collect();
        Ok(CorrelationImage {
            xs,
            ys,
            values,
            order: setup.order,
            normalized: normalize,
            peak,
            config: self.config,
            setup: setup.clone(),
            quadrature: sources.iter().filter_map(Source::diagnostics).collect(),
        })
    }

    pub fn scan_2d(
        &self,
        order: usize,
        standoff: f64,
        x_axis: &ScanAxis,
        y_axis: &ScanAxis,
        normalize: bool,
    ) -> Result<CorrelationImage> {
        self.image(
            &ScanSetup::preset(order, standoff),
            x_axis,
            y_axis,
            normalize,
        )
    }

    /// Single amplitude `U(r, R)` along an `x` scan for one emitter.
    pub fn field_line(
        &self,
        emitter: Point3,
        axis: &ScanAxis,
        scan_y: f64,
    ) -> Result<Vec<(f64, num_complex::Complex64)>> {
        axis.validate("scan.x_range")?;
        let source = crate::diffraction::SourceField::new(emitter, &self.config, &self.quad)?;
        let xs = axis.points();
        let rz = self.config.detector_z;
        self.pool.install(|| {
            xs.par_iter()
                .map(|&x| Ok((x, source.amplitude(&Point3::new(x, scan_y, rz))?)))
                .collect()
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetric_axis_is_exactly_symmetric() {
        let axis = ScanAxis::symmetric(1000.0, 401).unwrap();
        let p = axis.points();
        assert_eq!(p.len(), 401);
        assert_eq!(p[0], -1000.0);
        assert_eq!(p[400], 1000.0);
        assert_eq!(p[200], 0.0);
        for i in 0..401 {
            assert_eq!(p[i], -p[400 - i]);
        }
        assert!(p.windows(2).all(|w| w[0] < w[1]));
        assert!((p[1] - p[0] - 5.0).abs() < 1e-12);
        assert!(ScanAxis::new(1.0, 1.0, 4).is_err());
        assert!(ScanAxis::new(-1.0, 1.0, 1).is_err());
        assert_eq!(
            ScanAxis::new(-1.0, 1.0, 2).unwrap().points(),
            vec![-1.0, 1.0]
        );
    }

    #[test]
    fn detector_modes_place_stationary_detectors() {
        let config = SetupConfig::default();
        let shift = detector_shift(&config);
        let setup = ScanSetup {
            detector_mode: DetectorMode::TwoMovingTwoFixed,
            ..ScanSetup::preset(4, 0.1)
        };
        let d = setup.detectors(40.0, 3.0, &config).unwrap();
        let xs: Vec<(f64, f64)> = d.positions().iter().map(|p| (p.x, p.y)).collect();
        assert_eq!(
            xs,
            vec![(40.0, 3.0), (-40.0, 3.0), (shift, 0.0), (shift / 2.0, 0.0)]
        );
        assert_eq!(d.moving, vec![true, true, false, false]);

        let setup = ScanSetup {
            detector_mode: DetectorMode::OneMovingThreeFixed,
            ..ScanSetup::preset(4, 0.1)
        };
        let d = setup.detectors(-7.0, 0.0, &config).unwrap();
        let xs: Vec<f64> = d.positions().iter().map(|p| p.x).collect();
        assert_eq!(xs, vec![-7.0, 0.0, shift, shift / 2.0]);

        let bad = ScanSetup {
            detector_mode: DetectorMode::OneMovingThreeFixed,
            ..ScanSetup::preset(2, 0.1)
        };
        assert!(bad.validate(&config).is_err());
        let bad = ScanSetup {
            fixed_x: Some(vec![1.0]),
            detector_mode: DetectorMode::TwoMovingTwoFixed,
            ..ScanSetup::preset(4, 0.1)
        };
        assert!(bad.validate(&config).is_err());
    }

    #[test]
    fn setup_validation() {
        let config = SetupConfig::default();
        assert_eq!(
            ScanSetup::preset(3, 0.1).validate(&config),
            Err(Error::UnsupportedOrder(3))
        );
        let pw = ScanSetup {
            order: 2,
            ..ScanSetup::far_field()
        };
        assert!(pw.validate(&config).is_err());
        let custom = ScanSetup {
            emitter_x: Some(vec![0.0, 0.3]),
            ..ScanSetup::preset(2, 0.1)
        };
        assert!(custom.validate(&config).is_ok());
        let custom = ScanSetup {
            emitter_x: Some(vec![0.0]),
            ..ScanSetup::preset(2, 0.1)
        };
        assert!(custom.validate(&config).is_err());
    }

    #[test]
    fn far_field_curve_is_even_and_normalized() {
        let imager =
            Imager::new(SetupConfig::default(), QuadratureSpec::default(), Some(2)).unwrap();
        let axis = ScanAxis::symmetric(1000.0, 401).unwrap();
        let c = imager
            .curve(&ScanSetup::far_field(), &axis, 0.0, true)
            .unwrap();
        assert_eq!(c.values.iter().cloned().fold(0.0, f64::max), 1.0);
        assert_eq!(c.values[200], 1.0);
        for i in 0..401 {
            assert_eq!(c.values[i], c.values[400 - i]);
            assert!(c.values[i] >= 0.0);
        }
        assert!(c.quadrature.is_empty());
    }

    #[test]
    fn two_point_scan_is_valid() {
        let imager =
            Imager::new(SetupConfig::default(), QuadratureSpec::default(), Some(1)).unwrap();
        let axis = ScanAxis::symmetric(100.0, 2).unwrap();
        let c = imager.scan_1d(2, 0.1, &axis, false).unwrap();
        assert_eq!(c.len(), 2);
        assert_eq!(c.values[0], c.values[1]);
    }

    #[test]
    fn degenerate_image_grid() {
        let imager =
            Imager::new(SetupConfig::default(), QuadratureSpec::default(), Some(2)).unwrap();
        let x = ScanAxis::symmetric(300.0, 2).unwrap();
        let y = ScanAxis::symmetric(100.0, 2).unwrap();
        let img = imager.scan_2d(1, 0.1, &x, &y, false).unwrap();
        assert_eq!(img.values.len(), 2);
        assert!(img.values.iter().all(|r| r.len() == 2));
        assert_eq!(img.values[0], img.values[1]);
    }
}
