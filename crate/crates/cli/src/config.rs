//! Run configuration: JSON schema, defaults and validation.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use superres_core::diffraction::Illumination;
use superres_core::geometry::delta_scale;
use superres_core::imaging::{ContrastOptions, DetectorMode, ScanAxis, ScanSetup};
use superres_core::{QuadratureSpec, SetupConfig};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeometryConfig {
    pub aperture_radius: f64,
    pub aperture_gap: f64,
    pub epsilon: f64,
    pub detector_z: f64,
}

impl Default for GeometryConfig {
    fn default() -> Self {
        let s = SetupConfig::default();
        Self {
            aperture_radius: s.aperture_radius,
            aperture_gap: s.aperture_gap,
            epsilon: s.standoff,
            detector_z: s.detector_z,
        }
    }
}

impl GeometryConfig {
    pub fn setup(&self) -> SetupConfig {
        SetupConfig {
            aperture_radius: self.aperture_radius,
            aperture_gap: self.aperture_gap,
            standoff: self.epsilon,
            detector_z: self.detector_z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub order: usize,
    pub illumination: Illumination,
    pub x_range: [f64; 2],
    /// Samples along `x` for 1-D scans.
    pub x_samples: usize,
    /// Samples along `x` for 2-D images.
    pub image_x_samples: usize,
    pub y_range: [f64; 2],
    pub y_samples: usize,
    /// Constant `y` of 1-D scans.
    pub scan_y: f64,
    /// Explicit emitter x-positions, overriding the placement preset.
    pub emitter_x: Option<Vec<f64>>,
    /// Two emitters at `[0, m·δ]`; requires `order = 2`.
    pub emitter_distance: Option<f64>,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            order: 2,
            illumination: Illumination::NearField,
            x_range: [-1000.0, 1000.0],
            x_samples: 401,
            image_x_samples: 201,
            y_range: [-500.0, 500.0],
            y_samples: 101,
            scan_y: 0.0,
            emitter_x: None,
            emitter_distance: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub orders: Vec<usize>,
    pub standoffs: Vec<f64>,
    /// Emitter separations in units of `δ`.
    pub multipliers: Vec<f64>,
    pub detector_mode: DetectorMode,
    /// Stationary detector x-positions; `null` uses the four-detector preset at scan 0.
    pub fixed_positions: Option<Vec<f64>>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            orders: vec![1, 2, 4],
            standoffs: vec![0.1, 0.25, 1.0],
            multipliers: vec![1.0, 5.0, 10.0, 15.0],
            detector_mode: DetectorMode::TwoMovingTwoFixed,
            fixed_positions: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Divide curves by their maximum before writing.
    pub normalize: bool,
    /// Also write a PNG next to every PGM.
    pub png: bool,
}

impl Default for OutputConfig {
    fn default() -> Self {
        Self {
            dir: PathBuf::from("superres-out"),
            normalize: false,
            png: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub geometry: GeometryConfig,
    pub scan: ScanConfig,
    pub quadrature: QuadratureSpec,
    pub contrast: ContrastOptions,
    pub sweep: SweepConfig,
    pub output: OutputConfig,
    /// Worker threads; `null` uses every available core.
    pub threads: Option<usize>,
}

fn axis(range: [f64; 2], samples: usize, field: &str) -> Result<ScanAxis, CliError> {
    let a = ScanAxis {
        lo: range[0],
        hi: range[1],
        samples,
    };
    a.validate(field)?;
    Ok(a)
}

impl RunConfig {
    pub fn setup(&self) -> SetupConfig {
        self.geometry.setup()
    }

    pub fn x_axis(&self) -> Result<ScanAxis, CliError> {
        axis(self.scan.x_range, self.scan.x_samples, "scan.x_range")
    }

    pub fn image_x_axis(&self) -> Result<ScanAxis, CliError> {
        axis(
            self.scan.x_range,
            self.scan.image_x_samples,
            "scan.image_x_samples",
        )
    }

    pub fn y_axis(&self) -> Result<ScanAxis, CliError> {
        axis(self.scan.y_range, self.scan.y_samples, "scan.y_range")
    }

    /// The scan described by the `scan` block.
    pub fn scan_setup(&self) -> Result<ScanSetup, CliError> {
        let setup = self.setup();
        let mut scan = ScanSetup {
            illumination: self.scan.illumination,
            emitter_x: self.scan.emitter_x.clone(),
            ..ScanSetup::preset(self.scan.order, self.geometry.epsilon)
        };
        if let Some(m) = self.scan.emitter_distance {
            if self.scan.order != 2 {
                return Err(CliError::config(
                    "scan.emitter_distance",
                    format!("requires order 2, got {}", self.scan.order),
                ));
            }
            if self.scan.emitter_x.is_some() {
                return Err(CliError::config(
                    "scan.emitter_distance",
                    "conflicts with scan.emitter_x",
                ));
            }
            if !(m.is_finite() && m >= 0.0) {
                return Err(CliError::config(
                    "scan.emitter_distance",
                    format!("must be >= 0, got {m}"),
                ));
            }
            let delta = delta_scale(self.geometry.epsilon, &setup, None)?;
            scan.emitter_x = Some(vec![0.0, m * delta]);
        }
        scan.validate(&setup)?;
        Ok(scan)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        self.setup().validate()?;
        self.quadrature.validate()?;
        self.contrast.validate()?;
        if self.threads == Some(0) {
            return Err(CliError::config("threads", "must be >= 1"));
        }
        self.x_axis()?;
        self.image_x_axis()?;
        self.y_axis()?;
        self.scan_setup()?;
        for (i, &o) in self.sweep.orders.iter().enumerate() {
            superres_core::geometry::detector_positions(o, 0.0, 0.0, &self.setup())
                .map_err(|e| CliError::config(format!("sweep.orders[{i}]"), e.to_string()))?;
        }
        for (i, &s) in self.sweep.standoffs.iter().enumerate() {
            if !(s.is_finite() && s > 0.0) {
                return Err(CliError::config(
                    format!("sweep.standoffs[{i}]"),
                    format!("must be > 0, got {s}"),
                ));
            }
        }
        for (i, &m) in self.sweep.multipliers.iter().enumerate() {
            if !(m.is_finite() && m >= 0.0) {
                return Err(CliError::config(
                    format!("sweep.multipliers[{i}]"),
                    format!("must be >= 0, got {m}"),
                ));
            }
        }
        if let Some(fixed) = &self.sweep.fixed_positions {
            let want = 4 - self.sweep.detector_mode.moving();
            if fixed.len() != want {
                return Err(CliError::config(
                    "sweep.fixed_positions",
                    format!(
                        "{:?} needs {want} positions, got {}",
                        self.sweep.detector_mode,
                        fixed.len()
                    ),
                ));
            }
        }
        Ok(())
    }
}

/// Parse and validate a config document. A run manifest is accepted too;
/// its embedded `config` is used.
pub fn parse_config(text: &str) -> Result<RunConfig, CliError> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| CliError::config("<document>", e.to_string()))?;
    let value = match value {
        serde_json::Value::Object(mut map)
            if map.contains_key("tool_version") && map.contains_key("config") =>
        {
            map.remove("config").expect("checked above")
        }
        other => other,
    };
    let config: RunConfig = serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        CliError::config(
            if path == "." {
                "<document>".to_string()
            } else {
                path
            },
            e.into_inner().to_string(),
        )
    })?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Io {
        path: path.to_path_buf(),
        source: e,
    })?;
    parse_config(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn field_of(err: CliError) -> String {
        match err {
            CliError::Config { field, .. } => field,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn empty_object_gives_defaults() {
        let c = parse_config("{}").unwrap();
        assert_eq!(c, RunConfig::default());
        assert_eq!(c.geometry.aperture_radius, 0.5);
        assert_eq!(c.geometry.aperture_gap, 0.25);
        assert_eq!(c.geometry.epsilon, 0.1);
        assert_eq!(c.geometry.detector_z, 500.0);
        assert_eq!(c.scan.order, 2);
    }

    #[test]
    fn negative_epsilon_names_field() {
        let err = parse_config(r#"{"geometry": {"epsilon": -1}}"#).unwrap_err();
        assert!(err.to_string().contains("geometry.epsilon"), "{err}");
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn order_three_is_rejected() {
        let err = parse_config(r#"{"scan": {"order": 3}}"#).unwrap_err();
        assert!(
            err.to_string().contains("placement undefined for N=3"),
            "{err}"
        );
    }

    #[test]
    fn unknown_keys_rejected_with_path() {
        let err = parse_config(r#"{"geometry": {"radius": 1}}"#).unwrap_err();
        assert_eq!(field_of(err), "geometry.radius");
        let err = parse_config(r#"{"quadrature": {"order": "x"}}"#).unwrap_err();
        assert_eq!(field_of(err), "quadrature.order");
        assert!(parse_config(r#"{"bogus": 1}"#).is_err());
        assert!(parse_config("not json").is_err());
    }

    #[test]
    fn detector_too_close() {
        let err = parse_config(r#"{"geometry": {"detector_z": 100}}"#).unwrap_err();
        assert_eq!(field_of(err), "geometry.detector_z");
    }

    #[test]
    fn emitter_distance_places_pair() {
        let c = parse_config(r#"{"scan": {"emitter_distance": 15}}"#).unwrap();
        let s = c.scan_setup().unwrap();
        let x = s.emitter_x.unwrap();
        assert_eq!(x[0], 0.0);
        assert!((x[1] - 15.0 / 45.0).abs() < 1e-15);
        assert!(parse_config(r#"{"scan": {"order": 1, "emitter_distance": 2}}"#).is_err());
    }

    #[test]
    fn config_round_trips_through_json() {
        let c = parse_config(r#"{"scan": {"order": 4, "x_samples": 33}, "threads": 3}"#).unwrap();
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(parse_config(&text).unwrap(), c);
    }
}
