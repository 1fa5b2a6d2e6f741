//! Parameter sweeps built from repeated 1-D scans.

use serde::{Deserialize, Serialize};

use super::{
    contrast, ContrastOptions, ContrastReport, CorrelationCurve, DetectorMode, Imager, ScanAxis,
    ScanSetup,
};
use crate::error::{Error, Result};
use crate::geometry::delta_scale;

/// Contrast for every `(order, standoff)` pair; `reports[i][j]` is `orders[i]` at `standoffs[j]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepMatrix {
    pub orders: Vec<usize>,
    pub standoffs: Vec<f64>,
    pub reports: Vec<Vec<ContrastReport>>,
    pub curves: Vec<Vec<CorrelationCurve>>,
}

impl SweepMatrix {
    pub fn depth(&self, order: usize, standoff: f64) -> Option<f64> {
        let i = self.orders.iter().position(|&o| o == order)?;
        let j = self.standoffs.iter().position(|&s| s == standoff)?;
        Some(self.reports[i][j].depth)
    }
}

/// One point of the emitter-separation sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistancePoint {
    pub multiplier: f64,
    /// `ΔR_x = multiplier · δ`.
    pub separation: f64,
    pub report: ContrastReport,
    pub curve: CorrelationCurve,
}

impl Imager {
    pub fn sweep_standoff_order(
        &self,
        orders: &[usize],
        standoffs: &[f64],
        axis: &ScanAxis,
        options: &ContrastOptions,
    ) -> Result<SweepMatrix> {
        if orders.is_empty() {
            return Err(Error::invalid("sweep.orders", "must not be empty"));
        }
        if standoffs.is_empty() {
            return Err(Error::invalid("sweep.standoffs", "must not be empty"));
        }
        let mut reports = Vec::with_capacity(orders.len());
        let mut curves = Vec::with_capacity(orders.len());
        for &order in orders {
            let mut row_r = Vec::with_capacity(standoffs.len());
            let mut row_c = Vec::with_capacity(standoffs.len());
            for &eps in standoffs {
                let curve = self.scan_1d(order, eps, axis, true)?;
                row_r.push(contrast(&curve, options)?);
                row_c.push(curve);
            }
            reports.push(row_r);
            curves.push(row_c);
        }
        Ok(SweepMatrix {
            orders: orders.to_vec(),
            standoffs: standoffs.to_vec(),
            reports,
            curves,
        })
    }

    /// Two emitters at `[0, m·δ]` for each multiplier `m`, scanned with `G(2)`.
    pub fn sweep_emitter_distance(
        &self,
        multipliers: &[f64],
        standoff: f64,
        axis: &ScanAxis,
        options: &ContrastOptions,
    ) -> Result<Vec<DistancePoint>> {
        if multipliers.is_empty() {
            return Err(Error::invalid("sweep.multipliers", "must not be empty"));
        }
        let delta = delta_scale(standoff, self.config(), None)?;
        multipliers
            .iter()
            .map(|&m| {
                if !(m.is_finite() && m >= 0.0) {
                    return Err(Error::invalid(
                        "sweep.multipliers",
                        format!("must be finite and >= 0, got {m}"),
                    ));
                }
                let setup = ScanSetup {
                    emitter_x: Some(vec![0.0, m * delta]),
                    ..ScanSetup::preset(2, standoff)
                };
                let curve = self.curve(&setup, axis, 0.0, true)?;
                Ok(DistancePoint {
                    multiplier: m,
                    separation: m * delta,
                    report: contrast(&curve, options)?,
                    curve,
                })
            })
            .collect()
    }

    /// `G(4)` with the four-emitter preset, scanning only the moving detectors.
    /// `fixed = None` uses [`DetectorMode::default_fixed`].
    pub fn sweep_detector_modes(
        &self,
        mode: DetectorMode,
        fixed: Option<Vec<f64>>,
        standoff: f64,
        axis: &ScanAxis,
        normalize: bool,
    ) -> Result<CorrelationCurve> {
        let setup = ScanSetup {
            detector_mode: mode,
            fixed_x: fixed,
            ..ScanSetup::preset(4, standoff)
        };
        self.curve(&setup, axis, 0.0, normalize)
    }
}
