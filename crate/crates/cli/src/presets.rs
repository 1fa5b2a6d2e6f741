//! Parameter sets reproducing the published figures.

use clap::ValueEnum;
use serde::{Deserialize, Serialize};
use superres_core::diffraction::Illumination;
use superres_core::imaging::DetectorMode;

use crate::config::RunConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
pub enum Figure {
    /// Far-zone G1 through the double aperture.
    #[value(name = "2a")]
    #[serde(rename = "2a")]
    Fig2a,
    /// Near-field G1, standoff λ/10.
    #[value(name = "2b")]
    #[serde(rename = "2b")]
    Fig2b,
    /// Near-field G2, standoff λ/10.
    #[value(name = "2c")]
    #[serde(rename = "2c")]
    Fig2c,
    /// Near-field G4, standoff λ/10.
    #[value(name = "2d")]
    #[serde(rename = "2d")]
    Fig2d,
    /// Order × standoff matrix.
    #[value(name = "3")]
    #[serde(rename = "3")]
    Fig3,
    /// Two-emitter images versus emitter separation.
    #[value(name = "s2")]
    #[serde(rename = "s2")]
    S2,
    /// G4 with two moving detectors.
    #[value(name = "s4a")]
    #[serde(rename = "s4a")]
    S4a,
    /// G4 with one moving detector.
    #[value(name = "s4c")]
    #[serde(rename = "s4c")]
    S4c,
}

impl Figure {
    /// Overwrite the fields this figure pins down; everything else is kept.
    pub fn apply(self, config: &mut RunConfig) {
        let g = &mut config.geometry;
        g.aperture_radius = 0.5;
        g.aperture_gap = 0.25;
        g.detector_z = 500.0;
        g.epsilon = 0.1;
        let s = &mut config.scan;
        s.illumination = Illumination::NearField;
        s.x_range = [-1000.0, 1000.0];
        s.x_samples = 401;
        s.scan_y = 0.0;
        s.emitter_x = None;
        s.emitter_distance = None;
        match self {
            Figure::Fig2a => {
                s.order = 1;
                s.illumination = Illumination::PlaneWave;
            }
            Figure::Fig2b => s.order = 1,
            Figure::Fig2c => s.order = 2,
            Figure::Fig2d => s.order = 4,
            Figure::Fig3 => {
                config.sweep.orders = vec![1, 2, 4];
                config.sweep.standoffs = vec![0.1, 0.25, 1.0];
            }
            Figure::S2 => {
                s.order = 2;
                s.image_x_samples = 201;
                s.y_range = [-500.0, 500.0];
                s.y_samples = 101;
                config.sweep.multipliers = vec![1.0, 5.0, 10.0, 15.0];
            }
            Figure::S4a => {
                s.order = 4;
                config.sweep.detector_mode = DetectorMode::TwoMovingTwoFixed;
                config.sweep.fixed_positions = None;
            }
            Figure::S4c => {
                s.order = 4;
                config.sweep.detector_mode = DetectorMode::OneMovingThreeFixed;
                config.sweep.fixed_positions = None;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_preset_validates() {
        for f in Figure::value_variants() {
            let mut c = RunConfig::default();
            f.apply(&mut c);
            c.validate().unwrap();
        }
    }

    #[test]
    fn far_field_preset() {
        let mut c = RunConfig::default();
        Figure::Fig2a.apply(&mut c);
        assert_eq!(c.scan.order, 1);
        assert_eq!(c.scan.illumination, Illumination::PlaneWave);
    }
}
