use super::*;
use crate::correlation::{correlation_from_matrix, emitter_sources, matrix_from_sources};
use crate::geometry::{detector_positions, emitter_positions};

fn imager() -> Imager {
    Imager::new(SetupConfig::default(), QuadratureSpec::default(), Some(2)).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

#[test]
fn single_emitter_curve_is_even_and_nonnegative() {
    let axis = ScanAxis::symmetric(1000.0, 101).unwrap();
    let c = imager().scan_1d(1, 0.1, &axis, false).unwrap();
    let n = c.len();
    for i in 0..n {
        assert!(c.values[i] >= 0.0);
        assert!(
            rel(c.values[i], c.values[n - 1 - i]) <= 1e-9,
            "x = {}",
            c.scan_x[i]
        );
    }
    assert!(c.scan_x.windows(2).all(|w| w[0] < w[1]));
}

#[test]
fn image_is_even_in_y() {
    let x = ScanAxis::symmetric(1000.0, 21).unwrap();
    let y = ScanAxis::symmetric(500.0, 11).unwrap();
    let img = imager().scan_2d(2, 0.1, &x, &y, false).unwrap();
    let ny = img.ys.len();
    for iy in 0..ny {
        for ix in 0..img.xs.len() {
            let (a, b) = (img.values[iy][ix], img.values[ny - 1 - iy][ix]);
            assert!(a >= 0.0);
            assert!(rel(a, b) <= 1e-9, "({}, {})", img.xs[ix], img.ys[iy]);
        }
    }
}

#[test]
fn image_rows_match_line_scans() {
    let im = imager();
    let x = ScanAxis::symmetric(800.0, 17).unwrap();
    let y = ScanAxis::symmetric(300.0, 3).unwrap();
    let img = im.scan_2d(2, 0.1, &x, &y, false).unwrap();
    for (iy, &sy) in img.ys.iter().enumerate() {
        let row = im.curve(&ScanSetup::preset(2, 0.1), &x, sy, false).unwrap();
        assert_eq!(row.values, img.values[iy]);
    }
}

#[test]
fn normalized_curves_peak_at_one() {
    let axis = ScanAxis::symmetric(1000.0, 41).unwrap();
    for n in [1, 2, 4] {
        let c = imager().scan_1d(n, 0.1, &axis, true).unwrap();
        assert_eq!(c.values.iter().cloned().fold(0.0, f64::max), 1.0);
        assert!(c.values.iter().all(|&v| v >= 0.0));
    }
}

#[test]
fn curve_values_match_direct_evaluation() {
    let config = SetupConfig::default();
    let quad = QuadratureSpec::default();
    let axis = ScanAxis::symmetric(600.0, 7).unwrap();
    let c = imager().scan_1d(4, 0.1, &axis, false).unwrap();
    let emitters = emitter_positions(4, &config, 0.1).unwrap();
    let sources = emitter_sources(&emitters, &config, &quad).unwrap();
    for (x, v) in c.scan_x.iter().zip(&c.values) {
        let d = detector_positions(4, *x, 0.0, &config).unwrap();
        let m = matrix_from_sources(d.positions(), &sources).unwrap();
        assert_eq!(correlation_from_matrix(&m).unwrap().value, *v);
    }
}

#[test]
fn four_moving_mode_is_the_standard_scan() {
    let im = imager();
    let axis = ScanAxis::symmetric(1000.0, 33).unwrap();
    let a = im
        .sweep_detector_modes(DetectorMode::FourMoving, None, 0.1, &axis, true)
        .unwrap();
    let b = im.scan_1d(4, 0.1, &axis, true).unwrap();
    assert_eq!(a.values, b.values);
}

#[test]
fn far_standoff_loses_resolution() {
    let im = imager();
    let axis = ScanAxis::symmetric(1000.0, 201).unwrap();
    let near = contrast(
        &im.scan_1d(2, 0.1, &axis, true).unwrap(),
        &ContrastOptions::default(),
    )
    .unwrap();
    let far = contrast(
        &im.scan_1d(2, 1.0, &axis, true).unwrap(),
        &ContrastOptions::default(),
    )
    .unwrap();
    assert!(near.resolved);
    assert!(!far.resolved);
    let [l, r] = near.lobes.unwrap();
    assert_eq!(l, -r);
}

#[test]
fn distance_sweep_shape() {
    let im = imager();
    let axis = ScanAxis::symmetric(1000.0, 201).unwrap();
    let pts = im
        .sweep_emitter_distance(&[1.0, 15.0], 0.1, &axis, &ContrastOptions::default())
        .unwrap();
    assert!(pts[0].report.resolved);
    assert!(pts[1].report.depth < 0.05);
    assert!((pts[1].separation - 15.0 / 45.0).abs() < 1e-15);
}

#[test]
fn sweep_matrix_covers_cross_product() {
    let im = imager();
    let axis = ScanAxis::symmetric(1000.0, 41).unwrap();
    let m = im
        .sweep_standoff_order(
            &[1, 2],
            &[0.1, 0.5, 1.0],
            &axis,
            &ContrastOptions::default(),
        )
        .unwrap();
    assert_eq!(m.reports.len(), 2);
    assert!(m.reports.iter().all(|r| r.len() == 3));
    assert!(m.depth(2, 0.5).is_some());
    assert!(im
        .sweep_standoff_order(&[], &[0.1], &axis, &ContrastOptions::default())
        .is_err());
}
