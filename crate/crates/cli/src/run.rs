//! Subcommand execution and run manifests.

use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use superres_core::diffraction::{farfield_amplitude, Illumination, SourceDiagnostics};
use superres_core::imaging::{contrast, shape_similarity, ContrastReport, DetectorMode, Imager};
use superres_core::spectrum::weyl_reconstruct;
use superres_core::{CorrelationCurve, Point3};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::output;
use crate::presets::Figure;

/// Largest relative error accepted by `weyl-check`.
pub const WEYL_LIMIT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "name")]
pub enum Command {
    Field,
    Scan1d,
    Scan2d,
    SweepDistance,
    SweepMatrix,
    SweepDetectors,
    WeylCheck {
        epsilon: f64,
        kmax: f64,
        grid_order: usize,
    },
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Field => "field",
            Command::Scan1d => "scan1d",
            Command::Scan2d => "scan2d",
            Command::SweepDistance => "sweep_distance",
            Command::SweepMatrix => "sweep_matrix",
            Command::SweepDetectors => "sweep_detectors",
            Command::WeylCheck { .. } => "weyl_check",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScanDiagnostics {
    pub label: String,
    pub sources: Vec<SourceDiagnostics>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub stage: String,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub tool: String,
    pub tool_version: String,
    pub command: Command,
    pub figure: Option<Figure>,
    /// `ok` or `failed`.
    pub status: String,
    pub error: Option<String>,
    pub config: RunConfig,
    pub threads_used: usize,
    pub diagnostics: Vec<ScanDiagnostics>,
    pub timings: Vec<Timing>,
    pub total_seconds: f64,
    pub results: Map<String, Value>,
    pub outputs: Vec<PathBuf>,
}

impl RunManifest {
    pub fn path(&self) -> PathBuf {
        self.config
            .output
            .dir
            .join(format!("{}.manifest.json", self.command.name()))
    }
}

struct Run {
    manifest: RunManifest,
    started: Instant,
    lines: Vec<String>,
}

impl Run {
    fn stage<T>(
        &mut self,
        name: &str,
        f: impl FnOnce() -> Result<T, CliError>,
    ) -> Result<T, CliError> {
        let t = Instant::now();
        let out = f();
        self.manifest.timings.push(Timing {
            stage: name.to_string(),
            seconds: t.elapsed().as_secs_f64(),
        });
        out
    }

    fn file(&mut self, name: &str) -> PathBuf {
        let path = self.manifest.config.output.dir.join(name);
        self.manifest.outputs.push(path.clone());
        path
    }

    fn text(&mut self, name: &str, text: &str) -> Result<(), CliError> {
        let path = self.file(name);
        output::write_text(&path, text)
    }

    fn result(&mut self, key: &str, value: Value) {
        self.manifest.results.insert(key.to_string(), value);
    }

    fn diagnostics(&mut self, label: &str, curve_sources: &[SourceDiagnostics]) {
        self.manifest.diagnostics.push(ScanDiagnostics {
            label: label.to_string(),
            sources: curve_sources.to_vec(),
        });
    }

    fn curve(&mut self, name: &str, curve: &CorrelationCurve) -> Result<(), CliError> {
        self.diagnostics(name, &curve.quadrature);
        self.text(&format!("{name}.csv"), &output::curve_csv(curve))
    }
}

/// Shortest round-trip representation.
fn num(v: f64) -> String {
    format!("{v:?}")
}

fn report_json(r: &ContrastReport) -> Value {
    serde_json::to_value(r).expect("contrast report serializes")
}

/// Outcome of a finished (or failed) run: the manifest and, on failure, the error.
pub struct Outcome {
    pub manifest: RunManifest,
    pub summary: Vec<String>,
    pub error: Option<CliError>,
}

impl Outcome {
    pub fn exit_code(&self) -> i32 {
        self.error.as_ref().map_or(0, CliError::exit_code)
    }
}

/// Execute `command` and write its outputs and manifest. The manifest is
/// written even when the computation fails.
pub fn execute(command: Command, config: RunConfig, figure: Option<Figure>) -> Outcome {
    let mut run = Run {
        manifest: RunManifest {
            tool: env!("CARGO_PKG_NAME").to_string(),
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            command,
            figure,
            status: "ok".into(),
            error: None,
            config,
            threads_used: 0,
            diagnostics: Vec::new(),
            timings: Vec::new(),
            total_seconds: 0.0,
            results: Map::new(),
            outputs: Vec::new(),
        },
        started: Instant::now(),
        lines: Vec::new(),
    };
    let mut error = dispatch(&mut run, command).err();
    run.manifest.total_seconds = run.started.elapsed().as_secs_f64();
    if let Some(e) = &error {
        run.manifest.status = "failed".into();
        run.manifest.error = Some(e.to_string());
    }
    let path = run.manifest.path();
    if let Err(e) = output::write_json(&path, &run.manifest) {
        error.get_or_insert(e);
    } else {
        run.lines.push(format!("manifest {}", path.display()));
    }
    Outcome {
        manifest: run.manifest,
        summary: run.lines,
        error,
    }
}

fn dispatch(run: &mut Run, command: Command) -> Result<(), CliError> {
    let config = run.manifest.config.clone();
    config.validate()?;
    if let Command::WeylCheck {
        epsilon,
        kmax,
        grid_order,
    } = command
    {
        return weyl_check(run, epsilon, kmax, grid_order);
    }
    let imager = Imager::new(config.setup(), config.quadrature, config.threads)?;
    run.manifest.threads_used = imager.threads();
    match command {
        Command::Field => field(run, &config, &imager),
        Command::Scan1d => scan1d(run, &config, &imager),
        Command::Scan2d => scan2d(run, &config, &imager),
        Command::SweepDistance => sweep_distance(run, &config, &imager),
        Command::SweepMatrix => sweep_matrix(run, &config, &imager),
        Command::SweepDetectors => sweep_detectors(run, &config, &imager),
        Command::WeylCheck { .. } => unreachable!("handled above"),
    }
}

fn field(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let setup = config.scan_setup()?;
    let axis = config.x_axis()?;
    let y = config.scan.scan_y;
    let z = config.geometry.detector_z;
    let mut rows = Vec::new();
    run.stage("field", || {
        match setup.illumination {
            Illumination::PlaneWave => {
                for x in axis.points() {
                    let u = farfield_amplitude(&Point3::new(x, y, z), imager.config());
                    rows.push(vec![
                        num(x),
                        "0".into(),
                        num(u.re),
                        num(u.im),
                        num(u.norm_sqr()),
                    ]);
                }
            }
            Illumination::NearField => {
                let emitters = setup.emitters(imager.config())?;
                for (mu, e) in emitters.positions().iter().enumerate() {
                    for (x, u) in imager.field_line(*e, &axis, y)? {
                        rows.push(vec![
                            num(x),
                            mu.to_string(),
                            num(u.re),
                            num(u.im),
                            num(u.norm_sqr()),
                        ]);
                    }
                }
            }
        }
        Ok(())
    })?;
    let sources = imager.sources(&setup)?;
    let diags: Vec<SourceDiagnostics> = sources.iter().filter_map(|s| s.diagnostics()).collect();
    run.diagnostics("field", &diags);
    run.text(
        "field.csv",
        &output::table_csv("scan_x_lambda,emitter,re,im,intensity", &rows),
    )?;
    run.lines.push(format!("field: {} rows", rows.len()));
    Ok(())
}

fn scan1d(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let setup = config.scan_setup()?;
    let axis = config.x_axis()?;
    let curve = run.stage("scan1d", || {
        Ok(imager.curve(&setup, &axis, config.scan.scan_y, config.output.normalize)?)
    })?;
    run.curve("scan1d", &curve)?;
    run.result("peak", json!(curve.peak));
    if curve.len() >= superres_core::imaging::MIN_SAMPLES {
        let r = contrast(&curve, &config.contrast)?;
        run.result("contrast", report_json(&r));
        run.lines.push(format!(
            "scan1d: N={} depth {:.6} resolved={}",
            curve.order, r.depth, r.resolved
        ));
    } else {
        run.lines.push(format!(
            "scan1d: N={} ({} samples, contrast skipped)",
            curve.order,
            curve.len()
        ));
    }
    Ok(())
}

fn scan2d(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let setup = config.scan_setup()?;
    let (xa, ya) = (config.image_x_axis()?, config.y_axis()?);
    let image = run.stage("scan2d", || {
        Ok(imager.image(&setup, &xa, &ya, config.output.normalize)?)
    })?;
    run.diagnostics("scan2d", &image.quadrature);
    run.text("scan2d.csv", &output::image_csv(&image))?;
    let pgm = run.file("scan2d.pgm");
    output::write_pgm(&pgm, &image)?;
    if config.output.png {
        let png = run.file("scan2d.png");
        output::write_png(&png, &image)?;
    }
    run.result("peak", json!(image.peak));
    if let Some(m) = config.scan.emitter_distance {
        run.result("emitter_distance_delta", json!(m));
    }
    let row = image.row(image.central_row_index());
    if row.len() >= superres_core::imaging::MIN_SAMPLES {
        let r = contrast(&row, &config.contrast)?;
        run.result("central_row_y", json!(row.scan_y));
        run.result("contrast", report_json(&r));
        run.lines.push(format!(
            "scan2d: N={} {}x{} central-row depth {:.6} resolved={}",
            image.order,
            image.xs.len(),
            image.ys.len(),
            r.depth,
            r.resolved
        ));
    } else {
        run.lines.push(format!(
            "scan2d: N={} {}x{}",
            image.order,
            image.xs.len(),
            image.ys.len()
        ));
    }
    Ok(())
}

fn sweep_distance(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let axis = config.x_axis()?;
    let points = run.stage("sweep_distance", || {
        Ok(imager.sweep_emitter_distance(
            &config.sweep.multipliers,
            config.geometry.epsilon,
            &axis,
            &config.contrast,
        )?)
    })?;
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut table = Vec::new();
    for p in &points {
        rows.push(vec![
            num(p.multiplier),
            num(p.separation),
            num(p.report.depth),
            p.report.resolved.to_string(),
        ]);
        for (x, v) in p.curve.scan_x.iter().zip(&p.curve.values) {
            curves.push(vec![num(p.multiplier), num(*x), num(*v)]);
        }
        run.diagnostics(&format!("multiplier {}", p.multiplier), &p.curve.quadrature);
        table.push(json!({"multiplier": p.multiplier, "separation": p.separation, "contrast": report_json(&p.report)}));
        run.lines.push(format!(
            "  m={:<6} depth {:.6} resolved={}",
            p.multiplier, p.report.depth, p.report.resolved
        ));
    }
    run.result("sweep", Value::Array(table));
    run.text(
        "sweep_distance.csv",
        &output::table_csv("multiplier,separation_lambda,depth,resolved", &rows),
    )?;
    run.text(
        "sweep_distance_curves.csv",
        &output::table_csv("multiplier,scan_x_lambda,value", &curves),
    )?;
    run.lines.insert(0, "sweep-distance:".into());
    Ok(())
}

fn sweep_matrix(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let axis = config.x_axis()?;
    let m = run.stage("sweep_matrix", || {
        Ok(imager.sweep_standoff_order(
            &config.sweep.orders,
            &config.sweep.standoffs,
            &axis,
            &config.contrast,
        )?)
    })?;
    let mut rows = Vec::new();
    let mut curves = Vec::new();
    let mut table = Vec::new();
    run.lines.push("sweep-matrix:".into());
    for (i, order) in m.orders.iter().enumerate() {
        for (j, eps) in m.standoffs.iter().enumerate() {
            let r = &m.reports[i][j];
            rows.push(vec![
                order.to_string(),
                num(*eps),
                num(r.depth),
                r.resolved.to_string(),
            ]);
            let c = &m.curves[i][j];
            for (x, v) in c.scan_x.iter().zip(&c.values) {
                curves.push(vec![order.to_string(), num(*eps), num(*x), num(*v)]);
            }
            run.diagnostics(&format!("N={order} epsilon={eps}"), &c.quadrature);
            table.push(json!({"order": order, "epsilon": eps, "contrast": report_json(r)}));
            run.lines.push(format!(
                "  N={order} epsilon={eps:<5} depth {:.6} resolved={}",
                r.depth, r.resolved
            ));
        }
    }
    run.result("sweep", Value::Array(table));
    run.text(
        "sweep_matrix.csv",
        &output::table_csv("order,epsilon_lambda,depth,resolved", &rows),
    )?;
    run.text(
        "sweep_matrix_curves.csv",
        &output::table_csv("order,epsilon_lambda,scan_x_lambda,value", &curves),
    )?;
    Ok(())
}

fn sweep_detectors(run: &mut Run, config: &RunConfig, imager: &Imager) -> Result<(), CliError> {
    let axis = config.x_axis()?;
    let eps = config.geometry.epsilon;
    let mode = config.sweep.detector_mode;
    let fixed = config
        .sweep
        .fixed_positions
        .clone()
        .unwrap_or_else(|| mode.default_fixed(imager.config()));
    let curve = run.stage("sweep_detectors", || {
        Ok(imager.sweep_detector_modes(
            mode,
            Some(fixed.clone()),
            eps,
            &axis,
            config.output.normalize,
        )?)
    })?;
    let reference_order = match mode {
        DetectorMode::FourMoving => 4,
        m => m.moving(),
    };
    let reference = run.stage("reference", || {
        Ok(imager.scan_1d(reference_order, eps, &axis, config.output.normalize)?)
    })?;
    run.curve("sweep_detectors", &curve)?;
    run.curve("sweep_detectors_reference", &reference)?;
    let ncc = shape_similarity(&curve, &reference)?;
    run.result(
        "detector_mode",
        serde_json::to_value(mode).expect("mode serializes"),
    );
    run.result("fixed_positions", json!(fixed));
    run.result("reference_order", json!(reference_order));
    run.result("shape_similarity", json!(ncc));
    run.lines.push(format!(
        "sweep-detectors: {mode:?} vs G{reference_order} normalized cross-correlation {ncc:.6}"
    ));
    Ok(())
}

fn weyl_check(run: &mut Run, epsilon: f64, kmax: f64, grid_order: usize) -> Result<(), CliError> {
    let w = run.stage("weyl", || {
        Ok(weyl_reconstruct(
            &Point3::new(0.0, 0.0, -epsilon),
            (0.0, 0.0),
            kmax,
            grid_order,
        )?)
    })?;
    run.result("epsilon", json!(epsilon));
    run.result("kmax", json!(kmax));
    run.result("grid_order", json!(grid_order));
    run.result("relative_error", json!(w.relative_error));
    run.result("limit", json!(WEYL_LIMIT));
    let ok = w.relative_error <= WEYL_LIMIT;
    run.lines.push(format!(
        "weyl-check epsilon={epsilon} kmax={kmax} grid={grid_order} relative_error={:.3e} limit={WEYL_LIMIT:e} {}",
        w.relative_error,
        if ok { "ok" } else { "FAILED" }
    ));
    if ok {
        Ok(())
    } else {
        Err(CliError::Convergence(superres_core::Error::Domain(
            format!(
                "Weyl reconstruction error {:.3e} exceeds {WEYL_LIMIT:e}",
                w.relative_error
            ),
        )))
    }
}
