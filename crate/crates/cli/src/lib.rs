//! Command-line front end: configuration, figure presets, file emitters and
//! run manifests for the `superres` binary.

pub mod config;
pub mod error;
pub mod output;
pub mod presets;
pub mod run;

use std::path::PathBuf;

pub use config::{load_config, parse_config, RunConfig};
pub use error::CliError;
pub use presets::Figure;
pub use run::{execute, Command, Outcome, RunManifest};

/// Command-line settings layered over the config file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub figure: Option<Figure>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub tolerance: Option<f64>,
    pub normalize: bool,
    pub png: bool,
    pub emitter_distance: Option<f64>,
}

/// Defaults, then the config file, then the figure preset, then flags.
pub fn resolve_config(o: &Overrides) -> Result<RunConfig, CliError> {
    let mut config = match &o.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(f) = o.figure {
        f.apply(&mut config);
    }
    if let Some(dir) = &o.out {
        config.output.dir = dir.clone();
    }
    if o.threads.is_some() {
        config.threads = o.threads;
    }
    if let Some(t) = o.tolerance {
        config.quadrature.tolerance = t;
    }
    if o.normalize {
        config.output.normalize = true;
    }
    if o.png {
        config.output.png = true;
    }
    if let Some(m) = o.emitter_distance {
        config.scan.emitter_distance = Some(m);
    }
    config.validate()?;
    Ok(config)
}
