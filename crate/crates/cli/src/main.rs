use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use superres_cli::{execute, resolve_config, Command, Figure, Overrides};

#[derive(Parser, Debug)]
#[command(
    name = "superres",
    version,
    about = "Near-field and N-photon correlation imaging through a double aperture"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct Common {
    /// JSON run config (a previous run manifest also works)
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Reproduce a published figure's parameters
    #[arg(long, global = true, value_enum)]
    figure: Option<Figure>,
    /// Output directory
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Worker threads
    #[arg(long, global = true, env = "SUPERRES_THREADS")]
    threads: Option<usize>,
    /// Relative quadrature tolerance
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Max-normalize written curves
    #[arg(long, global = true)]
    normalize: bool,
    /// Also write PNG images
    #[arg(long, global = true)]
    png: bool,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Diffracted amplitude of every emitter along the x scan
    Field,
    /// 1-D correlation curve along x
    Scan1d,
    /// 2-D correlation image
    Scan2d {
        /// Two emitters at [0, m·δ]
        #[arg(long)]
        emitter_distance: Option<f64>,
    },
    /// Contrast versus emitter separation
    SweepDistance,
    /// Contrast for every order and standoff
    SweepMatrix,
    /// G4 with stationary detectors, compared to the lower-order curve
    SweepDetectors,
    /// Truncated angular-spectrum reconstruction of a spherical wave
    WeylCheck {
        #[arg(long, default_value_t = 0.5)]
        epsilon: f64,
        /// Cutoff in units of k
        #[arg(long, default_value_t = 8.0)]
        kmax: f64,
        /// Gauss-Legendre nodes per panel
        #[arg(long, default_value_t = 16)]
        grid_order: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut overrides = Overrides {
        config: cli.common.config,
        figure: cli.common.figure,
        out: cli.common.out,
        threads: cli.common.threads,
        tolerance: cli.common.tolerance,
        normalize: cli.common.normalize,
        png: cli.common.png,
        emitter_distance: None,
    };
    let command = match cli.command {
        Cmd::Field => Command::Field,
        Cmd::Scan1d => Command::Scan1d,
        Cmd::Scan2d { emitter_distance } => {
            overrides.emitter_distance = emitter_distance;
            Command::Scan2d
        }
        Cmd::SweepDistance => Command::SweepDistance,
        Cmd::SweepMatrix => Command::SweepMatrix,
        Cmd::SweepDetectors => Command::SweepDetectors,
        Cmd::WeylCheck {
            epsilon,
            kmax,
            grid_order,
        } => Command::WeylCheck {
            epsilon,
            kmax,
            grid_order,
        },
    };
    let config = match resolve_config(&overrides) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let outcome = execute(command, config, overrides.figure);
    for line in &outcome.summary {
        println!("{line}");
    }
    if let Some(e) = &outcome.error {
        eprintln!("error: {e}");
    }
    ExitCode::from(outcome.exit_code() as u8)
}
