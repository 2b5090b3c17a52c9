//! Command-line front end for thermfuse.
//!
//! [`run`] parses arguments, merges them over an optional config file and
//! dispatches to a subcommand. It returns the process exit status: 0 on
//! success, 1 when processing fails and 2 for usage errors.

mod commands;
mod watch;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::PathBuf;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use thermfuse::geometry::{Intrinsics, Pose};
use thermfuse::pipeline::{
    parse_finite, parse_interval, parse_intrinsics, parse_pose, ConfigError, RunConfig,
};

pub use watch::Watcher;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "thermfuse",
    version,
    about = "Thermal hotspot detection and depth fusion"
)]
pub struct Cli {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(subcommand)]
    pub command: Command,
}

/// Flags shared by every subcommand. Each may also come from `--config`.
#[derive(Debug, Default, Args)]
pub struct CommonArgs {
    /// Flat key=value file with defaults for the flags below
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Input path
    #[arg(long = "in", global = true, value_name = "PATH")]
    pub input: Option<PathBuf>,
    /// Output path (stdout when omitted)
    #[arg(long = "out", global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Camera intrinsics in pixels
    #[arg(long, global = true, value_name = "FX,FY,CX,CY", value_parser = parse_intrinsics)]
    pub intrinsics: Option<Intrinsics>,
    /// Depth along the optical axis, mm
    #[arg(long, global = true, value_name = "MM", value_parser = parse_finite, allow_negative_numbers = true)]
    pub depth: Option<f64>,
    /// Hotspot threshold, °C (strictly greater counts as hot)
    #[arg(long, global = true, value_name = "C", value_parser = parse_finite, allow_negative_numbers = true)]
    pub threshold: Option<f64>,
    /// Platform position in the world frame, mm
    #[arg(long, global = true, value_name = "X,Y,Z", value_parser = parse_pose, allow_hyphen_values = true)]
    pub pose: Option<Pose>,
    /// Camera field of view, degrees
    #[arg(long, global = true, value_name = "DEG", value_parser = parse_finite)]
    pub beta: Option<f64>,
    /// Vertical scan-plane offset from the camera center, mm
    #[arg(long = "y-offset", global = true, value_name = "MM", value_parser = parse_finite, allow_negative_numbers = true)]
    pub y_offset: Option<f64>,
    /// Minimum laser intensity kept when fusing clouds
    #[arg(long = "intensity-min", global = true, value_name = "N", value_parser = parse_finite)]
    pub intensity_min: Option<f64>,
    /// Simulator seed
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    /// Directory polling interval, seconds
    #[arg(long, global = true, value_name = "S", value_parser = parse_interval)]
    pub interval: Option<Duration>,
}

impl CommonArgs {
    fn to_config(&self) -> RunConfig {
        RunConfig {
            input: self.input.clone(),
            output: self.output.clone(),
            intrinsics: self.intrinsics,
            depth_mm: self.depth,
            threshold_c: self.threshold,
            pose: self.pose,
            beta_deg: self.beta,
            y_offset_mm: self.y_offset,
            intensity_min: self.intensity_min,
            seed: self.seed,
            interval: self.interval,
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert a raw frame to a Celsius CSV grid
    Decode {
        /// Also write a false-color PPM
        #[arg(long, value_name = "PATH")]
        ppm: Option<PathBuf>,
        /// Cold end of the color ramp (frame minimum by default)
        #[arg(long = "t-min", value_name = "C", value_parser = parse_finite, allow_negative_numbers = true)]
        t_min: Option<f64>,
        /// Hot end of the color ramp (frame maximum by default)
        #[arg(long = "t-max", value_name = "C", value_parser = parse_finite, allow_negative_numbers = true)]
        t_max: Option<f64>,
    },
    /// List hotspot blobs in a raw frame
    Detect,
    /// Locate hotspots using a single-beam depth reading
    Localize1d {
        /// Depth samples file (t_us,depth_mm); their mean is used as depth
        #[arg(long = "depth-samples", value_name = "PATH")]
        depth_samples: Option<PathBuf>,
    },
    /// Fuse a planar scan with a raw frame
    Fuse2d {
        /// Scan CSV
        #[arg(long, value_name = "PATH")]
        scan: PathBuf,
    },
    /// Fuse a point cloud with a raw frame
    Fuse3d {
        /// Cloud CSV
        #[arg(long, value_name = "PATH")]
        cloud: PathBuf,
    },
    /// Generate frame, scan, cloud and depth fixtures from a scene file
    Simulate {
        /// Scene description
        #[arg(long, value_name = "PATH")]
        scene: PathBuf,
        /// Frame width, pixels
        #[arg(long, default_value_t = 160)]
        width: usize,
        /// Frame height, pixels
        #[arg(long, default_value_t = 120)]
        height: usize,
        /// Cloud samples per target, columns x rows
        #[arg(long, value_name = "NX,NY", default_value = "32,24", value_parser = parse_grid)]
        grid: (usize, usize),
        /// Number of single-beam depth samples
        #[arg(long, default_value_t = 1400)]
        samples: usize,
    },
    /// Poll a directory and process each new latest frame
    Watch {
        /// Stop after this many polls (runs forever when omitted)
        #[arg(long = "max-polls", value_name = "N")]
        max_polls: Option<u64>,
    },
}

fn parse_grid(s: &str) -> Result<(usize, usize), String> {
    let (a, b) = s
        .split_once(',')
        .ok_or_else(|| format!("expected NX,NY, got {s:?}"))?;
    let parse = |v: &str| {
        v.trim()
            .parse::<usize>()
            .ok()
            .filter(|n| *n >= 1)
            .ok_or_else(|| format!("{v:?} is not a positive integer"))
    };
    Ok((parse(a)?, parse(b)?))
}

/// Failure of a subcommand, split by exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failed(String),
    /// The reader on the other end of stdout went away.
    Closed,
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Failed(m) => f.write_str(m),
            CliError::Closed => f.write_str("output closed"),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Usage(e.to_string())
    }
}

macro_rules! failed_from {
    ($($t:ty),*) => {$(
        impl From<$t> for CliError {
            fn from(e: $t) -> Self {
                CliError::Failed(e.to_string())
            }
        }
    )*};
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        if e.kind() == std::io::ErrorKind::BrokenPipe {
            CliError::Closed
        } else {
            CliError::Failed(e.to_string())
        }
    }
}

// Writers report i/o failures wrapped in their own error types.
impl From<thermfuse::thermal::ThermalError> for CliError {
    fn from(e: thermfuse::thermal::ThermalError) -> Self {
        match e {
            thermfuse::thermal::ThermalError::Io(io) => io.into(),
            e => CliError::Failed(e.to_string()),
        }
    }
}

impl From<thermfuse::pipeline::LogError> for CliError {
    fn from(e: thermfuse::pipeline::LogError) -> Self {
        match e {
            thermfuse::pipeline::LogError::Io(io) => io.into(),
            e => CliError::Failed(e.to_string()),
        }
    }
}

failed_from!(
    thermfuse::depth::DepthError,
    thermfuse::geometry::GeometryError,
    thermfuse::sim::SimError,
    thermfuse::EmptySamples
);

/// Runs the tool with `args` (including the program name).
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            // --help and --version also arrive here, on stdout with status 0
            return if e.use_stderr() {
                let _ = stderr.write_all(text.as_bytes());
                EXIT_USAGE
            } else {
                let _ = stdout.write_all(text.as_bytes());
                EXIT_OK
            };
        }
    };
    match execute(&cli, stdout, stderr) {
        Ok(()) | Err(CliError::Closed) => EXIT_OK,
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(
                stderr,
                "error: {msg}\n\nFor more information, try '--help'."
            );
            EXIT_USAGE
        }
        Err(CliError::Failed(msg)) => {
            let _ = writeln!(stderr, "error: {msg}");
            EXIT_FAILURE
        }
    }
}

fn execute(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<(), CliError> {
    let file_cfg = match &cli.common.config {
        Some(path) => {
            let f = std::fs::File::open(path).map_err(|e| {
                CliError::Usage(format!("cannot open config {}: {e}", path.display()))
            })?;
            RunConfig::parse(f)?
        }
        None => RunConfig::default(),
    };
    let cfg = file_cfg.overlay(cli.common.to_config());
    commands::dispatch(&cli.command, &cfg, stdout, stderr)
}
