//! `nimbus` — rainfall-onset detection from sky-camera luminance.
//!
//! Subcommands mirror the pipeline order: `ghi` (clear-sky irradiance
//! table), `simulate` (synthetic dataset with planted events), `index`
//! (clearness luminance index series), `calibrate` (CDFs, OC sweep, elbow
//! threshold), and `detect` (per-image onset flags).
//!
//! Exit codes: 0 success, 2 usage error, 3 data error, 4 calibration error.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

mod commands;
mod config;
mod inputs;


#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Core(nimbus_core::Error),
}

impl From<nimbus_core::Error> for CliError {
    fn from(e: nimbus_core::Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn class(&self) -> &'static str {
        match self {
            CliError::Usage(_) => "usage",
            CliError::Core(e) => match e.class() {
                nimbus_core::error::ErrorClass::Calibration => "calibration",
                nimbus_core::error::ErrorClass::Data => "data",
            },
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Core(e) => match e.class() {
                nimbus_core::error::ErrorClass::Calibration => 4,
                nimbus_core::error::ErrorClass::Data => 3,
            },
        }
    }

    fn message(&self) -> String {
        match self {
            CliError::Usage(m) => m.clone(),
            CliError::Core(e) => e.to_string(),
        }
    }
}

#[derive(Parser)]
#[command(
    name = "nimbus",
    version,
    about = "Rainfall-onset detection from whole-sky-camera luminance"
)]
struct Cli {
    /// Config file (TOML); defaults to the NIMBUS_CONFIG environment variable.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit a clear-sky irradiance table for one day as CSV.
    Ghi(GhiArgs),
    /// Generate a synthetic dataset with planted rain events.
    Simulate(SimulateArgs),
    /// Compute the clearness luminance index series as CSV.
    Index(IndexArgs),
    /// Calibrate the critical index: CDFs, OC sweep, and elbow selection.
    Calibrate(CalibrateArgs),
    /// Flag rainfall onset per image against a critical index.
    Detect(DetectArgs),
}

#[derive(Args)]
pub struct GhiArgs {
    /// Site latitude in degrees.
    #[arg(long)]
    lat: Option<f64>,
    /// Site longitude in degrees, east positive.
    #[arg(long)]
    lon: Option<f64>,
    /// Calendar date (YYYY-MM-DD), interpreted in the dataset timezone.
    #[arg(long)]
    date: chrono::NaiveDate,
    /// Sampling step in minutes.
    #[arg(long)]
    step_minutes: Option<u32>,
    /// Timezone offset in minutes east of UTC.
    #[arg(long)]
    tz_offset_min: Option<i32>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct SimulateArgs {
    /// Dataset directory to create.
    #[arg(long)]
    out: PathBuf,
    /// Calendar date of the synthetic day.
    #[arg(long)]
    date: chrono::NaiveDate,
    #[arg(long)]
    lat: Option<f64>,
    #[arg(long)]
    lon: Option<f64>,
    #[arg(long)]
    tz_offset_min: Option<i32>,
    /// Number of planted rain events.
    #[arg(long, default_value_t = 3)]
    events: u32,
    /// Duration of each event in whole minutes.
    #[arg(long, default_value_t = 30)]
    event_duration_min: u32,
    /// V-ramp length on each side of an event, minutes.
    #[arg(long, default_value_t = 120.0)]
    ramp_min: f64,
    /// Gaussian noise on the index trace.
    #[arg(long, default_value_t = 0.0)]
    noise_sigma: f64,
    /// Index level away from events.
    #[arg(long, default_value_t = 1.0)]
    clear_level: f64,
    /// Index level during events.
    #[arg(long, default_value_t = 0.02)]
    rain_level: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    step_minutes: Option<u32>,
    /// Side of the emitted uniform-gray tiles, pixels.
    #[arg(long, default_value_t = 64)]
    image_side: u32,
    /// Gauge rate during events, mm/hour.
    #[arg(long, default_value_t = 10.0)]
    rain_rate: f64,
    /// What to emit for the image side of the dataset.
    #[arg(long, value_enum, default_value_t = Emit::Images)]
    emit: Emit,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Images,
    Luminance,
}

/// Input flags shared by `index`, `calibrate`, and `detect`.
#[derive(Args)]
#[command(group(ArgGroup::new("input").args(["images", "luminance"]).required(true)))]
pub struct InputArgs {
    /// Directory of sky images (reads `manifest.json` there when present).
    #[arg(long)]
    images: Option<PathBuf>,
    /// Luminance CSV (`timestamp,l_m`) instead of images.
    #[arg(long, conflicts_with = "images")]
    luminance: Option<PathBuf>,
    /// Calibration coefficients JSON (`{"alpha": .., "beta": ..}`).
    #[arg(long)]
    calibration: Option<PathBuf>,
    /// Filename timestamp pattern (strftime).
    #[arg(long)]
    pattern: Option<String>,
    #[arg(long)]
    lat: Option<f64>,
    #[arg(long)]
    lon: Option<f64>,
    #[arg(long)]
    tz_offset_min: Option<i32>,
    /// Centered crop side in pixels.
    #[arg(long)]
    crop_side: Option<u32>,
    /// Centered crop as a fraction of the shorter image side.
    #[arg(long, conflicts_with = "crop_side")]
    crop_fraction: Option<f64>,
    /// Exclude samples with solar zenith at or beyond this, degrees.
    #[arg(long)]
    max_zenith: Option<f64>,
}

#[derive(Args)]
pub struct IndexArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
pub struct CalibrateArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Gauge CSV (`timestamp,rain_mm_per_hr`); defaults to the manifest's.
    #[arg(long)]
    gauge: Option<PathBuf>,
    /// Rain-window half-width in minutes.
    #[arg(long)]
    window_min: Option<f64>,
    /// Merge gap between gauge runs in minutes.
    #[arg(long)]
    merge_gap_min: Option<f64>,
    #[arg(long)]
    grid_start: Option<f64>,
    #[arg(long)]
    grid_end: Option<f64>,
    #[arg(long)]
    grid_step: Option<f64>,
    /// Directory for cdf.csv, oc.csv, and summary.json.
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
}

#[derive(Args)]
pub struct DetectArgs {
    #[command(flatten)]
    input: InputArgs,
    /// Critical clearness luminance index.
    #[arg(long)]
    threshold: Option<f64>,
    /// Output CSV path (stdout when omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let file_config = match config::load(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    let result = match cli.command {
        Command::Ghi(args) => commands::ghi::run(&args, &file_config),
        Command::Simulate(args) => commands::simulate::run(&args, &file_config),
        Command::Index(args) => commands::index_series::run(&args, &file_config),
        Command::Calibrate(args) => commands::calibrate::run(&args, &file_config),
        Command::Detect(args) => commands::detect::run(&args, &file_config),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => fail(&e),
    }
}

fn fail(e: &CliError) -> ExitCode {
    eprintln!("nimbus: error[{}]: {}", e.class(), e.message());
    ExitCode::from(e.exit_code())
}
