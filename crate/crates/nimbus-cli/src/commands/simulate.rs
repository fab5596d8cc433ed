//! `nimbus simulate` — synthetic dataset with planted rain events.

use nimbus_core::solar::GeoLocation;
use nimbus_core::synth::{generate, EmitMode, ScenarioConfig};

use crate::config::{resolve, FileConfig};
use crate::{CliError, Emit, SimulateArgs};

/// Default synthetic site: the documented example imager location.
pub const DEFAULT_LAT: f64 = 1.34;
pub const DEFAULT_LON: f64 = 103.68;
pub const DEFAULT_TZ_OFFSET_MIN: i32 = 480;

pub fn run(args: &SimulateArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let lat = resolve(args.lat, None, cfg.lat, "NIMBUS_LAT", Some(DEFAULT_LAT))?.expect("default");
    let lon = resolve(args.lon, None, cfg.lon, "NIMBUS_LON", Some(DEFAULT_LON))?.expect("default");
    let tz_offset_min = resolve(
        args.tz_offset_min,
        None,
        cfg.tz_offset_min,
        "NIMBUS_TZ_OFFSET_MIN",
        Some(DEFAULT_TZ_OFFSET_MIN),
    )?
    .expect("default");
    let step_minutes = resolve(
        args.step_minutes,
        None,
        cfg.step_minutes,
        "NIMBUS_STEP_MINUTES",
        Some(2),
    )?
    .expect("default");

    let location = GeoLocation::new(lat, lon).map_err(CliError::Core)?;
    let mut scenario = ScenarioConfig::new(args.date, location, tz_offset_min);
    scenario.n_events = args.events;
    scenario.event_duration_min = args.event_duration_min;
    scenario.v_ramp_minutes = args.ramp_min;
    scenario.noise_sigma = args.noise_sigma;
    scenario.clear_index_level = args.clear_level;
    scenario.rain_index_level = args.rain_level;
    scenario.seed = args.seed;
    scenario.step_minutes = step_minutes;
    scenario.image_side = args.image_side;
    scenario.rain_rate_mm_per_hr = args.rain_rate;
    scenario.emit = match args.emit {
        Emit::Images => EmitMode::Images,
        Emit::Luminance => EmitMode::LuminanceCsv,
    };

    let dataset = generate(&scenario, &args.out).map_err(CliError::Core)?;
    println!(
        "simulate: samples={} events={} alpha={} dir={}",
        dataset.n_samples,
        dataset.truth_events.len(),
        dataset.calibration.alpha(),
        args.out.display()
    );
    Ok(())
}
