//! `nimbus ghi` — clear-sky irradiance table for one day.

use chrono::{Duration, FixedOffset, Utc};
use nimbus_core::solar::{clear_sky_ghi, GeoLocation, SolarContext};

use crate::commands::emit;
use crate::config::{require, resolve, FileConfig};
use crate::{CliError, GhiArgs};

pub const CSV_HEADER: &str = "timestamp,zenith_deg,e0,ghi_wm2";

pub fn run(args: &GhiArgs, cfg: &FileConfig) -> Result<(), CliError> {
    let lat = require(args.lat, None, cfg.lat, "NIMBUS_LAT", "site latitude (--lat)")?;
    let lon = require(args.lon, None, cfg.lon, "NIMBUS_LON", "site longitude (--lon)")?;
    let location = GeoLocation::new(lat, lon).map_err(CliError::Core)?;
    let tz_offset_min = resolve(
        args.tz_offset_min,
        None,
        cfg.tz_offset_min,
        "NIMBUS_TZ_OFFSET_MIN",
        Some(0),
    )?
    .expect("has default");
    let step_minutes = resolve(
        args.step_minutes,
        None,
        cfg.step_minutes,
        "NIMBUS_STEP_MINUTES",
        Some(2),
    )?
    .expect("has default");
    if step_minutes == 0 {
        return Err(CliError::Usage("--step-minutes must be at least 1".into()));
    }
    let offset = FixedOffset::east_opt(tz_offset_min * 60)
        .ok_or_else(|| CliError::Usage(format!("--tz-offset-min {tz_offset_min} out of range")))?;
    let midnight = args
        .date
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_local_timezone(offset)
        .single()
        .expect("fixed offsets are unambiguous")
        .with_timezone(&Utc);

    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    let mut minute = 0i64;
    while minute < 24 * 60 {
        let ts = midnight + Duration::minutes(minute);
        let ctx = SolarContext::at(&location, ts);
        let g = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity).map_err(CliError::Core)?;
        out.push_str(&format!(
            "{},{},{},{}\n",
            ts.with_timezone(&offset)
                .to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            ctx.zenith_deg,
            ctx.eccentricity,
            g.wm2()
        ));
        minute += i64::from(step_minutes);
    }
    emit(args.out.as_deref(), &out)
}
