//! Synthetic dataset generation with planted rain events.
//!
//! The generator plants rain events into one synthetic day and shapes the
//! clearness index trace around them: the trace sits at the clear level away
//! from events, descends linearly to the rain level across the ramp ahead of
//! each onset, holds through the event, and recovers symmetrically after it
//! (a V around every event; overlapping ramps combine by pointwise minimum).
//! Measured luminance is then back-derived from the planted index and the
//! modeled clear-sky luminance, so the full pipeline can be verified at desk
//! scale against the known construction.

use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, FixedOffset, NaiveDate, Utc};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::calibration::RainEvent;
use crate::error::{Error, Result};
use crate::fsio::write_atomic;
use crate::index::DEFAULT_DAYLIGHT_MAX_ZENITH_DEG;
use crate::ingest::{
    gauge_csv_string, luminance_csv_string, CalibrationCoefficients, DatasetManifest,
    GaugeRecord, ManifestLocation, DEFAULT_IMAGE_PATTERN, MANIFEST_FILE,
};
use crate::luminance::LuminanceCalibration;
use crate::solar::{clear_sky_ghi, GeoLocation, SolarContext};

/// Clear-sky luminance the calibration is anchored to at solar noon.
pub const NOON_CLEAR_LUMINANCE: f64 = 0.7;

/// Gauge logging cadence of the synthetic weather station, minutes.
pub const GAUGE_STEP_MIN: i64 = 1;

/// What the generator writes for the image side of the dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EmitMode {
    /// Uniform-gray PNG tiles under `images/`.
    Images,
    /// A `luminance.csv` carrying exact measured-luminance values.
    LuminanceCsv,
}

/// Parameters of one synthetic day.
#[derive(Debug, Clone, PartialEq)]
pub struct ScenarioConfig {
    pub date: NaiveDate,
    pub location: GeoLocation,
    pub tz_offset_min: i32,
    pub n_events: u32,
    pub event_duration_min: u32,
    pub clear_index_level: f64,
    pub rain_index_level: f64,
    pub v_ramp_minutes: f64,
    pub noise_sigma: f64,
    pub seed: u64,
    pub step_minutes: u32,
    pub image_side: u32,
    pub rain_rate_mm_per_hr: f64,
    pub daylight_max_zenith_deg: f64,
    pub emit: EmitMode,
}

impl ScenarioConfig {
    /// A scenario with the documented defaults: 2-minute imaging cadence,
    /// 64x64 tiles, clear level 1.0, rain level 0.02, and a 120-minute ramp.
    pub fn new(date: NaiveDate, location: GeoLocation, tz_offset_min: i32) -> Self {
        ScenarioConfig {
            date,
            location,
            tz_offset_min,
            n_events: 1,
            event_duration_min: 30,
            clear_index_level: 1.0,
            rain_index_level: 0.02,
            v_ramp_minutes: 120.0,
            noise_sigma: 0.0,
            seed: 0,
            step_minutes: 2,
            image_side: 64,
            rain_rate_mm_per_hr: 10.0,
            daylight_max_zenith_deg: DEFAULT_DAYLIGHT_MAX_ZENITH_DEG,
            emit: EmitMode::Images,
        }
    }

    fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if !(self.rain_index_level >= 0.0 && self.rain_index_level < self.clear_index_level) {
            return bad(format!(
                "rain index level {} must satisfy 0 <= rain < clear ({})",
                self.rain_index_level, self.clear_index_level
            ));
        }
        if !self.v_ramp_minutes.is_finite() || self.v_ramp_minutes < 0.0 {
            return bad(format!(
                "ramp must be non-negative minutes, got {}",
                self.v_ramp_minutes
            ));
        }
        if !self.noise_sigma.is_finite() || self.noise_sigma < 0.0 {
            return bad(format!("noise sigma must be >= 0, got {}", self.noise_sigma));
        }
        if self.step_minutes == 0 {
            return bad("imaging step must be at least 1 minute".into());
        }
        if self.image_side == 0 {
            return bad("image side must be at least 1 pixel".into());
        }
        if self.n_events > 0 && self.event_duration_min == 0 {
            return bad("event duration must be at least 1 minute".into());
        }
        if !self.rain_rate_mm_per_hr.is_finite() || self.rain_rate_mm_per_hr <= 0.0 {
            return bad(format!(
                "rain rate must be positive, got {}",
                self.rain_rate_mm_per_hr
            ));
        }
        if self.clear_index_level * NOON_CLEAR_LUMINANCE + 6.0 * self.noise_sigma > 1.0 {
            return bad(format!(
                "clear index level {} with noise sigma {} would push measured luminance past 1",
                self.clear_index_level, self.noise_sigma
            ));
        }
        Ok(())
    }
}

/// Planted index level at `minute` (minutes from local midnight, fractional)
/// for events given as `(start_min, end_min)` pairs: clear away from events,
/// linear descent across the ramp before each onset, rain level inside, and
/// the mirror ramp after. Overlapping event profiles combine by minimum.
pub fn index_level_at(
    minute: f64,
    events: &[(f64, f64)],
    clear_level: f64,
    rain_level: f64,
    ramp_minutes: f64,
) -> f64 {
    let mut level = clear_level;
    for &(start, end) in events {
        let profile = if minute < start {
            let lead = start - minute;
            if ramp_minutes > 0.0 && lead <= ramp_minutes {
                rain_level + (clear_level - rain_level) * lead / ramp_minutes
            } else {
                clear_level
            }
        } else if minute > end {
            let lag = minute - end;
            if ramp_minutes > 0.0 && lag <= ramp_minutes {
                rain_level + (clear_level - rain_level) * lag / ramp_minutes
            } else {
                clear_level
            }
        } else {
            rain_level
        };
        level = level.min(profile);
    }
    level
}

/// Everything a generated dataset consists of on disk.
#[derive(Debug, Clone, PartialEq)]
pub struct GeneratedDataset {
    pub root: PathBuf,
    pub manifest: DatasetManifest,
    pub truth_events: Vec<RainEvent>,
    /// Number of emitted samples (images or luminance rows).
    pub n_samples: usize,
    pub calibration: LuminanceCalibration,
}

pub const TRUTH_EVENTS_FILE: &str = "truth_events.json";
pub const GAUGE_FILE: &str = "gauge.csv";
pub const LUMINANCE_FILE: &str = "luminance.csv";
pub const IMAGES_DIR: &str = "images";

/// Generate one synthetic day under `out_dir`: manifest, gauge log, planted
/// ground-truth events, and either gray-tile images or a luminance CSV.
/// Byte-identical for identical configurations (including the seed).
pub fn generate(cfg: &ScenarioConfig, out_dir: &Path) -> Result<GeneratedDataset> {
    cfg.validate()?;
    let offset = FixedOffset::east_opt(cfg.tz_offset_min * 60)
        .ok_or_else(|| Error::Config(format!("timezone offset {} out of range", cfg.tz_offset_min)))?;
    let midnight_local = cfg
        .date
        .and_hms_opt(0, 0, 0)
        .expect("midnight exists")
        .and_local_timezone(offset)
        .single()
        .expect("fixed offsets are unambiguous");
    let midnight_utc = midnight_local.with_timezone(&Utc);

    // imaging grid over the day, keeping only daylight samples
    let steps_per_day = (24 * 60) / cfg.step_minutes as i64;
    let mut daylight: Vec<(DateTime<Utc>, f64, f64)> = Vec::new(); // (utc, minute-of-day, G_c)
    for i in 0..steps_per_day {
        let minute = i * cfg.step_minutes as i64;
        let ts = midnight_utc + Duration::minutes(minute);
        let ctx = SolarContext::at(&cfg.location, ts);
        if ctx.zenith_deg < cfg.daylight_max_zenith_deg {
            let g_c = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity)?;
            daylight.push((ts, minute as f64, g_c.wm2()));
        }
    }
    if daylight.is_empty() {
        return Err(Error::Config(
            "no daylight samples for this date and location".into(),
        ));
    }

    // anchor the irradiance-to-luminance scale so solar noon reads 0.7
    let g_max = daylight
        .iter()
        .map(|(_, _, g)| *g)
        .fold(f64::NEG_INFINITY, f64::max);
    let calibration = LuminanceCalibration::new(NOON_CLEAR_LUMINANCE / g_max, 0.0)?;

    let events_min = place_events(cfg, &daylight)?;
    let truth_events: Vec<RainEvent> = events_min
        .iter()
        .map(|&(s, e)| {
            RainEvent::new(
                midnight_utc + Duration::minutes(s),
                midnight_utc + Duration::minutes(e),
                cfg.rain_rate_mm_per_hr,
            )
        })
        .collect::<Result<_>>()?;
    let events_f: Vec<(f64, f64)> = events_min
        .iter()
        .map(|&(s, e)| (s as f64, e as f64))
        .collect();

    // planted index trace with seeded noise, then measured luminance
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let noise = Normal::new(0.0, cfg.noise_sigma)
        .map_err(|e| Error::Config(format!("noise distribution: {e}")))?;
    let mut samples: Vec<(DateTime<Utc>, f64)> = Vec::with_capacity(daylight.len());
    for &(ts, minute, g_c) in &daylight {
        let mut level = index_level_at(
            minute,
            &events_f,
            cfg.clear_index_level,
            cfg.rain_index_level,
            cfg.v_ramp_minutes,
        );
        if cfg.noise_sigma > 0.0 {
            level += noise.sample(&mut rng);
        }
        let level = level.max(0.0);
        let l_m = (level * calibration.luminance(g_c)).clamp(0.0, 1.0);
        samples.push((ts, l_m));
    }

    // gauge log: positive exactly during events, on a one-minute cadence
    let gauge: Vec<GaugeRecord> = (0..24 * 60 / GAUGE_STEP_MIN)
        .map(|i| {
            let minute = i * GAUGE_STEP_MIN;
            let raining = events_min.iter().any(|&(s, e)| minute >= s && minute <= e);
            GaugeRecord {
                timestamp: midnight_utc + Duration::minutes(minute),
                rate_mm_per_hr: if raining { cfg.rain_rate_mm_per_hr } else { 0.0 },
            }
        })
        .collect();

    // write the dataset
    std::fs::create_dir_all(out_dir).map_err(|e| Error::io(out_dir, e))?;
    write_atomic(
        &out_dir.join(GAUGE_FILE),
        gauge_csv_string(&gauge, cfg.tz_offset_min)?.as_bytes(),
    )?;
    let mut truth_json =
        serde_json::to_string_pretty(&truth_events).map_err(|e| Error::Json {
            path: out_dir.join(TRUTH_EVENTS_FILE),
            source: e,
        })?;
    truth_json.push('\n');
    write_atomic(&out_dir.join(TRUTH_EVENTS_FILE), truth_json.as_bytes())?;

    let (images_dir, luminance_csv, crop_side) = match cfg.emit {
        EmitMode::Images => {
            let dir = out_dir.join(IMAGES_DIR);
            std::fs::create_dir_all(&dir).map_err(|e| Error::io(&dir, e))?;
            for &(ts, l_m) in &samples {
                let gray = (l_m * 255.0).round().clamp(0.0, 255.0) as u8;
                let tile = image::RgbImage::from_pixel(
                    cfg.image_side,
                    cfg.image_side,
                    image::Rgb([gray, gray, gray]),
                );
                let name = ts
                    .with_timezone(&offset)
                    .format(DEFAULT_IMAGE_PATTERN)
                    .to_string();
                let path = dir.join(format!("{name}.png"));
                let mut bytes: Vec<u8> = Vec::new();
                tile.write_to(
                    &mut std::io::Cursor::new(&mut bytes),
                    image::ImageFormat::Png,
                )
                .map_err(|e| Error::Ingest(format!("png encode: {e}")))?;
                write_atomic(&path, &bytes)?;
            }
            (Some(IMAGES_DIR.to_string()), None, Some(cfg.image_side))
        }
        EmitMode::LuminanceCsv => {
            write_atomic(
                &out_dir.join(LUMINANCE_FILE),
                luminance_csv_string(&samples, cfg.tz_offset_min)?.as_bytes(),
            )?;
            (None, Some(LUMINANCE_FILE.to_string()), None)
        }
    };

    let end_local = midnight_local + Duration::days(1) - Duration::seconds(1);
    let manifest = DatasetManifest {
        location: ManifestLocation {
            latitude_deg: cfg.location.latitude_deg(),
            longitude_deg: cfg.location.longitude_deg(),
        },
        tz_offset_min: cfg.tz_offset_min,
        start: midnight_local.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        end: end_local.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
        images_dir,
        image_pattern: DEFAULT_IMAGE_PATTERN.into(),
        luminance_csv,
        gauge_csv: Some(GAUGE_FILE.into()),
        calibration: Some(CalibrationCoefficients::from_calibration(&calibration)),
        crop_side,
        step_minutes: cfg.step_minutes,
    };
    manifest.save(&out_dir.join(MANIFEST_FILE))?;

    Ok(GeneratedDataset {
        root: out_dir.to_path_buf(),
        manifest,
        truth_events,
        n_samples: samples.len(),
        calibration,
    })
}

/// Spread events evenly over the daylight span, snapped to the gauge grid.
fn place_events(
    cfg: &ScenarioConfig,
    daylight: &[(DateTime<Utc>, f64, f64)],
) -> Result<Vec<(i64, i64)>> {
    if cfg.n_events == 0 {
        return Ok(Vec::new());
    }
    let first = daylight.first().expect("non-empty").1;
    let last = daylight.last().expect("non-empty").1;
    let span = last - first;
    let segment = span / cfg.n_events as f64;
    if segment <= cfg.event_duration_min as f64 + 2.0 {
        return Err(Error::Config(format!(
            "{} events of {} min do not fit the {:.0}-minute daylight span",
            cfg.n_events, cfg.event_duration_min, span
        )));
    }
    Ok((0..cfg.n_events)
        .map(|k| {
            let center = first + (k as f64 + 0.5) * segment;
            let start = (center - cfg.event_duration_min as f64 / 2.0).round() as i64;
            (start, start + cfg.event_duration_min as i64)
        })
        .collect())
}
