//! The clearness luminance index and the critical-threshold detection rule.
//!
//! `I = L_m / L_c` is close to 1 under an ideal clear sky and drops sharply
//! under rain clouds; an index strictly below the critical threshold flags
//! rainfall onset. Values above 1 (cloud-edge brightening) are kept as-is:
//! clamping would distort the calibration CDFs downstream.

use chrono::{DateTime, Utc};

use crate::calibration::RainEvent;
use crate::error::{Error, Result};
use crate::luminance::{LuminanceCalibration, NIGHT_LUMINANCE_EPS};
use crate::solar::{clear_sky_ghi, GeoLocation, SolarContext};

/// Detection parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DetectionConfig {
    critical_index: f64,
    daylight_max_zenith_deg: f64,
}

/// Critical index below which onset is flagged; 0.08 is the calibrated
/// value for tropical Singapore and may need adjustment elsewhere.
pub const DEFAULT_CRITICAL_INDEX: f64 = 0.08;

/// Samples with a solar zenith angle at or beyond this are excluded from the
/// index series: the modeled clear-sky luminance vanishes near the horizon
/// and the ratio becomes unstable.
pub const DEFAULT_DAYLIGHT_MAX_ZENITH_DEG: f64 = 85.0;

impl DetectionConfig {
    pub fn new(critical_index: f64, daylight_max_zenith_deg: f64) -> Result<Self> {
        if !critical_index.is_finite() || critical_index <= 0.0 || critical_index > 1.0 {
            return Err(Error::InvalidCriticalIndex(critical_index));
        }
        if !daylight_max_zenith_deg.is_finite() || !(0.0..=180.0).contains(&daylight_max_zenith_deg)
        {
            return Err(Error::ZenithOutOfRange(daylight_max_zenith_deg));
        }
        Ok(DetectionConfig {
            critical_index,
            daylight_max_zenith_deg,
        })
    }

    pub fn critical_index(&self) -> f64 {
        self.critical_index
    }

    pub fn daylight_max_zenith_deg(&self) -> f64 {
        self.daylight_max_zenith_deg
    }
}

impl Default for DetectionConfig {
    fn default() -> Self {
        DetectionConfig {
            critical_index: DEFAULT_CRITICAL_INDEX,
            daylight_max_zenith_deg: DEFAULT_DAYLIGHT_MAX_ZENITH_DEG,
        }
    }
}

/// One index observation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSample {
    pub timestamp: DateTime<Utc>,
    pub index: f64,
    /// Signed minutes to the nearest rain event: negative before onset,
    /// positive after the event ends, 0 during. `None` when the dataset has
    /// no rain events.
    pub minutes_to_nearest_rain: Option<f64>,
}

/// Clearness luminance index `l_m / l_c`.
///
/// A clear-sky luminance at or below the night guard has no defined index;
/// such samples are excluded from the series.
pub fn clearness_index(l_m: f64, l_c: f64) -> Result<f64> {
    if !l_m.is_finite() || !l_c.is_finite() || l_m < 0.0 {
        return Err(Error::InvalidLuminancePair { l_m, l_c });
    }
    if l_c <= NIGHT_LUMINANCE_EPS {
        return Err(Error::NightSample(l_c));
    }
    Ok(l_m / l_c)
}

/// True iff `index` is strictly below the critical threshold. Equality does
/// not fire: the rule is "decreases below".
pub fn detect_onset(index: f64, cfg: &DetectionConfig) -> bool {
    index < cfg.critical_index
}

/// Signed minutes from `t` to the nearest rain-event boundary: negative
/// before an event's start, positive after its end, 0 inside an event.
/// Equidistant ties resolve to the earlier event in list order. Returns
/// `None` for an empty event list.
pub fn minutes_to_nearest_event(t: DateTime<Utc>, events: &[RainEvent]) -> Option<f64> {
    let mut best: Option<f64> = None;
    for event in events {
        let minutes = if t < event.start {
            (t - event.start).num_milliseconds() as f64 / 60_000.0
        } else if t > event.end {
            (t - event.end).num_milliseconds() as f64 / 60_000.0
        } else {
            return Some(0.0);
        };
        match best {
            Some(b) if minutes.abs() >= b.abs() => {}
            _ => best = Some(minutes),
        }
    }
    best
}

/// One row of the computed index series, carrying the intermediate
/// quantities emitted by the `index` CLI output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IndexSeriesRow {
    pub timestamp: DateTime<Utc>,
    pub l_m: f64,
    pub g_c_wm2: f64,
    pub l_c: f64,
    pub index: f64,
}

impl IndexSeriesRow {
    pub fn to_sample(&self) -> IndexSample {
        IndexSample {
            timestamp: self.timestamp,
            index: self.index,
            minutes_to_nearest_rain: None,
        }
    }
}

/// Outcome of building an index series from measured luminance samples:
/// retained rows in input order plus the count of excluded (night or
/// beyond-zenith-cutoff) samples.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSeries {
    pub rows: Vec<IndexSeriesRow>,
    pub excluded: usize,
}

/// Map timestamped measured luminances to index rows. Samples whose zenith
/// angle reaches the daylight cutoff, or whose modeled luminance is below
/// the night guard, are dropped (counted in `excluded`).
pub fn build_index_series(
    measurements: &[(DateTime<Utc>, f64)],
    location: &GeoLocation,
    calibration: &LuminanceCalibration,
    cfg: &DetectionConfig,
) -> Result<IndexSeries> {
    let mut rows = Vec::with_capacity(measurements.len());
    let mut excluded = 0usize;
    for &(timestamp, l_m) in measurements {
        let ctx = SolarContext::at(location, timestamp);
        if ctx.zenith_deg >= cfg.daylight_max_zenith_deg {
            excluded += 1;
            continue;
        }
        let g_c = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity)?;
        let l_c = calibration.luminance(g_c.wm2());
        match clearness_index(l_m, l_c) {
            Ok(index) => rows.push(IndexSeriesRow {
                timestamp,
                l_m,
                g_c_wm2: g_c.wm2(),
                l_c,
                index,
            }),
            Err(Error::NightSample(_)) => excluded += 1,
            Err(e) => return Err(e),
        }
    }
    Ok(IndexSeries { rows, excluded })
}
