//! Threshold calibration: rain events from gauge logs, ±window labeling,
//! per-class empirical CDFs, the operating-characteristics sweep, and elbow
//! selection of the critical index.

use chrono::{DateTime, Duration, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::index::IndexSample;
use crate::ingest::GaugeRecord;

/// Default merge gap between positive-rate runs, in minutes. Tipping-bucket
/// gauges emit sparse ticks, so short dry gaps inside one shower must merge.
pub const DEFAULT_MERGE_GAP_MIN: f64 = 10.0;

/// Default half-width of the rain influence window, in minutes.
pub const DEFAULT_WINDOW_MIN: f64 = 15.0;

/// Default threshold sweep: 0.01 to 0.20 in steps of 0.01.
pub const DEFAULT_GRID_START: f64 = 0.01;
pub const DEFAULT_GRID_END: f64 = 0.20;
pub const DEFAULT_GRID_STEP: f64 = 0.01;

/// A maximal span of positive gauge rate (after gap merging).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RainEvent {
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
    pub peak_rate_mm_per_hr: f64,
}

impl RainEvent {
    pub fn new(start: DateTime<Utc>, end: DateTime<Utc>, peak_rate_mm_per_hr: f64) -> Result<Self> {
        if start > end {
            return Err(Error::Calibration(format!(
                "rain event start {start} is after end {end}"
            )));
        }
        if !peak_rate_mm_per_hr.is_finite() || peak_rate_mm_per_hr <= 0.0 {
            return Err(Error::Calibration(format!(
                "rain event peak rate must be positive, got {peak_rate_mm_per_hr}"
            )));
        }
        Ok(RainEvent {
            start,
            end,
            peak_rate_mm_per_hr,
        })
    }
}

/// An index observation labeled by the rain window.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LabeledSample {
    pub index: f64,
    pub within_window: bool,
}

/// One point of the operating-characteristics sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OcPoint {
    pub threshold: f64,
    /// Percent of within-window samples with index strictly below the threshold.
    pub pct_within_below: f64,
    /// Percent of outside-window samples with index strictly below the threshold.
    pub pct_outside_below: f64,
}

/// Segment gauge records into rain events: maximal runs of records with
/// `rate > 0`, with runs whose separation is at most `merge_gap_min` minutes
/// merged into one event.
///
/// Records must be sorted strictly increasing in time.
pub fn build_events(gauge: &[GaugeRecord], merge_gap_min: f64) -> Result<Vec<RainEvent>> {
    if !merge_gap_min.is_finite() || merge_gap_min < 0.0 {
        return Err(Error::Calibration(format!(
            "merge gap must be non-negative minutes, got {merge_gap_min}"
        )));
    }
    for pair in gauge.windows(2) {
        if pair[1].timestamp <= pair[0].timestamp {
            return Err(Error::Ingest(format!(
                "gauge records are not sorted strictly increasing at {}",
                pair[1].timestamp
            )));
        }
    }

    // maximal runs of consecutive positive records
    let mut runs: Vec<RainEvent> = Vec::new();
    let mut open: Option<RainEvent> = None;
    for record in gauge {
        if record.rate_mm_per_hr > 0.0 {
            match open.as_mut() {
                Some(run) => {
                    run.end = record.timestamp;
                    run.peak_rate_mm_per_hr = run.peak_rate_mm_per_hr.max(record.rate_mm_per_hr);
                }
                None => {
                    open = Some(RainEvent {
                        start: record.timestamp,
                        end: record.timestamp,
                        peak_rate_mm_per_hr: record.rate_mm_per_hr,
                    })
                }
            }
        } else if let Some(run) = open.take() {
            runs.push(run);
        }
    }
    if let Some(run) = open.take() {
        runs.push(run);
    }

    // merge runs separated by at most the gap
    let gap = minutes_to_duration(merge_gap_min);
    let mut events: Vec<RainEvent> = Vec::new();
    for run in runs {
        match events.last_mut() {
            Some(prev) if run.start - prev.end <= gap => {
                prev.end = run.end;
                prev.peak_rate_mm_per_hr = prev.peak_rate_mm_per_hr.max(run.peak_rate_mm_per_hr);
            }
            _ => events.push(run),
        }
    }
    Ok(events)
}

fn minutes_to_duration(minutes: f64) -> Duration {
    Duration::milliseconds((minutes * 60_000.0).round() as i64)
}

/// Label samples by whether they fall within `window_min` minutes of any
/// event, boundaries included: the window is the closed interval
/// `[start - window, end + window]`.
///
/// The result does not depend on the ordering of `events`.
pub fn label_samples(
    samples: &[IndexSample],
    events: &[RainEvent],
    window_min: f64,
) -> Vec<LabeledSample> {
    let window = minutes_to_duration(window_min);
    // merge the (closed) windows into disjoint sorted intervals, then answer
    // each sample with a binary search
    let mut intervals: Vec<(DateTime<Utc>, DateTime<Utc>)> = events
        .iter()
        .map(|e| (e.start - window, e.end + window))
        .collect();
    intervals.sort_by_key(|iv| iv.0);
    let mut merged: Vec<(DateTime<Utc>, DateTime<Utc>)> = Vec::with_capacity(intervals.len());
    for iv in intervals {
        match merged.last_mut() {
            Some(last) if iv.0 <= last.1 => last.1 = last.1.max(iv.1),
            _ => merged.push(iv),
        }
    }
    samples
        .iter()
        .map(|s| {
            let pos = merged.partition_point(|iv| iv.0 <= s.timestamp);
            let within = pos > 0 && s.timestamp <= merged[pos - 1].1;
            LabeledSample {
                index: s.index,
                within_window: within,
            }
        })
        .collect()
}

/// Right-continuous empirical distribution function of a finite sample.
#[derive(Debug, Clone)]
pub struct EmpiricalCdf {
    sorted: Vec<f64>,
}

impl EmpiricalCdf {
    pub fn new(values: &[f64]) -> Result<Self> {
        if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
            return Err(Error::EmptyCdf);
        }
        let mut sorted = values.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Ok(EmpiricalCdf { sorted })
    }

    /// Fraction of samples less than or equal to `x`.
    pub fn query(&self, x: f64) -> f64 {
        let count = self.sorted.partition_point(|&v| v <= x);
        count as f64 / self.sorted.len() as f64
    }

    pub fn min(&self) -> f64 {
        self.sorted[0]
    }

    pub fn max(&self) -> f64 {
        *self.sorted.last().expect("non-empty")
    }

    /// Sorted sample values (with duplicates).
    pub fn support(&self) -> &[f64] {
        &self.sorted
    }
}

/// Evenly spaced threshold grid over `[start, end]` (both included, within
/// half a step of rounding).
pub fn threshold_grid(start: f64, end: f64, step: f64) -> Result<Vec<f64>> {
    if !(start.is_finite() && end.is_finite() && step.is_finite()) || step <= 0.0 || end < start {
        return Err(Error::Calibration(format!(
            "invalid threshold grid: start={start} end={end} step={step}"
        )));
    }
    let n = ((end - start) / step).round() as usize;
    // when the start is a whole number of steps, a single multiplication per
    // point keeps the grid values on their decimal-friendly representations
    let ratio = start / step;
    let k0 = ratio.round();
    if (ratio - k0).abs() < 1e-9 {
        Ok((0..=n).map(|i| (k0 + i as f64) * step).collect())
    } else {
        Ok((0..=n).map(|i| start + i as f64 * step).collect())
    }
}

/// Sweep the operating characteristics: for each threshold, the percentage
/// of samples strictly below it, per class. Requires at least one sample of
/// each class.
pub fn oc_curve(labeled: &[LabeledSample], thresholds: &[f64]) -> Result<Vec<OcPoint>> {
    let n_within = labeled.iter().filter(|s| s.within_window).count();
    let n_outside = labeled.len() - n_within;
    if n_within == 0 || n_outside == 0 {
        return Err(Error::Calibration(format!(
            "OC sweep needs samples of both classes, got {n_within} within and {n_outside} outside the rain window"
        )));
    }
    Ok(thresholds
        .iter()
        .map(|&threshold| {
            let mut within_below = 0usize;
            let mut outside_below = 0usize;
            for s in labeled {
                if s.index < threshold {
                    if s.within_window {
                        within_below += 1;
                    } else {
                        outside_below += 1;
                    }
                }
            }
            OcPoint {
                threshold,
                pct_within_below: 100.0 * within_below as f64 / n_within as f64,
                pct_outside_below: 100.0 * outside_below as f64 / n_outside as f64,
            }
        })
        .collect())
}

/// Pick the elbow of the OC curve: the point with the largest perpendicular
/// distance from the chord joining the curve's first and last points, in the
/// `(pct_outside_below, pct_within_below)` plane. Ties resolve to the
/// smaller threshold.
pub fn select_elbow(curve: &[OcPoint]) -> Result<f64> {
    if curve.len() < 3 {
        return Err(Error::Calibration(format!(
            "elbow selection needs at least 3 OC points, got {}",
            curve.len()
        )));
    }
    let first = curve.first().expect("non-empty");
    let last = curve.last().expect("non-empty");
    let dx = last.pct_outside_below - first.pct_outside_below;
    let dy = last.pct_within_below - first.pct_within_below;

    let mut best = first.threshold;
    let mut best_distance = f64::NEG_INFINITY;
    for point in curve {
        // |cross product| is the perpendicular distance scaled by the
        // (constant) chord length; the scale does not move the argmax
        let px = point.pct_outside_below - first.pct_outside_below;
        let py = point.pct_within_below - first.pct_within_below;
        let distance = (px * dy - py * dx).abs();
        if distance > best_distance {
            best_distance = distance;
            best = point.threshold;
        }
    }
    Ok(best)
}
