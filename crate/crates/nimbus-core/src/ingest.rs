//! Loading and time-aligning sky images, gauge logs, and the dataset
//! manifest.
//!
//! All timestamps are stored internally as UTC. A dataset-level timezone
//! offset converts filename timestamps and formats CLI output; solar
//! geometry always runs on UTC.

use std::fs;
use std::path::{Path, PathBuf};

use chrono::{DateTime, Duration, FixedOffset, NaiveDateTime, TimeZone, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fsio::write_atomic;
use crate::luminance::LuminanceCalibration;
use crate::solar::GeoLocation;

/// Default filename timestamp pattern: a `YYYY-MM-DD-HH-MM-SS` prefix.
pub const DEFAULT_IMAGE_PATTERN: &str = "%Y-%m-%d-%H-%M-%S";

/// Default alignment tolerance between an image and its nearest gauge
/// record, in seconds.
pub const DEFAULT_ALIGN_TOLERANCE_S: f64 = 90.0;

/// Header of the gauge CSV schema.
pub const GAUGE_CSV_HEADER: &str = "timestamp,rain_mm_per_hr";

/// Header of the luminance CSV schema (measured luminance per timestamp).
pub const LUMINANCE_CSV_HEADER: &str = "timestamp,l_m";

/// One gauge reading.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaugeRecord {
    pub timestamp: DateTime<Utc>,
    pub rate_mm_per_hr: f64,
}

/// A timestamped reference to an image file (not yet decoded).
#[derive(Debug, Clone, PartialEq)]
pub struct ImageRef {
    pub timestamp: DateTime<Utc>,
    pub path: PathBuf,
}

/// A directory entry that could not be ingested, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct SkippedFile {
    pub path: PathBuf,
    pub reason: String,
}

/// Result of scanning an image directory.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome {
    /// Image references sorted strictly increasing by timestamp.
    pub images: Vec<ImageRef>,
    /// Entries that were not parseable images, sorted by path.
    pub skipped: Vec<SkippedFile>,
}

fn offset_from_minutes(tz_offset_min: i32) -> Result<FixedOffset> {
    FixedOffset::east_opt(tz_offset_min * 60).ok_or_else(|| {
        Error::Ingest(format!("timezone offset {tz_offset_min} minutes is out of range"))
    })
}

/// Scan `dir` for PNG/JPEG files whose names start with a timestamp in
/// `pattern` (a strftime format, interpreted in the dataset's local time).
/// Unparseable entries are reported, not fatal; duplicate timestamps and a
/// directory with no parseable image at all are errors.
///
/// The result is sorted by timestamp and independent of filesystem
/// enumeration order.
pub fn scan_images(dir: &Path, pattern: &str, tz_offset_min: i32) -> Result<ScanOutcome> {
    let offset = offset_from_minutes(tz_offset_min)?;
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;

    let mut images: Vec<ImageRef> = Vec::new();
    let mut skipped: Vec<SkippedFile> = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_dir() {
            continue;
        }
        let ext = path
            .extension()
            .map(|e| e.to_string_lossy().to_lowercase())
            .unwrap_or_default();
        if !matches!(ext.as_str(), "png" | "jpg" | "jpeg") {
            skipped.push(SkippedFile {
                path,
                reason: format!("unsupported extension {ext:?}"),
            });
            continue;
        }
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        match NaiveDateTime::parse_and_remainder(&stem, pattern) {
            Ok((naive, _rest)) => {
                let local = offset
                    .from_local_datetime(&naive)
                    .single()
                    .expect("fixed offsets are unambiguous");
                images.push(ImageRef {
                    timestamp: local.with_timezone(&Utc),
                    path,
                });
            }
            Err(e) => skipped.push(SkippedFile {
                path,
                reason: format!("filename does not match pattern {pattern:?}: {e}"),
            }),
        }
    }

    images.sort_by(|a, b| a.timestamp.cmp(&b.timestamp).then(a.path.cmp(&b.path)));
    skipped.sort_by(|a, b| a.path.cmp(&b.path));

    for pair in images.windows(2) {
        if pair[0].timestamp == pair[1].timestamp {
            return Err(Error::Ingest(format!(
                "duplicate image timestamp {}: {} and {}",
                pair[0].timestamp,
                pair[0].path.display(),
                pair[1].path.display()
            )));
        }
    }
    if images.is_empty() {
        return Err(Error::Ingest(format!(
            "no image filenames matching pattern {pattern:?} under {}",
            dir.display()
        )));
    }
    Ok(ScanOutcome { images, skipped })
}

fn parse_rfc3339(value: &str) -> std::result::Result<DateTime<Utc>, String> {
    DateTime::parse_from_rfc3339(value)
        .map(|dt| dt.with_timezone(&Utc))
        .map_err(|e| format!("bad timestamp {value:?}: {e}"))
}

/// Parse the gauge CSV (`timestamp,rain_mm_per_hr`). Rows are sorted by
/// timestamp (stable) and must then be strictly increasing; malformed rows
/// and negative rates report their line number.
pub fn parse_gauge_csv(path: &Path) -> Result<Vec<GaugeRecord>> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_path(path)
        .map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;

    let headers = reader
        .headers()
        .map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
    let header_line: Vec<&str> = headers.iter().collect();
    if header_line != ["timestamp", "rain_mm_per_hr"] {
        return Err(Error::GaugeRow {
            path: path.to_path_buf(),
            line: 1,
            message: format!("expected header {GAUGE_CSV_HEADER:?}, got {header_line:?}"),
        });
    }

    let mut records = Vec::new();
    for row in reader.records() {
        let row = row.map_err(|e| Error::Ingest(format!("{}: {e}", path.display())))?;
        let line = row.position().map(|p| p.line()).unwrap_or(0);
        let bad = |message: String| Error::GaugeRow {
            path: path.to_path_buf(),
            line,
            message,
        };
        if row.len() != 2 {
            return Err(bad(format!("expected 2 fields, got {}", row.len())));
        }
        let timestamp = parse_rfc3339(&row[0]).map_err(&bad)?;
        let rate: f64 = row[1]
            .parse()
            .map_err(|e| bad(format!("bad rate {:?}: {e}", &row[1])))?;
        if !rate.is_finite() || rate < 0.0 {
            return Err(bad(format!("rain rate must be finite and >= 0, got {rate}")));
        }
        records.push(GaugeRecord {
            timestamp,
            rate_mm_per_hr: rate,
        });
    }

    records.sort_by_key(|r| r.timestamp);
    for pair in records.windows(2) {
        if pair[0].timestamp == pair[1].timestamp {
            return Err(Error::Ingest(format!(
                "{}: duplicate gauge timestamp {}",
                path.display(),
                pair[0].timestamp
            )));
        }
    }
    Ok(records)
}

/// Serialize gauge records in the declared CSV schema, timestamps rendered
/// in the given timezone offset. `parse_gauge_csv` round-trips this output
/// bit-exactly.
pub fn gauge_csv_string(records: &[GaugeRecord], tz_offset_min: i32) -> Result<String> {
    let offset = offset_from_minutes(tz_offset_min)?;
    let mut out = String::from(GAUGE_CSV_HEADER);
    out.push('\n');
    for r in records {
        let local = r.timestamp.with_timezone(&offset);
        out.push_str(&format!(
            "{},{}\n",
            local.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            r.rate_mm_per_hr
        ));
    }
    Ok(out)
}

/// Parse a luminance CSV (`timestamp,l_m`), sorted strictly increasing.
pub fn parse_luminance_csv(path: &Path) -> Result<Vec<(DateTime<Utc>, f64)>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header == LUMINANCE_CSV_HEADER => {}
        other => {
            return Err(Error::Ingest(format!(
                "{}: expected header {LUMINANCE_CSV_HEADER:?}, got {:?}",
                path.display(),
                other.map(|(_, h)| h).unwrap_or_default()
            )))
        }
    }
    let mut rows = Vec::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let bad = |message: String| Error::GaugeRow {
            path: path.to_path_buf(),
            line: i as u64 + 1,
            message,
        };
        let (ts, lm) = line
            .split_once(',')
            .ok_or_else(|| bad("expected 2 fields".into()))?;
        let timestamp = parse_rfc3339(ts).map_err(&bad)?;
        let l_m: f64 = lm
            .parse()
            .map_err(|e| bad(format!("bad luminance {lm:?}: {e}")))?;
        if !l_m.is_finite() || !(0.0..=1.0).contains(&l_m) {
            return Err(bad(format!("luminance must lie in [0, 1], got {l_m}")));
        }
        rows.push((timestamp, l_m));
    }
    rows.sort_by_key(|(ts, _)| *ts);
    for pair in rows.windows(2) {
        if pair[0].0 == pair[1].0 {
            return Err(Error::Ingest(format!(
                "{}: duplicate luminance timestamp {}",
                path.display(),
                pair[0].0
            )));
        }
    }
    if rows.is_empty() {
        return Err(Error::Ingest(format!(
            "{}: no luminance rows",
            path.display()
        )));
    }
    Ok(rows)
}

/// Serialize a luminance series in the `timestamp,l_m` schema.
pub fn luminance_csv_string(rows: &[(DateTime<Utc>, f64)], tz_offset_min: i32) -> Result<String> {
    let offset = offset_from_minutes(tz_offset_min)?;
    let mut out = String::from(LUMINANCE_CSV_HEADER);
    out.push('\n');
    for (ts, l_m) in rows {
        let local = ts.with_timezone(&offset);
        out.push_str(&format!(
            "{},{}\n",
            local.to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            l_m
        ));
    }
    Ok(out)
}

/// For each image timestamp, the position of the gauge record nearest in
/// time, if it lies within `tolerance_s` seconds. A record equidistant
/// before and after resolves to the earlier one. Both inputs must be sorted.
pub fn align(
    image_times: &[DateTime<Utc>],
    gauge: &[GaugeRecord],
    tolerance_s: f64,
) -> Vec<Option<usize>> {
    let tolerance = Duration::milliseconds((tolerance_s * 1000.0).round() as i64);
    image_times
        .iter()
        .map(|&t| {
            if gauge.is_empty() {
                return None;
            }
            let pos = gauge.partition_point(|r| r.timestamp <= t);
            let mut best: Option<(usize, Duration)> = None;
            // candidate before (or at) t, then candidate after; the earlier
            // record wins ties because strict improvement is required
            for candidate in [pos.checked_sub(1), (pos < gauge.len()).then_some(pos)]
                .into_iter()
                .flatten()
            {
                let distance = (gauge[candidate].timestamp - t).abs();
                if best.is_none_or(|(_, d)| distance < d) {
                    best = Some((candidate, distance));
                }
            }
            best.and_then(|(i, d)| (d <= tolerance).then_some(i))
        })
        .collect()
}

/// Persisted calibration coefficients (the `--calibration FILE` schema).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CalibrationCoefficients {
    pub alpha: f64,
    pub beta: f64,
}

impl CalibrationCoefficients {
    pub fn to_calibration(self) -> Result<LuminanceCalibration> {
        LuminanceCalibration::new(self.alpha, self.beta)
    }

    pub fn from_calibration(cal: &LuminanceCalibration) -> Self {
        CalibrationCoefficients {
            alpha: cal.alpha(),
            beta: cal.beta(),
        }
    }
}

/// Location block of the manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ManifestLocation {
    pub latitude_deg: f64,
    pub longitude_deg: f64,
}

/// Dataset manifest persisted as `manifest.json`, so calibration and
/// detection runs are reproducible from the same inputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub location: ManifestLocation,
    pub tz_offset_min: i32,
    /// Declared dataset range (RFC 3339, local offset).
    pub start: String,
    pub end: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub images_dir: Option<String>,
    pub image_pattern: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub luminance_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gauge_csv: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration: Option<CalibrationCoefficients>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub crop_side: Option<u32>,
    pub step_minutes: u32,
}

pub const MANIFEST_FILE: &str = "manifest.json";

impl DatasetManifest {
    pub fn save(&self, path: &Path) -> Result<()> {
        let mut body = serde_json::to_string_pretty(self).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })?;
        body.push('\n');
        write_atomic(path, body.as_bytes())
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| Error::Json {
            path: path.to_path_buf(),
            source: e,
        })
    }

    pub fn geolocation(&self) -> Result<GeoLocation> {
        GeoLocation::new(self.location.latitude_deg, self.location.longitude_deg)
    }
}

/// A fully loaded dataset: series sorted strictly increasing, all
/// timestamps within the declared range.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub location: GeoLocation,
    pub tz_offset_min: i32,
    pub images: Vec<ImageRef>,
    pub gauge: Vec<GaugeRecord>,
    pub calibration: Option<LuminanceCalibration>,
    pub start: DateTime<Utc>,
    pub end: DateTime<Utc>,
}

impl Dataset {
    pub fn new(
        location: GeoLocation,
        tz_offset_min: i32,
        images: Vec<ImageRef>,
        gauge: Vec<GaugeRecord>,
        calibration: Option<LuminanceCalibration>,
        start: DateTime<Utc>,
        end: DateTime<Utc>,
    ) -> Result<Self> {
        if start > end {
            return Err(Error::Ingest(format!(
                "dataset range start {start} is after end {end}"
            )));
        }
        for pair in images.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(Error::Ingest(format!(
                    "image series is not strictly increasing at {}",
                    pair[1].path.display()
                )));
            }
        }
        for pair in gauge.windows(2) {
            if pair[1].timestamp <= pair[0].timestamp {
                return Err(Error::Ingest(format!(
                    "gauge series is not strictly increasing at {}",
                    pair[1].timestamp
                )));
            }
        }
        let in_range = |ts: DateTime<Utc>| ts >= start && ts <= end;
        if let Some(img) = images.iter().find(|i| !in_range(i.timestamp)) {
            return Err(Error::Ingest(format!(
                "image {} at {} lies outside the declared range",
                img.path.display(),
                img.timestamp
            )));
        }
        if let Some(rec) = gauge.iter().find(|r| !in_range(r.timestamp)) {
            return Err(Error::Ingest(format!(
                "gauge record at {} lies outside the declared range",
                rec.timestamp
            )));
        }
        Ok(Dataset {
            location,
            tz_offset_min,
            images,
            gauge,
            calibration,
            start,
            end,
        })
    }
}
