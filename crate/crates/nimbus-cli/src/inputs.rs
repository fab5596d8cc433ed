//! Shared input handling for `index`, `calibrate`, and `detect`: locate the
//! dataset manifest, turn images or a luminance CSV into timestamped
//! measured-luminance samples, and resolve the irradiance-to-luminance
//! calibration.

use std::path::{Path, PathBuf};

use chrono::{DateTime, FixedOffset, Utc};
use nimbus_core::ingest::{
    parse_luminance_csv, scan_images, CalibrationCoefficients, DatasetManifest,
    DEFAULT_IMAGE_PATTERN, MANIFEST_FILE,
};
use nimbus_core::luminance::{crop_center, mean_luminance, LuminanceCalibration, SkyImage};
use nimbus_core::solar::{clear_sky_ghi, GeoLocation, SolarContext};
use nimbus_core::Error;

use crate::config::{require, resolve, FileConfig};
use crate::{CliError, InputArgs};

/// Default centered crop side for full-resolution imager frames, pixels.
pub const DEFAULT_CROP_SIDE: u32 = 2000;

pub struct LoadedInput {
    /// Timestamped measured luminance, sorted by time.
    pub samples: Vec<(DateTime<Utc>, f64)>,
    pub manifest: Option<DatasetManifest>,
    /// Directory the manifest lives in (for manifest-relative paths).
    pub root: PathBuf,
    pub location: GeoLocation,
    pub tz_offset_min: i32,
    pub max_zenith_deg: f64,
}

impl LoadedInput {
    pub fn offset(&self) -> FixedOffset {
        FixedOffset::east_opt(self.tz_offset_min * 60).expect("validated offset")
    }
}

pub fn load(args: &InputArgs, cfg: &FileConfig) -> Result<LoadedInput, CliError> {
    let (root, manifest) = locate_manifest(args)?;

    let m_loc = manifest.as_ref().map(|m| m.location);
    let lat = require(
        args.lat,
        m_loc.map(|l| l.latitude_deg),
        cfg.lat,
        "NIMBUS_LAT",
        "site latitude (--lat)",
    )?;
    let lon = require(
        args.lon,
        m_loc.map(|l| l.longitude_deg),
        cfg.lon,
        "NIMBUS_LON",
        "site longitude (--lon)",
    )?;
    let location = GeoLocation::new(lat, lon).map_err(CliError::Core)?;
    let tz_offset_min = resolve(
        args.tz_offset_min,
        manifest.as_ref().map(|m| m.tz_offset_min),
        cfg.tz_offset_min,
        "NIMBUS_TZ_OFFSET_MIN",
        Some(0),
    )?
    .expect("has default");
    let max_zenith_deg = resolve(
        args.max_zenith,
        None,
        cfg.max_zenith,
        "NIMBUS_MAX_ZENITH",
        Some(nimbus_core::index::DEFAULT_DAYLIGHT_MAX_ZENITH_DEG),
    )?
    .expect("has default");

    let samples = match (&args.images, &args.luminance) {
        (Some(dir), None) => {
            let pattern = resolve(
                args.pattern.clone(),
                manifest.as_ref().map(|m| m.image_pattern.clone()),
                cfg.pattern.clone(),
                "NIMBUS_PATTERN",
                Some(DEFAULT_IMAGE_PATTERN.to_string()),
            )?
            .expect("has default");
            let scan_dir = match manifest.as_ref().and_then(|m| m.images_dir.as_ref()) {
                Some(sub) => root.join(sub),
                None => dir.clone(),
            };
            let outcome =
                scan_images(&scan_dir, &pattern, tz_offset_min).map_err(CliError::Core)?;
            for skip in &outcome.skipped {
                eprintln!("nimbus: skip: {}: {}", skip.path.display(), skip.reason);
            }
            let crop = resolve_crop(args, manifest.as_ref(), cfg)?;
            let mut samples = Vec::with_capacity(outcome.images.len());
            for image_ref in &outcome.images {
                let frame =
                    SkyImage::load(&image_ref.path, image_ref.timestamp).map_err(CliError::Core)?;
                let cropped = match crop {
                    Crop::Side(side) => crop_center(&frame, side),
                    Crop::Fraction(f) => {
                        let side = ((frame.width().min(frame.height()) as f64) * f).floor() as u32;
                        crop_center(&frame, side.max(1))
                    }
                }
                .map_err(CliError::Core)?;
                samples.push((
                    image_ref.timestamp,
                    mean_luminance(&cropped).map_err(CliError::Core)?,
                ));
            }
            samples
        }
        (None, Some(file)) => parse_luminance_csv(file).map_err(CliError::Core)?,
        _ => {
            return Err(CliError::Usage(
                "exactly one of --images or --luminance is required".into(),
            ))
        }
    };

    Ok(LoadedInput {
        samples,
        manifest,
        root,
        location,
        tz_offset_min,
        max_zenith_deg,
    })
}

enum Crop {
    Side(u32),
    Fraction(f64),
}

fn resolve_crop(
    args: &InputArgs,
    manifest: Option<&DatasetManifest>,
    cfg: &FileConfig,
) -> Result<Crop, CliError> {
    if let Some(f) = args.crop_fraction {
        if !(f > 0.0 && f <= 1.0) {
            return Err(CliError::Usage(format!(
                "--crop-fraction must lie in (0, 1], got {f}"
            )));
        }
        return Ok(Crop::Fraction(f));
    }
    let side = resolve(
        args.crop_side,
        manifest.and_then(|m| m.crop_side),
        cfg.crop_side,
        "NIMBUS_CROP_SIDE",
        Some(DEFAULT_CROP_SIDE),
    )?
    .expect("has default");
    Ok(Crop::Side(side))
}

fn locate_manifest(args: &InputArgs) -> Result<(PathBuf, Option<DatasetManifest>), CliError> {
    let root = match (&args.images, &args.luminance) {
        (Some(dir), None) => dir.clone(),
        (None, Some(file)) => file
            .parent()
            .filter(|p| !p.as_os_str().is_empty())
            .unwrap_or_else(|| Path::new("."))
            .to_path_buf(),
        _ => {
            return Err(CliError::Usage(
                "exactly one of --images or --luminance is required".into(),
            ))
        }
    };
    let manifest_path = root.join(MANIFEST_FILE);
    let manifest = if manifest_path.is_file() {
        Some(DatasetManifest::load(&manifest_path).map_err(CliError::Core)?)
    } else {
        None
    };
    Ok((root, manifest))
}

/// Resolve the irradiance-to-luminance calibration: an explicit coefficients
/// file wins, then the manifest, then a fallback fit that anchors the scale
/// to the dataset's own maxima (`alpha = max(L_m) / max(G_c)`).
pub fn resolve_calibration(
    args: &InputArgs,
    input: &LoadedInput,
) -> Result<LuminanceCalibration, CliError> {
    if let Some(path) = &args.calibration {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Core(Error::Ingest(format!("{}: {e}", path.display()))))?;
        let coefficients: CalibrationCoefficients = serde_json::from_str(&text)
            .map_err(|e| CliError::Core(Error::Ingest(format!("{}: {e}", path.display()))))?;
        return coefficients.to_calibration().map_err(CliError::Core);
    }
    if let Some(coefficients) = input.manifest.as_ref().and_then(|m| m.calibration) {
        return coefficients.to_calibration().map_err(CliError::Core);
    }

    let mut max_lm = 0.0_f64;
    let mut max_gc = 0.0_f64;
    for &(ts, l_m) in &input.samples {
        let ctx = SolarContext::at(&input.location, ts);
        if ctx.zenith_deg >= input.max_zenith_deg {
            continue;
        }
        let g_c = clear_sky_ghi(ctx.zenith_deg, ctx.eccentricity).map_err(CliError::Core)?;
        max_lm = max_lm.max(l_m);
        max_gc = max_gc.max(g_c.wm2());
    }
    if max_lm <= 0.0 || max_gc <= 0.0 {
        return Err(CliError::Core(Error::Calibration(
            "no usable daylight samples to derive a fallback luminance calibration; \
             pass --calibration"
                .into(),
        )));
    }
    LuminanceCalibration::new(max_lm / max_gc, 0.0).map_err(CliError::Core)
}
