//! Measured image luminance and the irradiance-to-luminance calibration.
//!
//! The measured luminance `L_m` of a frame is the mean per-pixel luminance of
//! a centered square crop, normalized to [0, 1]. The clear-sky luminance
//! `L_c` is obtained from the modeled clear-sky irradiance through a fitted
//! linear map (through the origin by default).

use std::path::Path;

use chrono::{DateTime, Utc};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::solar::Irradiance;

/// Rec. 709 luma weights for gamma-encoded R, G, B.
pub const LUMA_WEIGHTS_REC709: [f64; 3] = [0.2126, 0.7152, 0.0722];

/// Division guard: a clear-sky luminance at or below this is treated as
/// night and the sample is excluded from the index series.
pub const NIGHT_LUMINANCE_EPS: f64 = 1e-6;

/// A timestamped 8-bit RGB frame from a whole-sky imager.
#[derive(Debug, Clone, PartialEq)]
pub struct SkyImage {
    timestamp: DateTime<Utc>,
    width: u32,
    height: u32,
    /// Row-major RGB triplets.
    pixels: Vec<u8>,
}

impl SkyImage {
    pub fn new(timestamp: DateTime<Utc>, width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::EmptyImage);
        }
        let expected = width as usize * height as usize * 3;
        if pixels.len() != expected {
            return Err(Error::PixelBufferMismatch {
                width,
                height,
                expected,
                got: pixels.len(),
            });
        }
        Ok(SkyImage {
            timestamp,
            width,
            height,
            pixels,
        })
    }

    /// A width x height frame filled with one RGB color.
    pub fn uniform(timestamp: DateTime<Utc>, width: u32, height: u32, rgb: [u8; 3]) -> Result<Self> {
        let n = width as usize * height as usize;
        let mut pixels = Vec::with_capacity(n * 3);
        for _ in 0..n {
            pixels.extend_from_slice(&rgb);
        }
        SkyImage::new(timestamp, width, height, pixels)
    }

    /// Decode a PNG or JPEG file into an RGB frame.
    pub fn load(path: &Path, timestamp: DateTime<Utc>) -> Result<Self> {
        let decoded = image::open(path).map_err(|source| Error::ImageDecode {
            path: path.to_path_buf(),
            source,
        })?;
        let rgb = decoded.to_rgb8();
        SkyImage::new(timestamp, rgb.width(), rgb.height(), rgb.into_raw())
    }

    pub fn timestamp(&self) -> DateTime<Utc> {
        self.timestamp
    }

    pub fn width(&self) -> u32 {
        self.width
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn pixel(&self, x: u32, y: u32) -> [u8; 3] {
        let i = (y as usize * self.width as usize + x as usize) * 3;
        [self.pixels[i], self.pixels[i + 1], self.pixels[i + 2]]
    }
}

/// Centered `side x side` crop. When the margin is odd the extra row/column
/// stays on the bottom/right.
pub fn crop_center(img: &SkyImage, side: u32) -> Result<SkyImage> {
    if side == 0 {
        return Err(Error::CropTooSmall);
    }
    if side > img.width || side > img.height {
        return Err(Error::CropTooLarge {
            side,
            width: img.width,
            height: img.height,
        });
    }
    let x0 = ((img.width - side) / 2) as usize;
    let y0 = ((img.height - side) / 2) as usize;
    let mut pixels = Vec::with_capacity(side as usize * side as usize * 3);
    for row in 0..side as usize {
        let src_row = y0 + row;
        let start = (src_row * img.width as usize + x0) * 3;
        pixels.extend_from_slice(&img.pixels[start..start + side as usize * 3]);
    }
    SkyImage::new(img.timestamp, side, side, pixels)
}

/// Mean luminance of the frame in [0, 1] using Rec. 709 weights.
pub fn mean_luminance(img: &SkyImage) -> Result<f64> {
    mean_luminance_weighted(img, &LUMA_WEIGHTS_REC709)
}

/// Mean luminance with caller-supplied channel weights.
///
/// Channel sums are accumulated in integers, so the result is exactly
/// invariant under pixel permutation and depends on a uniform image only
/// through its color, not its size.
pub fn mean_luminance_weighted(img: &SkyImage, weights: &[f64; 3]) -> Result<f64> {
    let n = img.width as u64 * img.height as u64;
    if n == 0 {
        return Err(Error::EmptyImage);
    }
    let mut sums = [0u64; 3];
    for px in img.pixels.chunks_exact(3) {
        sums[0] += u64::from(px[0]);
        sums[1] += u64::from(px[1]);
        sums[2] += u64::from(px[2]);
    }
    let n = n as f64;
    let mean = weights[0] * (sums[0] as f64 / n)
        + weights[1] * (sums[1] as f64 / n)
        + weights[2] * (sums[2] as f64 / n);
    Ok(mean / 255.0)
}

/// Linear irradiance-to-luminance map: `L = alpha * G + beta`, clamped at 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LuminanceCalibration {
    alpha: f64,
    beta: f64,
}

impl LuminanceCalibration {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !alpha.is_finite() || alpha <= 0.0 {
            return Err(Error::Calibration(format!(
                "luminance scale alpha must be positive, got {alpha}"
            )));
        }
        if !beta.is_finite() {
            return Err(Error::Calibration(format!(
                "luminance offset beta must be finite, got {beta}"
            )));
        }
        Ok(LuminanceCalibration { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    /// Expected luminance for irradiance `g_wm2`, clamped below at 0.
    pub fn luminance(&self, g_wm2: f64) -> f64 {
        (self.alpha * g_wm2 + self.beta).max(0.0)
    }
}

/// Modeled clear-sky luminance for clear-sky irradiance `g_c`.
pub fn clear_sky_luminance(g_c: Irradiance, cal: &LuminanceCalibration) -> f64 {
    cal.luminance(g_c.wm2())
}

/// Least-squares fit of `L ~ alpha * G` through the origin over designated
/// clear-sky `(G, L)` pairs.
pub fn fit_calibration(pairs: &[(f64, f64)]) -> Result<LuminanceCalibration> {
    validate_fit_input(pairs)?;
    let sum_gl: f64 = pairs.iter().map(|(g, l)| g * l).sum();
    let sum_gg: f64 = pairs.iter().map(|(g, _)| g * g).sum();
    let alpha = sum_gl / sum_gg;
    if alpha <= 0.0 {
        return Err(Error::Calibration(format!(
            "fitted luminance scale is non-positive ({alpha}); the designated intervals are not clear-sky"
        )));
    }
    LuminanceCalibration::new(alpha, 0.0)
}

/// Affine least-squares fit `L ~ alpha * G + beta` for cameras with a known
/// dark offset.
pub fn fit_calibration_affine(pairs: &[(f64, f64)]) -> Result<LuminanceCalibration> {
    validate_fit_input(pairs)?;
    let n = pairs.len() as f64;
    let mean_g: f64 = pairs.iter().map(|(g, _)| g).sum::<f64>() / n;
    let mean_l: f64 = pairs.iter().map(|(_, l)| l).sum::<f64>() / n;
    let cov: f64 = pairs
        .iter()
        .map(|(g, l)| (g - mean_g) * (l - mean_l))
        .sum();
    let var: f64 = pairs.iter().map(|(g, _)| (g - mean_g) * (g - mean_g)).sum();
    let alpha = cov / var;
    if alpha <= 0.0 {
        return Err(Error::Calibration(format!(
            "fitted luminance scale is non-positive ({alpha}); the designated intervals are not clear-sky"
        )));
    }
    LuminanceCalibration::new(alpha, mean_l - alpha * mean_g)
}

fn validate_fit_input(pairs: &[(f64, f64)]) -> Result<()> {
    if pairs.len() < 2 {
        return Err(Error::Calibration(format!(
            "calibration fit needs at least 2 (irradiance, luminance) pairs, got {}",
            pairs.len()
        )));
    }
    if pairs.iter().any(|(g, l)| !g.is_finite() || !l.is_finite()) {
        return Err(Error::Calibration(
            "calibration pairs must be finite".into(),
        ));
    }
    if pairs.iter().any(|(g, _)| *g <= 0.0) {
        return Err(Error::Calibration(
            "calibration pairs require positive irradiance".into(),
        ));
    }
    let first = pairs[0].0;
    if pairs.iter().all(|(g, _)| *g == first) {
        return Err(Error::Calibration(
            "calibration pairs are degenerate: all irradiance values are equal".into(),
        ));
    }
    Ok(())
}

/// One measured/modeled luminance pair in the time series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LuminanceSample {
    pub timestamp: DateTime<Utc>,
    /// Normalized measured luminance in [0, 1].
    pub l_m: f64,
    /// Modeled clear-sky luminance, >= 0.
    pub l_c: f64,
}
