//! Solar geometry and the clear-sky global horizontal irradiance model.
//!
//! The GHI model is a site-calibrated single-term model for tropical
//! Singapore conditions:
//!
//! ```text
//! G_c = 0.8277 * E_0 * I_sc * cos(theta_z)^1.3644 * exp(-0.0013 * (90 - theta_z))
//! ```
//!
//! with the zenith angle `theta_z` in degrees both inside the cosine and in
//! the exponential term. `E_0` is the Earth-orbit eccentricity correction and
//! `I_sc` the solar constant. Below the horizon the model is undefined (the
//! cosine goes negative under a fractional power), so `G_c` is defined as 0
//! for `theta_z >= 90`.

use chrono::{DateTime, Datelike, Timelike, Utc};

use crate::error::{Error, Result};

/// Named constants of the clear-sky model, kept in one place so no
/// coefficient is ever inlined twice.
pub mod constants {
    /// Solar irradiance constant, W/m^2.
    pub const SOLAR_CONSTANT_WM2: f64 = 1366.1;

    /// Site factor of the clear-sky GHI model.
    pub const GHI_SITE_FACTOR: f64 = 0.8277;

    /// Exponent applied to cos(theta_z) in the GHI model.
    pub const GHI_COS_EXPONENT: f64 = 1.3644;

    /// Per-degree decay rate of the exponential airmass term.
    pub const GHI_AIRMASS_DECAY_PER_DEG: f64 = 0.0013;

    /// Eccentricity-correction Fourier coefficients: constant, cos, sin,
    /// cos(2x), sin(2x).
    pub const ECCENTRICITY_CONSTANT: f64 = 1.00011;
    pub const ECCENTRICITY_COS1: f64 = 0.034221;
    pub const ECCENTRICITY_SIN1: f64 = 0.001280;
    pub const ECCENTRICITY_COS2: f64 = 0.000719;
    pub const ECCENTRICITY_SIN2: f64 = 0.000077;

    /// Year length used by the day-angle formula (fixed at 365 even in leap
    /// years; the drift is far below the model's own fit error).
    pub const DAYS_PER_YEAR: f64 = 365.0;
}

/// A point on the Earth's surface, in degrees.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeoLocation {
    latitude_deg: f64,
    longitude_deg: f64,
}

impl GeoLocation {
    /// Latitude in [-90, 90], longitude in [-180, 180], east positive.
    pub fn new(latitude_deg: f64, longitude_deg: f64) -> Result<Self> {
        if !latitude_deg.is_finite() || !(-90.0..=90.0).contains(&latitude_deg) {
            return Err(Error::InvalidLatitude(latitude_deg));
        }
        if !longitude_deg.is_finite() || !(-180.0..=180.0).contains(&longitude_deg) {
            return Err(Error::InvalidLongitude(longitude_deg));
        }
        Ok(GeoLocation {
            latitude_deg,
            longitude_deg,
        })
    }

    pub fn latitude_deg(&self) -> f64 {
        self.latitude_deg
    }

    pub fn longitude_deg(&self) -> f64 {
        self.longitude_deg
    }
}

/// Solar geometry evaluated at one instant: day number, day angle,
/// eccentricity correction, and zenith angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolarContext {
    pub day_number: u32,
    pub day_angle_rad: f64,
    pub eccentricity: f64,
    pub zenith_deg: f64,
}

impl SolarContext {
    /// Evaluate the full solar context for `loc` at UTC instant `t`.
    pub fn at(loc: &GeoLocation, t: DateTime<Utc>) -> Self {
        let day_number = t.ordinal();
        // ordinal() is always 1..=366, so this cannot fail
        let day_angle_rad = day_angle(day_number).expect("calendar ordinal in range");
        SolarContext {
            day_number,
            day_angle_rad,
            eccentricity: eccentricity_correction(day_angle_rad),
            zenith_deg: solar_zenith_angle(loc, t),
        }
    }
}

/// Non-negative irradiance in W/m^2. Values produced by [`clear_sky_ghi`]
/// are additionally bounded above by `E_0 * I_sc` by construction.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Irradiance(f64);

impl Irradiance {
    pub fn new(wm2: f64) -> Result<Self> {
        if !wm2.is_finite() || wm2 < 0.0 {
            return Err(Error::NegativeIrradiance(wm2));
        }
        Ok(Irradiance(wm2))
    }

    pub fn wm2(&self) -> f64 {
        self.0
    }
}

/// Day angle in radians: `2*pi*(d_n - 1) / 365`.
///
/// `d_n = 366` is accepted and yields exactly one full turn; the formula
/// deliberately keeps 365 in the denominator in leap years.
pub fn day_angle(day_number: u32) -> Result<f64> {
    if !(1..=366).contains(&day_number) {
        return Err(Error::DayNumberOutOfRange(day_number));
    }
    Ok(std::f64::consts::TAU * f64::from(day_number - 1) / constants::DAYS_PER_YEAR)
}

/// Eccentricity correction factor for the Earth-Sun distance at day angle
/// `gamma` (radians). Stays within roughly [0.9666, 1.0351] over a year.
pub fn eccentricity_correction(gamma_rad: f64) -> f64 {
    constants::ECCENTRICITY_CONSTANT
        + constants::ECCENTRICITY_COS1 * gamma_rad.cos()
        + constants::ECCENTRICITY_SIN1 * gamma_rad.sin()
        + constants::ECCENTRICITY_COS2 * (2.0 * gamma_rad).cos()
        + constants::ECCENTRICITY_SIN2 * (2.0 * gamma_rad).sin()
}

// Fourier-series coefficients for solar declination (radians) in terms of
// the fractional-year angle. Accurate to ~0.03 degrees, well inside the
// 0.5-degree accuracy contract of `solar_zenith_angle`.
const DECLINATION_SERIES: [f64; 7] = [
    0.006918, -0.399912, 0.070257, -0.006758, 0.000907, -0.002697, 0.00148,
];

// Equation-of-time series (result in minutes after the 229.18 scale).
const EOT_SERIES: [f64; 5] = [0.000075, 0.001868, -0.032077, -0.014615, -0.040849];
const EOT_MINUTES_SCALE: f64 = 229.18;

fn declination_rad(fractional_year_rad: f64) -> f64 {
    let g = fractional_year_rad;
    DECLINATION_SERIES[0]
        + DECLINATION_SERIES[1] * g.cos()
        + DECLINATION_SERIES[2] * g.sin()
        + DECLINATION_SERIES[3] * (2.0 * g).cos()
        + DECLINATION_SERIES[4] * (2.0 * g).sin()
        + DECLINATION_SERIES[5] * (3.0 * g).cos()
        + DECLINATION_SERIES[6] * (3.0 * g).sin()
}

fn equation_of_time_minutes(fractional_year_rad: f64) -> f64 {
    let g = fractional_year_rad;
    EOT_MINUTES_SCALE
        * (EOT_SERIES[0]
            + EOT_SERIES[1] * g.cos()
            + EOT_SERIES[2] * g.sin()
            + EOT_SERIES[3] * (2.0 * g).cos()
            + EOT_SERIES[4] * (2.0 * g).sin())
}

/// Geometric solar zenith angle in degrees at `t` (UTC) for `loc`.
///
/// Uses series approximations for declination and the equation of time with
/// the hour angle derived from UTC plus longitude. Agrees with reference
/// ephemerides to well within 0.5 degrees; no refraction correction is
/// applied.
pub fn solar_zenith_angle(loc: &GeoLocation, t: DateTime<Utc>) -> f64 {
    let hour_utc = f64::from(t.hour())
        + f64::from(t.minute()) / 60.0
        + f64::from(t.second()) / 3600.0;
    // Hour-resolved fractional-year angle; sharper than the whole-day angle
    // for declination, which moves up to 0.4 degrees per day near equinox.
    let fractional_year = std::f64::consts::TAU
        * (f64::from(t.ordinal() - 1) + (hour_utc - 12.0) / 24.0)
        / constants::DAYS_PER_YEAR;

    let decl = declination_rad(fractional_year);
    let eot_min = equation_of_time_minutes(fractional_year);

    let solar_hour = hour_utc + eot_min / 60.0 + loc.longitude_deg / 15.0;
    let hour_angle_rad = (15.0 * (solar_hour - 12.0)).to_radians();

    let lat = loc.latitude_deg.to_radians();
    let cos_zenith = lat.sin() * decl.sin() + lat.cos() * decl.cos() * hour_angle_rad.cos();
    cos_zenith.clamp(-1.0, 1.0).acos().to_degrees()
}

/// Clear-sky global horizontal irradiance for zenith angle `zenith_deg`
/// (degrees) and eccentricity correction `e0`.
///
/// Returns 0 for `zenith_deg >= 90`: below the horizon the model's
/// fractional power of a negative cosine is undefined and there is no
/// direct clear-sky irradiance anyway.
pub fn clear_sky_ghi(zenith_deg: f64, e0: f64) -> Result<Irradiance> {
    if !zenith_deg.is_finite() || !(0.0..=180.0).contains(&zenith_deg) {
        return Err(Error::ZenithOutOfRange(zenith_deg));
    }
    if !e0.is_finite() || !(0.9..=1.1).contains(&e0) {
        return Err(Error::EccentricityOutOfRange(e0));
    }
    Ok(Irradiance(ghi_formula(zenith_deg, e0)))
}

// Unchecked model formula; the public wrapper validates the domain.
fn ghi_formula(zenith_deg: f64, e0: f64) -> f64 {
    if zenith_deg >= 90.0 {
        return 0.0;
    }
    let cos_term = zenith_deg
        .to_radians()
        .cos()
        .powf(constants::GHI_COS_EXPONENT);
    let decay = (-constants::GHI_AIRMASS_DECAY_PER_DEG * (90.0 - zenith_deg)).exp();
    constants::GHI_SITE_FACTOR * e0 * constants::SOLAR_CONSTANT_WM2 * cos_term * decay
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use chrono::TimeZone;

    // Frozen from tools/eq1_oracle.py (50-digit evaluation).
    const GHI_ORACLE_ZENITH_0: f64 = 1005.872632511369832;
    const GHI_ORACLE_ZENITH_60: f64 = 422.36958375631003666;
    const E0_ORACLE_GAMMA_PI: f64 = 0.966608;
    const DAY_ANGLE_ORACLE_183: f64 = 3.132985550429273257;

    fn singapore() -> GeoLocation {
        GeoLocation::new(1.34, 103.68).unwrap()
    }

    #[test]
    fn day_angle_first_day_is_zero() {
        assert_eq!(day_angle(1).unwrap(), 0.0);
    }

    #[test]
    fn day_angle_midyear_matches_oracle() {
        assert_relative_eq!(day_angle(183).unwrap(), DAY_ANGLE_ORACLE_183, epsilon = 1e-12);
    }

    #[test]
    fn day_angle_leap_day_overshoots_to_full_turn() {
        assert_relative_eq!(
            day_angle(366).unwrap(),
            std::f64::consts::TAU,
            epsilon = 1e-12
        );
    }

    #[test]
    fn day_angle_rejects_out_of_range() {
        assert!(day_angle(0).is_err());
        assert!(day_angle(367).is_err());
    }

    #[test]
    fn day_angle_monotone_in_day_number() {
        let mut prev = -1.0;
        for d in 1..=366 {
            let g = day_angle(d).unwrap();
            assert!(g > prev, "day angle not increasing at d_n={d}");
            prev = g;
        }
    }

    #[test]
    fn eccentricity_at_zero() {
        assert_relative_eq!(eccentricity_correction(0.0), 1.03505, epsilon = 1e-12);
    }

    #[test]
    fn eccentricity_at_pi_matches_oracle() {
        assert_relative_eq!(
            eccentricity_correction(std::f64::consts::PI),
            E0_ORACLE_GAMMA_PI,
            epsilon = 1e-9
        );
    }

    #[test]
    fn eccentricity_sweep_stays_in_envelope() {
        let mut gamma = 0.0;
        while gamma < std::f64::consts::TAU {
            let e0 = eccentricity_correction(gamma);
            assert!(
                (0.966..=1.036).contains(&e0),
                "E0={e0} out of envelope at gamma={gamma}"
            );
            gamma += 0.001;
        }
    }

    #[test]
    fn eccentricity_is_periodic() {
        for &gamma in &[0.0, 0.7, 2.1, 4.9] {
            let diff = eccentricity_correction(gamma)
                - eccentricity_correction(gamma + std::f64::consts::TAU);
            assert!(diff.abs() < 1e-12);
        }
    }

    #[test]
    fn ghi_zero_at_horizon() {
        assert_eq!(clear_sky_ghi(90.0, 1.0).unwrap().wm2(), 0.0);
        assert_eq!(clear_sky_ghi(110.0, 1.0).unwrap().wm2(), 0.0);
    }

    #[test]
    fn ghi_matches_oracle_at_zenith() {
        assert_relative_eq!(
            clear_sky_ghi(0.0, 1.0).unwrap().wm2(),
            GHI_ORACLE_ZENITH_0,
            max_relative = 1e-9
        );
    }

    #[test]
    fn ghi_matches_oracle_at_60_degrees() {
        assert_relative_eq!(
            clear_sky_ghi(60.0, 1.0).unwrap().wm2(),
            GHI_ORACLE_ZENITH_60,
            max_relative = 1e-9
        );
    }

    #[test]
    fn ghi_rejects_bad_inputs() {
        assert!(clear_sky_ghi(-0.1, 1.0).is_err());
        assert!(clear_sky_ghi(180.1, 1.0).is_err());
        assert!(clear_sky_ghi(45.0, 0.8).is_err());
        assert!(clear_sky_ghi(45.0, 1.2).is_err());
        assert!(clear_sky_ghi(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn ghi_decreasing_in_zenith_past_the_flat_top() {
        // the exponential term grows with theta, so the model has a shallow
        // maximum near 3.1 degrees (~0.2% above the zenith value); past it
        // the curve is strictly decreasing all the way to the horizon
        let mut theta = 3.2;
        let mut prev = f64::INFINITY;
        while theta < 90.0 {
            let g = clear_sky_ghi(theta, 1.0).unwrap().wm2();
            assert!(g < prev, "GHI not strictly decreasing at theta={theta}");
            prev = g;
            theta += 0.1;
        }
        // and the near-zenith bump stays within its analytic bound
        let g0 = clear_sky_ghi(0.0, 1.0).unwrap().wm2();
        let mut theta = 0.0;
        while theta < 3.2 {
            let g = clear_sky_ghi(theta, 1.0).unwrap().wm2();
            assert!(g >= g0 && g <= 1.0021 * g0, "unexpected shape at theta={theta}");
            theta += 0.1;
        }
    }

    #[test]
    fn ghi_linear_in_eccentricity() {
        // doubling E0 is an exact factor-of-two rescale of the formula
        for theta in [0.0, 10.0, 37.5, 65.0, 89.9, 120.0] {
            for e0 in [0.91, 0.97, 1.0, 1.05] {
                assert_eq!(ghi_formula(theta, 2.0 * e0), 2.0 * ghi_formula(theta, e0));
            }
        }
        // and within the validated band the per-E0 ratio is constant
        let a = clear_sky_ghi(40.0, 0.95).unwrap().wm2() / 0.95;
        let b = clear_sky_ghi(40.0, 1.05).unwrap().wm2() / 1.05;
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn ghi_bounded_by_extraterrestrial() {
        for theta in [0.0, 15.0, 45.0, 75.0, 89.0] {
            for e0 in [0.97, 1.0, 1.03] {
                let g = clear_sky_ghi(theta, e0).unwrap().wm2();
                assert!(g >= 0.0);
                assert!(g <= e0 * constants::SOLAR_CONSTANT_WM2);
            }
        }
    }

    #[test]
    fn zenith_small_at_greenwich_equinox_noon() {
        // solar noon at Greenwich near the March 2015 equinox
        let loc = GeoLocation::new(0.0, 0.0).unwrap();
        let t = Utc.with_ymd_and_hms(2015, 3, 20, 12, 8, 0).unwrap();
        let z = solar_zenith_angle(&loc, t);
        assert!(z < 0.5, "zenith {z} not near zero at equinox noon");
    }

    #[test]
    fn zenith_below_horizon_at_singapore_midnight() {
        // 2015-12-11 00:00 SGT == 2015-12-10 16:00 UTC
        let t = Utc.with_ymd_and_hms(2015, 12, 10, 16, 0, 0).unwrap();
        let z = solar_zenith_angle(&singapore(), t);
        assert!(z > 90.0, "zenith {z} should be below horizon at midnight");
    }

    #[test]
    fn zenith_matches_reference_at_singapore_midday() {
        // frozen from tools/solar_oracle.py
        let t = Utc.with_ymd_and_hms(2015, 12, 11, 5, 0, 0).unwrap();
        let z = solar_zenith_angle(&singapore(), t);
        assert!((z - 24.30753).abs() < 0.5, "zenith {z} drifts from reference");
    }

    #[test]
    fn zenith_unimodal_over_one_day() {
        let loc = singapore();
        let base = Utc.with_ymd_and_hms(2015, 12, 11, 0, 0, 0).unwrap();
        let zeniths: Vec<f64> = (0..720)
            .map(|i| solar_zenith_angle(&loc, base + chrono::Duration::minutes(2 * i)))
            .collect();
        let mut sign_changes = 0;
        let mut prev_diff = 0.0_f64;
        for w in zeniths.windows(2) {
            let diff = w[1] - w[0];
            if diff == 0.0 {
                continue;
            }
            if prev_diff < 0.0 && diff > 0.0 {
                sign_changes += 1;
            }
            prev_diff = diff;
        }
        assert_eq!(sign_changes, 1, "zenith trace should have a single minimum");
    }

    #[test]
    fn context_carries_consistent_fields() {
        let t = Utc.with_ymd_and_hms(2015, 12, 11, 5, 0, 0).unwrap();
        let ctx = SolarContext::at(&singapore(), t);
        assert_eq!(ctx.day_number, 345);
        assert_relative_eq!(
            ctx.day_angle_rad,
            day_angle(345).unwrap(),
            epsilon = 1e-15
        );
        assert_relative_eq!(
            ctx.eccentricity,
            eccentricity_correction(ctx.day_angle_rad),
            epsilon = 1e-15
        );
        assert!((0.0..=180.0).contains(&ctx.zenith_deg));
    }

    #[test]
    fn geolocation_validation() {
        assert!(GeoLocation::new(90.1, 0.0).is_err());
        assert!(GeoLocation::new(-90.1, 0.0).is_err());
        assert!(GeoLocation::new(0.0, 180.1).is_err());
        assert!(GeoLocation::new(0.0, -180.1).is_err());
        assert!(GeoLocation::new(1.34, 103.68).is_ok());
    }

    #[test]
    fn irradiance_rejects_negative() {
        assert!(Irradiance::new(-1.0).is_err());
        assert!(Irradiance::new(f64::NAN).is_err());
        assert_eq!(Irradiance::new(0.0).unwrap().wm2(), 0.0);
    }
}
