#!/usr/bin/env python3
"""Reference solar-zenith-angle oracle.

Implements the NOAA solar calculator equations (Meeus-derived; good to about
0.01 degrees for 1900-2100) and prints geometric zenith angles for the test
points frozen into the Rust suite. The Rust implementation uses a different,
lower-order series, so the two routes are independent.

Self-check: the 2003-10-17 Denver point is the canonical NREL SPA example
(published topocentric zenith 50.11162 deg including refraction); this oracle
must land within a few hundredths of a degree of it.

Run:  python3 tools/solar_oracle.py
"""

import math
from datetime import datetime, timezone


def julian_day(dt):
    year, month = dt.year, dt.month
    day = (
        dt.day
        + dt.hour / 24
        + dt.minute / 1440
        + (dt.second + dt.microsecond / 1e6) / 86400
    )
    if month <= 2:
        year -= 1
        month += 12
    a = year // 100
    b = 2 - a + a // 4
    return math.floor(365.25 * (year + 4716)) + math.floor(30.6001 * (month + 1)) + day + b - 1524.5


def zenith_deg(dt_utc, lat_deg, lon_deg):
    jd = julian_day(dt_utc)
    t = (jd - 2451545.0) / 36525.0

    mean_long = (280.46646 + t * (36000.76983 + t * 0.0003032)) % 360.0
    mean_anom = 357.52911 + t * (35999.05029 - 0.0001537 * t)
    ecc = 0.016708634 - t * (0.000042037 + 0.0000001267 * t)

    m = math.radians(mean_anom)
    center = (
        math.sin(m) * (1.914602 - t * (0.004817 + 0.000014 * t))
        + math.sin(2 * m) * (0.019993 - 0.000101 * t)
        + math.sin(3 * m) * 0.000289
    )
    true_long = mean_long + center
    omega = 125.04 - 1934.136 * t
    app_long = true_long - 0.00569 - 0.00478 * math.sin(math.radians(omega))

    obliq0 = 23.0 + (26.0 + (21.448 - t * (46.815 + t * (0.00059 - t * 0.001813))) / 60.0) / 60.0
    obliq = obliq0 + 0.00256 * math.cos(math.radians(omega))

    decl = math.asin(math.sin(math.radians(obliq)) * math.sin(math.radians(app_long)))

    var_y = math.tan(math.radians(obliq / 2.0)) ** 2
    l0 = math.radians(mean_long)
    eot_min = 4.0 * math.degrees(
        var_y * math.sin(2 * l0)
        - 2 * ecc * math.sin(m)
        + 4 * ecc * var_y * math.sin(m) * math.cos(2 * l0)
        - 0.5 * var_y * var_y * math.sin(4 * l0)
        - 1.25 * ecc * ecc * math.sin(2 * m)
    )

    utc_minutes = dt_utc.hour * 60 + dt_utc.minute + dt_utc.second / 60.0
    tst = (utc_minutes + eot_min + 4.0 * lon_deg) % 1440.0
    hour_angle = tst / 4.0 - 180.0
    if hour_angle < -180.0:
        hour_angle += 360.0

    lat = math.radians(lat_deg)
    cos_zen = math.sin(lat) * math.sin(decl) + math.cos(lat) * math.cos(decl) * math.cos(
        math.radians(hour_angle)
    )
    cos_zen = max(-1.0, min(1.0, cos_zen))
    return math.degrees(math.acos(cos_zen))


POINTS = [
    # (label, utc datetime, lat, lon)
    ("denver_spa_canonical", datetime(2003, 10, 17, 19, 30, 30, tzinfo=timezone.utc), 39.742476, -105.1786),
    ("singapore_midday", datetime(2015, 12, 11, 5, 0, 0, tzinfo=timezone.utc), 1.34, 103.68),
    ("greenwich_equinox_noon", datetime(2015, 3, 20, 12, 8, 0, tzinfo=timezone.utc), 0.0, 0.0),
    ("sydney_winter_noon", datetime(2015, 6, 21, 2, 0, 0, tzinfo=timezone.utc), -33.8688, 151.2093),
    ("vienna_solstice", datetime(2015, 6, 21, 12, 0, 0, tzinfo=timezone.utc), 48.2082, 16.3738),
]


def main():
    for label, dt, lat, lon in POINTS:
        print(f"{label}: {dt.isoformat()} lat={lat} lon={lon} zenith={zenith_deg(dt, lat, lon):.5f}")


if __name__ == "__main__":
    main()
