#!/usr/bin/env python3
"""High-precision oracle for the clear-sky GHI model and its helper terms.

Evaluates, at 50 significant digits:

    G = 0.8277 * E0 * 1366.1 * cos(theta_z)^1.3644 * exp(-0.0013 * (90 - theta_z))

with theta_z in degrees, plus the eccentricity-correction polynomial and the
day-angle formula. The printed values are frozen into the Rust test suite;
this script is the independent route those tests are checked against.

Run:  python3 tools/eq1_oracle.py
"""

from mpmath import mp, mpf, cos, sin, exp, pi

mp.dps = 50

SITE_FACTOR = mpf("0.8277")
SOLAR_CONSTANT = mpf("1366.1")
COS_EXPONENT = mpf("1.3644")
AIRMASS_DECAY = mpf("0.0013")


def ghi(theta_z_deg, e0):
    theta = mpf(theta_z_deg)
    if theta >= 90:
        return mpf(0)
    cos_term = cos(theta * pi / 180) ** COS_EXPONENT
    decay = exp(-AIRMASS_DECAY * (90 - theta))
    return SITE_FACTOR * mpf(e0) * SOLAR_CONSTANT * cos_term * decay


def eccentricity(gamma):
    g = mpf(gamma)
    return (
        mpf("1.00011")
        + mpf("0.034221") * cos(g)
        + mpf("0.001280") * sin(g)
        + mpf("0.000719") * cos(2 * g)
        + mpf("0.000077") * sin(2 * g)
    )


def day_angle(d_n):
    return 2 * pi * (d_n - 1) / 365


def main():
    print("# clear-sky GHI (W/m^2)")
    for theta, e0 in [(0, 1), (60, 1), (30, 1), (85, 1), (45, mpf("1.03"))]:
        print(f"ghi(theta_z={theta}, e0={e0}) = {mp.nstr(ghi(theta, e0), 20)}")

    print("\n# eccentricity correction")
    for gamma, label in [(mpf(0), "0"), (pi, "pi"), (pi / 2, "pi/2")]:
        print(f"e0(gamma={label}) = {mp.nstr(eccentricity(gamma), 20)}")

    sweep_min = min(eccentricity(day_angle(d)) for d in range(1, 367))
    sweep_max = max(eccentricity(day_angle(d)) for d in range(1, 367))
    print(f"e0 sweep over d_n=1..366: min={mp.nstr(sweep_min, 20)} max={mp.nstr(sweep_max, 20)}")

    print("\n# day angle (radians)")
    for d in [1, 183, 366]:
        print(f"day_angle({d}) = {mp.nstr(day_angle(d), 20)}")


if __name__ == "__main__":
    main()
