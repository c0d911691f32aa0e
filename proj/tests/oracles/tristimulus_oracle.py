"""Brute-force tristimulus reference values for test_colorimetry.cpp.

Midpoint Riemann sum at 0.1 nm over the piecewise-linear interpolants of the
ramp SPD and the CIE 1931 2-degree CMF table, normalized so that Y = 100.
Run from the repository root: python3 tests/oracles/tristimulus_oracle.py
"""
import csv

rows = list(csv.DictReader(open("data/cie1931_2deg_5nm.csv")))
lam = [float(r["wavelength_nm"]) for r in rows]
cmf = [[float(r[c]) for r in rows] for c in ("xbar", "ybar", "zbar")]


def ramp(l):
    return 0.5 + (l - 360.0) / 470.0


def interp(xs, ys, x):
    for i in range(len(xs) - 1):
        if xs[i] <= x <= xs[i + 1]:
            t = (x - xs[i]) / (xs[i + 1] - xs[i])
            return ys[i] * (1 - t) + ys[i + 1] * t
    raise ValueError(x)


step = 0.1
n = round((lam[-1] - lam[0]) / step)
sums = [0.0, 0.0, 0.0]
for j in range(n):
    x = lam[0] + (j + 0.5) * step
    phi = ramp(x)
    for c in range(3):
        sums[c] += phi * interp(lam, cmf[c], x) * step

k = 100.0 / sums[1]
print("k = %.12g" % k)
print("X = %.12g  Y = %.12g  Z = %.12g" % tuple(k * s for s in sums))
