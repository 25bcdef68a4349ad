#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
# Copyright Contributors to the lutherfilter Project.
"""Generates the small synthetic dataset shipped for CI and examples.

Writes ci_camera.csv (a plausible non-colorimetric RGB camera),
ci_illuminants.csv (8 lights: blackbody radiators, a daylight-like curve,
two spiky fluorescent-like lamps and the equal-energy illuminant) and
ci_reflectances.csv (24 smooth surfaces). Everything is a closed-form
function of wavelength, so the output is reproducible without a seed.
"""

import math
import os

WAVELENGTHS = list(range(400, 701, 10))
OUT_DIR = os.path.join(os.path.dirname(__file__), os.pardir, "data")


def gauss(wl, mu, sigma):
    return math.exp(-((wl - mu) / sigma) ** 2)


def planck(wl_nm, temp_k):
    wl = wl_nm * 1e-9
    c1 = 3.741771852e-16
    c2 = 1.438776877e-2
    return c1 / (wl ** 5) / (math.expm1(c2 / (wl * temp_k)))


def camera_channels(wl):
    r = 0.92 * gauss(wl, 608, 36) + 0.10 * gauss(wl, 455, 28)
    g = 0.98 * gauss(wl, 542, 40)
    b = 0.95 * gauss(wl, 462, 29)
    return r, g, b


def daylike(wl):
    # Smooth daylight-ish continuum (not the CIE D65 table).
    return 60 + 55 * gauss(wl, 460, 90) - 12 * gauss(wl, 590, 40)


def fluor_cool(wl):
    return (18 + 85 * gauss(wl, 435, 12) + 95 * gauss(wl, 545, 14)
            + 55 * gauss(wl, 612, 16))


def fluor_warm(wl):
    return (22 + 45 * gauss(wl, 440, 14) + 70 * gauss(wl, 550, 18)
            + 95 * gauss(wl, 615, 20))


def normalized(spd):
    peak = max(spd)
    return [100.0 * v / peak for v in spd]


LIGHTS = [
    ("planck2856", lambda wl: planck(wl, 2856.0)),
    ("planck3500", lambda wl: planck(wl, 3500.0)),
    ("planck4500", lambda wl: planck(wl, 4500.0)),
    ("planck5500", lambda wl: planck(wl, 5500.0)),
    ("planck6500", lambda wl: planck(wl, 6500.0)),
    ("daylike", daylike),
    ("fluor_cool", fluor_cool),
    ("fluor_warm", fluor_warm),
]

# (base, [(amplitude, centre, width), ...]) per surface; clipped to
# [0.02, 0.95]. Neutral steps first, then chromatic patches.
SURFACES = [
    (0.90, []),
    (0.59, []),
    (0.36, []),
    (0.19, []),
    (0.09, []),
    (0.03, []),
    (0.08, [(0.70, 640, 45)]),                      # red
    (0.06, [(0.62, 545, 40)]),                      # green
    (0.05, [(0.66, 455, 38)]),                      # blue
    (0.10, [(0.74, 585, 55)]),                      # yellow
    (0.08, [(0.55, 495, 45)]),                      # cyan
    (0.12, [(0.48, 440, 35), (0.52, 645, 45)]),     # magenta
    (0.15, [(0.45, 600, 70)]),                      # light skin
    (0.08, [(0.26, 610, 60)]),                      # dark skin
    (0.06, [(0.30, 545, 35), (0.18, 680, 30)]),     # foliage
    (0.10, [(0.45, 470, 50)]),                      # sky blue
    (0.20, [(0.55, 620, 80)]),                      # orange
    (0.05, [(0.40, 420, 28)]),                      # violet
    (0.25, [(0.35, 560, 90)]),                      # olive
    (0.14, [(0.28, 520, 30), (0.30, 600, 35)]),     # mixed bump
    (0.40, [(0.35, 650, 60)]),                      # pink
    (0.30, [(-0.22, 570, 45)]),                     # notched neutral
    (0.55, [(-0.30, 460, 40)]),                     # warm gray
    (0.45, [(0.25, 500, 120)]),                     # broad greenish
]


def surface_value(wl, base, bumps):
    v = base + sum(a * gauss(wl, mu, sigma) for a, mu, sigma in bumps)
    return min(max(v, 0.02), 0.95)


def write_csv(name, header, rows):
    path = os.path.join(OUT_DIR, name)
    with open(path, "w", encoding="utf-8") as f:
        f.write("# Synthetic CI dataset; regenerate with "
                "scripts/make_ci_dataset.py\n")
        f.write("wavelength_nm," + ",".join(header) + "\n")
        for wl, values in zip(WAVELENGTHS, rows):
            f.write(str(wl) + "," + ",".join(repr(v) for v in values) + "\n")
    print("wrote", path)


def main():
    write_csv("ci_camera.csv", ["r", "g", "b"],
              [camera_channels(wl) for wl in WAVELENGTHS])

    columns = []
    for _, fn in LIGHTS:
        columns.append(normalized([fn(wl) for wl in WAVELENGTHS]))
    write_csv("ci_illuminants.csv", [name for name, _ in LIGHTS],
              [[col[i] for col in columns] for i in range(len(WAVELENGTHS))])

    names = ["s%02d" % (i + 1) for i in range(len(SURFACES))]
    write_csv("ci_reflectances.csv", names,
              [[surface_value(wl, base, bumps) for base, bumps in SURFACES]
               for wl in WAVELENGTHS])


if __name__ == "__main__":
    main()
