#!/usr/bin/env python3
"""
Profile polynomial images on M_2 over small prime fields.
Only supports verbose logging via -v/--verbose.
Produces image-size bar charts and a sampling coverage curve with Matplotlib.
"""
import argparse
import itertools
import logging
import os
import sys
import time
from datetime import datetime

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.explorer import enumerate_image  # noqa: E402
from src.parser import parse_poly  # noqa: E402
from src.ring import RingSpec  # noqa: E402

# —— CONFIG ——
N               = 2
PRIMES          = (2, 3)
POLYS           = tuple(
    "x*z*y " + " ".join(f"{s} {w}" for s, w in zip(signs, ("x*y*z", "y*z*x", "z*y*x")))
    for signs in itertools.product("+-", repeat=3)
)
COVERAGE_POLY   = "x*y*z - z*y*x"
COVERAGE_STEPS  = (100, 300, 1000, 3000, 10000, 30000)
SEED            = 0
LOG_DIR         = "debug/logs"
PLOT_DIR        = "debug/plots"
TIMEFMT         = "%Y%m%d_%H%M%S"
SIZES_PLOT      = "image_sizes.png"
COVERAGE_PLOT   = "sampling_coverage.png"

# —— PARSE ARGS ——
parser = argparse.ArgumentParser(description="Plot image sizes of multilinear polynomials on M_2")
parser.add_argument('-v', '--verbose', action='store_true', help='Enable verbose console logging')
args = parser.parse_args()

# —— SETUP LOGGING ——
os.makedirs(LOG_DIR, exist_ok=True)
os.makedirs(PLOT_DIR, exist_ok=True)
timestamp = datetime.now().strftime(TIMEFMT)
log_file = os.path.join(LOG_DIR, f"image_profile_{timestamp}.log")

file_handler = logging.FileHandler(log_file)
file_handler.setLevel(logging.DEBUG)
file_handler.setFormatter(logging.Formatter(
    "%(asctime)s %(levelname)s %(message)s", datefmt="%Y-%m-%d %H:%M:%S"))

console_handler = logging.StreamHandler(sys.stdout)
console_handler.setLevel(logging.DEBUG if args.verbose else logging.INFO)
console_handler.setFormatter(logging.Formatter(
    "%(asctime)s %(levelname)s %(message)s", datefmt="%H:%M:%S"))

logging.basicConfig(level=logging.DEBUG, handlers=[file_handler, console_handler])
log = logging.getLogger("image_profile")


# —— MEASUREMENTS ——
def image_sizes(q):
    ring = RingSpec.gf(q)
    sizes = {}
    for text in POLYS:
        start = time.perf_counter()
        report = enumerate_image(parse_poly(text, ring), N, ring, seed=SEED)
        sizes[text] = report.size
        log.info(f"gf:{q} {text}: {report.size} matrices ({report.mode.value}, {time.perf_counter() - start:.2f}s)")
    return sizes


def coverage(q):
    ring = RingSpec.gf(q)
    f = parse_poly(COVERAGE_POLY, ring)
    points = []
    for count in COVERAGE_STEPS:
        report = enumerate_image(f, N, ring, budget=count, seed=SEED)
        points.append(report.size)
        log.debug(f"gf:{q} {count} samples -> {report.size} matrices")
    return points


# —— PLOTS ——
def plot_sizes(results):
    fig, axes = plt.subplots(1, len(results), figsize=(6 * len(results), 4), squeeze=False)
    for ax, (q, sizes) in zip(axes[0], results.items()):
        full, trace_zero = q ** (N * N), q ** (N * N - 1)
        ax.bar(range(len(sizes)), list(sizes.values()), color="#326ce5")
        ax.axhline(full, linestyle="--", color="black", label=f"M_{N} ({full})")
        ax.axhline(trace_zero, linestyle=":", color="red", label=f"trace zero ({trace_zero})")
        ax.set_xticks(range(len(sizes)))
        ax.set_xticklabels(list(sizes), rotation=35, ha="right", fontsize=8)
        ax.set_title(f"|f(M_{N}(GF({q})))|")
        ax.legend(fontsize=8)
    fig.tight_layout()
    path = os.path.join(PLOT_DIR, SIZES_PLOT)
    fig.savefig(path)
    log.info(f"Saved {path}")


def plot_coverage(curves):
    fig, ax = plt.subplots(figsize=(6, 4))
    for q, points in curves.items():
        ax.plot(COVERAGE_STEPS, points, marker="o", label=f"GF({q})")
    ax.set_xscale("log")
    ax.set_xlabel("sampled tuples")
    ax.set_ylabel("distinct values")
    ax.set_title(COVERAGE_POLY)
    ax.legend()
    fig.tight_layout()
    path = os.path.join(PLOT_DIR, COVERAGE_PLOT)
    fig.savefig(path)
    log.info(f"Saved {path}")


# —— MAIN ——
if __name__ == "__main__":
    results = {q: image_sizes(q) for q in PRIMES}
    plot_sizes(results)
    plot_coverage({q: coverage(q) for q in PRIMES})
