"""End-to-end acceptance checks, one per criterion.

Each test records a PASS/FAIL line that is printed in the terminal summary
(and directly when this file is run as a script), then asserts.
"""
import math
import time
from fractions import Fraction

import numpy as np
import pytest

from sscal import bench, demod, metrics
from sscal.scenario import Scenario, ascan, calibrate, uncalibrated

RESULTS = {}


def record(number: int, title: str, passed: bool, detail: str):
    RESULTS[number] = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}  {title}: {detail}"
    assert passed, RESULTS[number]


def failed_checks(res: bench.BenchResult) -> str:
    bad = [f"{c.name} ({c.detail})" for c in res.checks if not c.passed]
    return "; ".join(bad) if bad else f"all {len(res.checks)} checks pass"


def timed(fn):
    t0 = time.perf_counter()
    out = fn()
    return out, time.perf_counter() - t0


def test_axial_resolution_grid():
    res, secs = timed(lambda: bench.run("table31", Scenario(), trials=100))
    cells = res.reports[0].cells
    lo = min(c.mean for c in cells) * 1e6
    hi = max(c.mean for c in cells) * 1e6
    ok = res.passed and len(cells) == 18 and secs < 300 and Scenario().n_samples == 4096
    record(1, "axial resolution", ok,
           f"{len(cells)} cells, FWHM {lo:.3f}-{hi:.3f} um vs 11.1 um +-15%, {secs:.0f} s; {failed_checks(res)}")


def test_calibration_necessity():
    base = Scenario(depth=1481e-6)
    p0 = base.profile
    # quadratic sweep sitting exactly on the nonlinearity threshold |a2 T^2| = 0.2 a1 T
    a1 = p0.span / (p0.t_scan * 1.2)
    sc = base.with_(sweep_coeffs=(p0.k0, a1, 0.2 * a1 / p0.t_scan, 0.0))
    p = sc.profile
    nonlin = abs(p.a2 * p.t_scan**2) / (p.a1 * p.t_scan)
    cal = metrics.fwhm(ascan(sc, calibrate(sc, "realtime")), peak_hint=sc.depth)
    unc = metrics.fwhm(ascan(sc, uncalibrated(sc)), peak_hint=sc.depth, outer=True)
    ok = nonlin >= 0.2 - 1e-12 and unc >= 3 * cal
    record(2, "calibration necessity", ok,
           f"|a2 T^2|/(a1 T) = {nonlin:.3f}; uncalibrated {unc * 1e6:.1f} um vs calibrated {cal * 1e6:.2f} um "
           f"(ratio {unc / cal:.1f}, need >= 3)")


def test_ekf_superiority():
    res, secs = timed(lambda: bench.run("noise-sweep", Scenario(), trials=50))
    ratios = res.summary["ratio_by_snr"]
    worst = max(ratios.values())
    ok = res.passed and sorted(ratios) == [10, 15, 20, 25, 30] and secs < 180
    record(3, "EKF vs Hilbert", ok, f"worst MSE_k ratio {worst:.4f} (<= 0.1), {secs:.0f} s; {failed_checks(res)}")


def test_mse_closed_form():
    res = bench.run("mse-law", Scenario(), trials=1000)
    record(4, "MSE closed form", res.passed,
           "; ".join(c.detail for c in res.checks) if res.passed else failed_checks(res))


def test_resampling_behavior():
    res = bench.run("osr-surface", Scenario(), trials=20)
    record(5, "resampling behavior", res.passed, failed_checks(res))


def test_perturbation_floor():
    res = bench.run("perturbation", Scenario(), trials=20)
    record(6, "perturbation floor", res.passed, res.checks[0].detail)


def test_op_counts():
    hilbert = demod.count_ops("hilbert", 17, 1024).total
    problems = []
    if hilbert != 34816:
        problems.append(f"hilbert total {hilbert}")
    for P in (8, 16, 32, 64):
        c = demod.OpCounter()
        demod.split_radix_fft(np.zeros(P), c)
        adds, mults = demod.ipdft_block_ops(P)
        if (Fraction(c.adds), Fraction(c.mults)) != (adds, mults):
            problems.append(f"P={P}: measured {c.adds} adds/{c.mults} mults, closed form {adds}/{mults}")
    record(7, "op counts", not problems,
           "hilbert 2HL = 34816; per-block forms match" if not problems else "; ".join(problems))


def test_timing_directions():
    res = bench.run("timing", lengths=(4096, 8192, 16384), repeats=7)
    record(8, "timing directions", res.passed, failed_checks(res))


def test_rolloff():
    res = bench.run("rolloff", Scenario())
    record(9, "roll-off", res.passed, res.checks[0].detail if res.passed else failed_checks(res))


def test_clock_and_skew():
    res = bench.run("skew", Scenario())
    skews = [float(c.name.split("=")[1].rstrip("s")) for c in res.checks if c.name.startswith("lms")]
    ok = res.passed and max(abs(s) for s in skews) >= 1e-9
    record(10, "LCS clock and skew", ok, failed_checks(res))


def test_ipdft_accuracy():
    P = 64
    n = np.arange(P)
    bound = 1e-4 * 2 * math.pi / P
    problems, worst = [], 0.0
    # bins 8.3 to 16.3 span the 4-8 samples-per-fringe carrier band
    for b in (8.3, 12.3, 16.3):
        w = 2 * math.pi * b / P
        x = np.cos(w * n + 0.4)[None]
        for method in ("RVCI", "BY2"):
            p = demod.IpdftParams(P, method, 1)
            om, d = demod.block_estimates(x, p)
            om10, d10 = demod.block_estimates(10 * x, p)
            err = abs(om[0] - w)
            worst = max(worst, err / bound)
            if err > bound:
                problems.append(f"{method} bin {b}: error {err / (2 * math.pi / P):.2e} bins")
            if abs(om10[0] - om[0]) >= 1e-12 or abs(d10[0] - d[0]) >= 1e-12:
                problems.append(f"{method} bin {b}: not scale invariant")
    record(11, "IpDFT accuracy", not problems,
           f"worst error {worst:.2f} of the 1e-4 bin bound; 10x scaling changes < 1e-12" if not problems
           else "; ".join(problems))


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q"]))
