import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sscal import metrics
from sscal.calib import AScan, CalibratedScan, ContractError
from sscal.scenario import Scenario, ascan, calibrate
from sscal.sweep_model import DomainError, rolloff_6db

# frozen from the closed forms
TRADEOFF_10UM_3MM_1MHZ = 3.18012436e8
ROLLOFF_0P2NM = 1.893163767e-3


def gaussian_ascan(center, sigma, step=1e-7, n=4000, scale=1.0, floor=0.0):
    z = np.arange(n) * step
    return AScan(z, scale * np.exp(-0.5 * ((z - center) / sigma) ** 2) + floor)


# fwhm ---------------------------------------------------------------------------

@pytest.mark.parametrize("sigma", [3e-6, 4.7e-6, 12e-6])
def test_fwhm_of_gaussian(sigma):
    w = metrics.fwhm(gaussian_ascan(150e-6, sigma))
    assert w == pytest.approx(2 * math.sqrt(2 * math.log(2)) * sigma, rel=5e-3)


def test_fwhm_of_calibrated_mirror():
    sc = Scenario()
    w = metrics.fwhm(ascan(sc, calibrate(sc, "realtime")), peak_hint=sc.depth)
    assert w == pytest.approx(11.1e-6, rel=0.10)


def test_fwhm_hint_selects_peak():
    a = gaussian_ascan(100e-6, 3e-6)
    b = gaussian_ascan(300e-6, 6e-6, scale=0.5)
    two = AScan(a.depth_axis, a.magnitude + b.magnitude)
    k = 2 * math.sqrt(2 * math.log(2))
    assert metrics.fwhm(two) == pytest.approx(k * 3e-6, rel=5e-3)
    assert metrics.fwhm(two, peak_hint=290e-6) == pytest.approx(k * 6e-6, rel=5e-3)
    assert metrics.peak_height(two, 310e-6) == pytest.approx(0.5, rel=1e-3)


@settings(max_examples=40)
@given(scale=st.floats(1e-6, 1e6), sigma=st.floats(2e-6, 20e-6))
def test_fwhm_scale_invariance(scale, sigma):
    a = gaussian_ascan(200e-6, sigma)
    b = gaussian_ascan(200e-6, sigma, scale=scale)
    assert metrics.fwhm(b) == pytest.approx(metrics.fwhm(a), rel=1e-9)


def test_fwhm_detection_errors():
    z = np.arange(100) * 1e-6
    with pytest.raises(metrics.DetectionError):
        metrics.fwhm(AScan(z, np.ones(100)))
    with pytest.raises(metrics.DetectionError):
        metrics.fwhm(AScan(z, np.zeros(100)))
    with pytest.raises(metrics.DetectionError):
        # weak peak on a high floor
        metrics.fwhm(gaussian_ascan(200e-6, 5e-6, floor=1.0))
    with pytest.raises(metrics.DetectionError):
        metrics.fwhm(gaussian_ascan(1e-6, 30e-6))


def test_outer_fwhm_spans_ripple():
    a = gaussian_ascan(200e-6, 3e-6)
    b = gaussian_ascan(220e-6, 3e-6, scale=0.9)
    two = AScan(a.depth_axis, a.magnitude + b.magnitude)
    inner = metrics.fwhm(two, peak_hint=200e-6)
    outer = metrics.fwhm(two, peak_hint=200e-6, outer=True)
    assert outer > 20e-6 > inner


# axial_resolution_sweep ---------------------------------------------------------------

def test_axial_sweep_reuses_trial_seeds():
    sc = Scenario()
    one = metrics.axial_resolution_sweep(sc, [998e-6], [8], trials=1, methods=("ekf",))
    three = metrics.axial_resolution_sweep(sc, [998e-6], [8], trials=3, methods=("ekf",))
    again = metrics.axial_resolution_sweep(sc, [998e-6], [8], trials=3, methods=("ekf",))
    assert one.cells[0].values[0] == three.cells[0].values[0]
    assert three.means().tolist() == again.means().tolist()
    assert three.cells[0].count == 3 and three.cells[0].std >= 0


def test_axial_sweep_flags_and_failures():
    sc = Scenario()
    rep = metrics.axial_resolution_sweep(sc, [514e-6, 998e-6], [8], trials=1, methods=("realtime",),
                                         target=11.1e-6)
    assert rep.flags == []
    bad = metrics.axial_resolution_sweep(sc, [998e-6], [8], trials=1, methods=("realtime",), target=5e-6)
    assert bad.flags == [bad.cells[0].params]
    broken = metrics.axial_resolution_sweep(sc, [998e-6], [8], trials=2, methods=("nonexistent",))
    assert broken.cells[0].count == 0 and len(broken.cells[0].failures) == 2
    assert broken.flags


# mse family ------------------------------------------------------------------------

def test_mse_examples():
    a = np.sin(np.arange(100.0))
    assert metrics.mse(a, a) == 0
    assert metrics.mse(a, a + 0.3) == pytest.approx(0.09, rel=1e-12)
    s = CalibratedScan(np.arange(100.0), a, "t")
    assert metrics.mse(s, a - 0.3) == pytest.approx(0.09, rel=1e-12)
    with pytest.raises(ContractError):
        metrics.mse(a, a[:-1])


@settings(max_examples=50)
@given(st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=50), st.integers(0, 100))
def test_mse_symmetric_nonnegative(xs, seed):
    a = np.array(xs)
    b = a + np.random.default_rng(seed).standard_normal(a.size)
    assert metrics.mse(a, b) == metrics.mse(b, a) >= 0


@pytest.mark.parametrize("sigma_k_sq", [1e-4, 1e-2])
def test_mse_matches_phase_noise_law(sigma_k_sq):
    rng = np.random.default_rng(11)
    phase = 2 * 998e-6 * np.linspace(4.4e6, 5.2e6, 4096)
    vals = [metrics.mse(np.cos(phase), np.cos(phase + math.sqrt(sigma_k_sq) * rng.standard_normal(phase.size)))
            for _ in range(50)]
    assert np.mean(vals) == pytest.approx(metrics.predicted_mse(sigma_k_sq, 1.0), rel=0.10)


def test_predicted_mse():
    assert metrics.predicted_mse(1e-6, 1) == pytest.approx(5e-7, rel=1e-15)
    assert metrics.predicted_mse(0, 17.0) == 0
    assert metrics.predicted_mse(3e-6, 4.0) == pytest.approx(12 * metrics.predicted_mse(1e-6, 1.0), rel=1e-15)
    with pytest.raises(DomainError):
        metrics.predicted_mse(-1, 1)


def test_mse_improvement():
    assert metrics.mse_improvement(1, 0) == 100
    assert metrics.mse_improvement(1, 1) == 0
    assert metrics.mse_improvement(4e-3, 1e-3) == pytest.approx(75)
    with pytest.raises(DomainError):
        metrics.mse_improvement(0, 0)


# trade-off ------------------------------------------------------------------------

def test_tradeoff():
    f = metrics.tradeoff(10e-6, 1e6, 3e-3)
    assert f == pytest.approx(TRADEOFF_10UM_3MM_1MHZ, rel=1e-8)
    assert metrics.tradeoff(10e-6, 2e6, 3e-3) == pytest.approx(2 * f, rel=1e-15)
    assert metrics.tradeoff_samples(1000, 1e6) == pytest.approx(1e9)
    with pytest.raises(DomainError):
        metrics.tradeoff(0, 1e6, 3e-3)


# roll-off -------------------------------------------------------------------------

def test_rolloff_curve_normalization_and_6db():
    z6 = 1.5e-3
    # Gaussian envelope reaching half amplitude at z6
    curve = metrics.rolloff_curve(np.linspace(0.1e-3, 3e-3, 30),
                                  lambda d: 3.0 * math.exp(-math.log(2) * (d / z6) ** 2))
    assert curve.db[0] == 0.0
    assert np.all(np.diff(curve.db) <= 0)
    assert curve.depth_6db == pytest.approx(z6, rel=0.01)


def test_rolloff_curve_records_failures():
    def peak(d):
        if d > 2e-3:
            raise metrics.DetectionError("lost")
        return 1.0
    curve = metrics.rolloff_curve([3e-3, 1e-3, 2e-3, 2.5e-3], peak)
    assert curve.depths.tolist() == [1e-3, 2e-3]
    assert len(curve.failures) == 2
    assert curve.depth_6db is None

    def never(d):
        raise ValueError("no peak")
    with pytest.raises(metrics.DetectionError):
        metrics.rolloff_curve([1e-3], never)


def test_rolloff_oracle_value():
    lk = 2 * math.pi * 0.2e-9 / 1310e-9**2
    assert rolloff_6db(lk) == pytest.approx(ROLLOFF_0P2NM, rel=1e-8)


# report ---------------------------------------------------------------------------

def test_report_rows_long_format():
    rep = metrics.MetricsReport("demo", "fwhm", "m")
    rep.add({"depth_m": 1e-3}, [1.0, 3.0], ["trial 2: lost"])
    rep.add({"depth_m": 2e-3}, [])
    rows = rep.rows()
    assert len(rows) == 8
    first = {r["statistic"]: r["value"] for r in rows[:4]}
    assert first == {"mean": 2.0, "std": 1.0, "count": 2, "failures": 1}
    assert all(r["quantity"] == "fwhm" and r["unit"] == "m" for r in rows)
    assert math.isnan(rows[4]["value"]) and rows[6]["value"] == 0
