import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sscal.sweep_model import DomainError, InvariantError, MziGeometry, ReflectivityProfile, SweepProfile
from sscal.synth import (
    AdcModel,
    NoiseModel,
    SampledSignal,
    interferogram_values,
    make_rng,
    perturb_depth,
    quantize,
    synth_interferogram,
    synth_mzi,
    uniform_times,
)


def test_sampled_signal_invariants():
    with pytest.raises(InvariantError):
        SampledSignal(np.array([0.0, 0.0]), np.array([1.0, 2.0]))
    with pytest.raises(InvariantError):
        SampledSignal(np.array([0.0, 1.0]), np.array([1.0]))
    s = SampledSignal.uniform_grid(np.zeros(5), 10.0)
    assert s.uniform and s.rate == 10.0
    assert np.allclose(s.times, np.arange(5) / 10.0)


def test_noise_and_adc_invariants():
    with pytest.raises(InvariantError):
        NoiseModel(-1.0)
    with pytest.raises(InvariantError):
        AdcModel(0, 1.0, 1.0)
    with pytest.raises(InvariantError):
        AdcModel(25, 1.0, 1.0)
    with pytest.raises(InvariantError):
        AdcModel(8, 0.0, 1.0)


def test_mzi_zero_delay_is_constant_shape():
    # dl must be positive, so use a delay so small that the phase barely moves
    p = SweepProfile.linear(1.0, 1.0, 1.0)
    t = np.linspace(0, 1, 101)
    s = synth_mzi(p, MziGeometry(1e-12), None, t)
    assert np.allclose(s.values, 1.0, atol=1e-20)


def test_mzi_linear_sweep_is_tone():
    dl, a1 = 2e-3, 1e9
    p = SweepProfile(0.0, a1, 0.0, 0.0, 1e-3)
    t = np.arange(4096) / 4.096e6
    s = synth_mzi(p, MziGeometry(dl), None, t)
    f = dl * a1 / (2 * math.pi)
    assert np.allclose(s.values, np.cos(2 * math.pi * f * t), atol=1e-9)


def test_mzi_instantaneous_frequency_from_zero_crossings(cubic_profile):
    p = cubic_profile
    dl = 4.3e-3
    t = np.linspace(0, p.t_scan, 400001)
    x = synth_mzi(p, MziGeometry(dl), None, t).values
    i = np.flatnonzero(np.signbit(x[1:]) != np.signbit(x[:-1]))
    tz = t[i] - x[i] * (t[i + 1] - t[i]) / (x[i + 1] - x[i])
    mid = 0.5 * (tz[1:] + tz[:-1])
    f_meas = 0.5 / np.diff(tz)
    f_true = dl * p.slope(mid) / (2 * math.pi)
    assert np.max(np.abs(f_meas / f_true - 1)) < 1e-3


def test_grid_outside_sweep():
    p = SweepProfile.linear(1.0, 1.0, 1.0)
    with pytest.raises(DomainError):
        synth_mzi(p, MziGeometry(1.0), None, np.array([0.0, 1.5]))
    with pytest.raises(DomainError):
        synth_interferogram(p, ReflectivityProfile(1.0, 0.0), None, np.array([]))


def test_reference_only_is_dc(cubic_profile, desk):
    t = desk.times()
    spec = desk.spectrum
    v = interferogram_values(cubic_profile, ReflectivityProfile(0.8, 0.0), spec, t)
    k = cubic_profile.k0 + t * (cubic_profile.a1 + t * (cubic_profile.a2 + t * cubic_profile.a3))
    assert np.allclose(v, 0.25 * spec.shape(k) * 0.8, rtol=1e-14)


def test_zero_path_difference_is_constant():
    p = SweepProfile.linear(5e6, 1e5, 1.0)
    v = interferogram_values(p, ReflectivityProfile(1.0, 0.0, ((0.0, 1.0),)), None, np.linspace(0, 1, 50))
    assert np.allclose(v, v[0], rtol=0, atol=1e-15)


def test_single_mirror_phase_excursion_and_fft_peak():
    n = 4096
    span = 2 * math.pi * 1e5
    p = SweepProfile.linear(4.7e6, span, 1.0)
    depth = 500e-6
    t = np.arange(n) / n
    v = interferogram_values(p, ReflectivityProfile.mirror(depth), None, t)
    # cosine of 2·k·depth: total excursion 2·Δk_sweep·depth rad over the scan
    cycles = 2 * span * (n - 1) / n * depth / (2 * math.pi)
    spec = np.abs(np.fft.rfft(v - v.mean()))
    assert abs(int(np.argmax(spec)) - cycles) <= 1


def test_superposition():
    p = SweepProfile.s_shaped(4.7e6, 6e5, 1.0, 0.3)
    t = np.linspace(0, 1, 1000)
    a = ((-300e-6, 0.3),)
    b = ((-700e-6, 0.6),)
    ref = interferogram_values(p, ReflectivityProfile(1.0, 0.0), None, t)
    va = interferogram_values(p, ReflectivityProfile(1.0, 0.0, a), None, t)
    vb = interferogram_values(p, ReflectivityProfile(1.0, 0.0, b), None, t)
    vab = interferogram_values(p, ReflectivityProfile(1.0, 0.0, a + b), None, t)
    assert np.allclose(vab, va + vb - ref, atol=1e-14)


def test_autocorrelation_flag():
    p = SweepProfile.linear(4.7e6, 6e5, 1.0)
    t = np.linspace(0, 1, 500)
    refl = ReflectivityProfile(1.0, 0.0, ((-300e-6, 0.25), (-500e-6, 0.25)))
    off = interferogram_values(p, refl, None, t)
    on = interferogram_values(p, refl, None, t, include_auto=True)
    k = p.k0 + p.a1 * t
    assert np.allclose(on - off, 0.5 * 0.25 * np.cos(2 * k * 200e-6), atol=1e-14)


def test_determinism_and_streams(cubic_profile):
    t = np.linspace(0, cubic_profile.t_scan, 256)
    g = MziGeometry(4e-3)
    a = synth_mzi(cubic_profile, g, None, t, NoiseModel(0.1, 7, 3))
    b = synth_mzi(cubic_profile, g, None, t, NoiseModel(0.1, 7, 3))
    c = synth_mzi(cubic_profile, g, None, t, NoiseModel(0.1, 7, 4))
    assert np.array_equal(a.values, b.values)
    assert not np.array_equal(a.values, c.values)
    assert make_rng(2**64 - 1, 0).standard_normal() == make_rng(2**64 - 1, 0).standard_normal()


def test_quantize_examples():
    s = SampledSignal(np.array([0.0, 1.0]), np.array([0.3, -0.3]))
    q = quantize(s, AdcModel(1, 2.0, 1.0))
    assert list(q.values) == [0.5, -0.5]
    z = quantize(SampledSignal(np.array([0.0]), np.array([0.0])), AdcModel(8, 2.0, 1.0))
    assert z.values[0] == pytest.approx(2.0 / 256 / 2)
    c = quantize(SampledSignal(np.arange(3.0), np.array([5.0, -5.0, 0.1])), AdcModel(4, 2.0, 1.0))
    assert c.clipped == 2
    assert c.values[0] == pytest.approx(1.0 - 1 / 16)


def test_quantize_sqnr_14_bits():
    adc = AdcModel(14, 2.0, 1.0)
    n = np.arange(1 << 16)
    x = 0.999 * np.cos(2 * math.pi * 0.1234567 * n)
    q = quantize(SampledSignal(n.astype(float), x), adc).values
    sqnr = 10 * np.log10(np.mean(x**2) / np.mean((q - x) ** 2))
    assert abs(sqnr - (6.02 * 14 + 1.76)) < 1.0


@settings(max_examples=50, deadline=None)
@given(bits=st.integers(1, 16), v=st.floats(-0.999, 0.999))
def test_quantize_error_within_half_lsb(bits, v):
    adc = AdcModel(bits, 2.0, 1.0)
    q = quantize(SampledSignal(np.array([0.0]), np.array([v])), adc).values[0]
    assert abs(q - v) <= adc.lsb / 2 + 1e-15


def test_perturb_depth_examples():
    assert np.all(perturb_depth(1e-3, 0.0, 10.0, np.linspace(0, 1, 5)) == 1e-3)
    w = 2 * math.pi * 100
    assert perturb_depth(1e-3, 1e-6, w, math.pi / (2 * w)) == pytest.approx(1e-3 + 1e-6)
    t = np.linspace(0, 0.02, 10001)
    assert np.max(np.abs(perturb_depth(0.0, 1e-6, w, t))) == pytest.approx(1e-6, rel=1e-6)
    with pytest.raises(DomainError):
        perturb_depth(0.0, -1.0, 1.0, 0.0)


def test_uniform_times():
    p = SweepProfile.linear(0.0, 1.0, 1e-3)
    assert uniform_times(p, 1e6).size == 1000
