"""Calibration pipelines and A-scan reconstruction."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.interpolate import CubicSpline

from .demod import DegenerateSignalError, PhaseEstimate
from .demod.hilbert import analytic_signal
from .lcs import CalibClock, LevelLadder
from .sweep_model import DomainError, ReflectivityProfile, SourceSpectrum, SweepProfile
from .synth import AdcModel, NoiseModel, SampledSignal, interferogram_values, quantize

INTERP_KINDS = ("previous", "next", "linear", "cubic_spline")


class ContractError(ValueError):
    """Inputs do not satisfy an operation's preconditions."""


@dataclass(frozen=True, eq=False)
class CalibratedScan:
    k_values: np.ndarray
    samples: np.ndarray
    method: str
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        k = np.asarray(self.k_values, dtype=float)
        s = np.asarray(self.samples, dtype=float)
        if k.shape != s.shape:
            raise ContractError("k_values and samples differ in length")
        object.__setattr__(self, "k_values", k)
        object.__setattr__(self, "samples", s)

    def __len__(self):
        return self.samples.size

    @property
    def spacing(self) -> float:
        return (self.k_values[-1] - self.k_values[0]) / (self.k_values.size - 1)


@dataclass(frozen=True, eq=False)
class AScan:
    depth_axis: np.ndarray
    magnitude: np.ndarray

    @property
    def depth_step(self) -> float:
        return float(self.depth_axis[1] - self.depth_axis[0])


def realtime_calibrate(profile: SweepProfile, refl: ReflectivityProfile, spec: SourceSpectrum | None,
                       clock: CalibClock, noise: NoiseModel | None = None, adc: AdcModel | None = None,
                       linewidth_k: float = 0.0, perturbation=None) -> CalibratedScan:
    """Sample the analog interferogram at the clock events.

    This models the second ADC clocked directly by the level-crossing
    sampler: no interpolation is involved, and k_values are the levels the
    events were generated for.
    """
    if len(clock) == 0:
        raise DomainError("empty calibrating clock")
    # an ideal comparator on an exact clock fires where k equals the level
    k = clock.event_levels if clock.on_levels else None
    vals = interferogram_values(profile, refl, spec, clock.events, linewidth_k=linewidth_k,
                                perturbation=perturbation, k=k)
    if noise is not None and noise.sigma_w > 0:
        vals = vals + noise.sigma_w * noise.rng().standard_normal(vals.size)
    if adc is not None:
        vals = quantize(SampledSignal(clock.events, vals), adc).values
    return CalibratedScan(clock.event_levels, vals, "realtime",
                          {"events": len(clock), "skipped": clock.skipped})


def phase_to_wavenumber(est: PhaseEstimate, dl: float, k_ref: float) -> np.ndarray:
    """Estimated wavenumber per sample with the 2π ambiguity resolved near k_ref.

    k_ref is the nominal sweep-start wavenumber; it only has to be known to
    better than π/dl.
    """
    k = est.phase / dl
    cycles = np.round((k_ref - k[0]) * dl / (2 * math.pi))
    return k + cycles * 2 * math.pi / dl


def _interp(sig: SampledSignal, t: np.ndarray, kind: str) -> np.ndarray:
    ts, v = sig.times, sig.values
    if kind == "linear":
        return np.interp(t, ts, v)
    if kind == "previous":
        i = np.clip(np.searchsorted(ts, t, side="right") - 1, 0, ts.size - 1)
        return v[i]
    if kind == "next":
        i = np.clip(np.searchsorted(ts, t, side="left"), 0, ts.size - 1)
        return v[i]
    if kind == "cubic_spline":
        return CubicSpline(ts, v, bc_type="natural")(t)
    raise ValueError(f"interpolation kind must be one of {INTERP_KINDS}")


def lookup_times(times: np.ndarray, k_hat: np.ndarray, levels: np.ndarray, mode: str = "inverse"):
    """Times at which the estimated sweep reaches each level.

    ``inverse`` interpolates linearly inside the bracketing sample interval;
    ``nearest`` returns the sample whose estimate is closest to the level.
    Returns (times, mask of levels inside the estimated span).
    """
    k_mono = np.maximum.accumulate(k_hat)
    inside = (levels >= k_mono[0]) & (levels <= k_mono[-1])
    lv = levels[inside]
    if mode == "inverse":
        return np.interp(lv, k_mono, times), inside
    if mode == "nearest":
        i = np.clip(np.searchsorted(k_mono, lv), 1, k_mono.size - 1)
        left = np.abs(lv - k_mono[i - 1]) <= np.abs(k_mono[i] - lv)
        return times[np.where(left, i - 1, i)], inside
    raise ValueError("lookup mode must be 'inverse' or 'nearest'")


def resample_calibrate(mzi_sampled: SampledSignal, interf_sampled: SampledSignal, estimator,
                       ladder: LevelLadder, interp: str = "cubic_spline", osr: float | None = None,
                       lookup: str = "inverse") -> CalibratedScan:
    """Conventional path: estimate k̂[n], look up level times, interpolate the interferogram.

    ``estimator`` maps the sampled MZI to a wavenumber estimate per sample
    (rad/m), e.g. a wrapped hilbert_phase followed by phase_to_wavenumber.
    """
    if interp not in INTERP_KINDS:
        raise ValueError(f"interpolation kind must be one of {INTERP_KINDS}")
    if not (mzi_sampled.uniform and interf_sampled.uniform):
        raise ContractError("resampling expects uniformly sampled inputs")
    k_hat = np.asarray(estimator(mzi_sampled), dtype=float)
    t_c, inside = lookup_times(mzi_sampled.times, k_hat, ladder.levels, lookup)
    vals = _interp(interf_sampled, t_c, interp)
    return CalibratedScan(ladder.levels[inside], vals, "resample",
                          {"interp": interp, "osr": osr, "lookup": lookup,
                           "skipped": int((~inside).sum())})


def _crossings(t: np.ndarray, x: np.ndarray) -> np.ndarray:
    s = np.signbit(x)
    i = np.flatnonzero(s[1:] != s[:-1])
    frac = x[i] / (x[i] - x[i + 1])
    return t[i] + frac * (t[i + 1] - t[i])


def zero_crossing_calibrate(mzi_sampled: SampledSignal, interf_sampled: SampledSignal, dl: float,
                            mode: str = "basic", k_ref: float = 0.0) -> CalibratedScan:
    """Sample the interferogram at MZI zero crossings (and extrema in quadrature mode).

    Crossings are located by linear interpolation between samples and the
    interferogram is read there with a natural cubic spline. Consecutive
    samples are π/dl apart in k (π/(2dl) in quadrature mode); the absolute
    k of the first sample is taken as k_ref.
    """
    if mode not in ("basic", "quadrature"):
        raise ValueError("mode must be 'basic' or 'quadrature'")
    t, x = mzi_sampled.times, mzi_sampled.values - np.mean(mzi_sampled.values)
    events = _crossings(t, x)
    step = math.pi / dl
    if mode == "quadrature":
        q = analytic_signal(x).imag
        events = np.sort(np.concatenate((events, _crossings(t, q))))
        step /= 2.0
    if events.size < 8:
        raise DegenerateSignalError("fewer than 8 calibrating crossings")
    events = events[np.concatenate(([True], np.diff(events) > 0))]
    vals = CubicSpline(interf_sampled.times, interf_sampled.values, bc_type="natural")(events)
    k = k_ref + step * np.arange(events.size)
    return CalibratedScan(k, vals, f"zero-crossing-{mode}", {"events": int(events.size)})


def uncalibrated_scan(interf_sampled: SampledSignal, profile: SweepProfile) -> CalibratedScan:
    """Treat uniform-time samples as if they were uniform in k (no calibration)."""
    k = np.linspace(profile.k0, profile.k_end, len(interf_sampled))
    return CalibratedScan(k, interf_sampled.values, "uncalibrated")


def dc_subtract(scan: CalibratedScan, reference_scan: CalibratedScan) -> CalibratedScan:
    if len(scan) != len(reference_scan) or not np.allclose(scan.k_values, reference_scan.k_values,
                                                            rtol=0, atol=1e-9 * abs(scan.spacing)):
        raise ContractError("scans are not on the same k grid")
    return CalibratedScan(scan.k_values, scan.samples - reference_scan.samples, scan.method,
                          {**scan.metadata, "dc_subtracted": True})


def reconstruct_ascan(scan: CalibratedScan, fft_len: int | None = None, window: str | None = None,
                      rtol: float = 1e-6) -> AScan:
    """Single-sided |FFT| over k.

    With k spacing δk, bin j sits at depth j·π/(fft_len·δk), so the last
    returned bin approaches π/(2δk), the maximum unambiguous depth.
    """
    n = len(scan)
    if n < 2:
        raise ContractError("need at least two samples")
    dk = np.diff(scan.k_values)
    if np.any(np.abs(dk - scan.spacing) > rtol * abs(scan.spacing)):
        raise ContractError("k_values are not equidistant")
    fft_len = n if fft_len is None else int(fft_len)
    if fft_len < n:
        raise ContractError("fft_len shorter than the scan")
    x = scan.samples
    if window == "hann":
        x = x * np.hanning(n)
    elif window not in (None, "none", "rectangular"):
        raise ValueError(f"unknown window {window!r}")
    mag = np.abs(np.fft.rfft(x, fft_len))[: fft_len // 2] / n
    depth = np.arange(fft_len // 2) * math.pi / (fft_len * abs(scan.spacing))
    return AScan(depth, mag)
