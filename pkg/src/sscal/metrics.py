"""Axial resolution, roll-off, MSE and trade-off metrics."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .calib import AScan, CalibratedScan, ContractError
from .sweep_model import DomainError

HALF_POWER_DB = 20.0 * math.log10(0.5)


class DetectionError(ValueError):
    """No peak qualifies for a width or height measurement."""


@dataclass(frozen=True)
class Cell:
    """One configuration cell: its parameters and per-trial values."""

    params: dict
    values: tuple
    failures: tuple = ()

    @property
    def count(self) -> int:
        return len(self.values)

    @property
    def mean(self) -> float:
        return float(np.mean(self.values)) if self.values else float("nan")

    @property
    def std(self) -> float:
        return float(np.std(self.values)) if self.values else float("nan")


@dataclass
class MetricsReport:
    name: str
    quantity: str
    unit: str
    cells: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def add(self, params: dict, values, failures=()) -> Cell:
        cell = Cell(dict(params), tuple(float(v) for v in values), tuple(failures))
        self.cells.append(cell)
        return cell

    def rows(self) -> list:
        """One row per (cell, statistic): params..., quantity, unit, statistic, value."""
        out = []
        for c in self.cells:
            for stat, val in (("mean", c.mean), ("std", c.std), ("count", c.count),
                              ("failures", len(c.failures))):
                out.append({**c.params, "quantity": self.quantity, "unit": self.unit,
                            "statistic": stat, "value": val})
        return out

    def means(self) -> np.ndarray:
        return np.array([c.mean for c in self.cells])


def _peak_index(mag: np.ndarray, hint: int | None) -> int:
    if hint is None:
        # skip the DC bin and whatever leaks around it
        start = 1
        while start < mag.size - 1 and mag[start] <= mag[start - 1]:
            start += 1
        return start + int(np.argmax(mag[start:])) if start < mag.size else 0
    i = int(np.clip(hint, 0, mag.size - 1))
    while True:
        left = mag[i - 1] if i > 0 else -np.inf
        right = mag[i + 1] if i < mag.size - 1 else -np.inf
        if left > mag[i] and left >= right:
            i -= 1
        elif right > mag[i]:
            i += 1
        else:
            return i


def fwhm(ascan: AScan, peak_hint: float | None = None, min_prominence: float | None = 10.0,
         outer: bool = False) -> float:
    """Full width at half maximum of the dominant (or hinted) peak, in meters.

    ``peak_hint`` is a depth; the measured peak is the local maximum reached
    by climbing from the bin nearest to it. Both half-maximum crossings are
    located by linear interpolation between bins. With ``outer`` the width
    runs between the outermost bins above half maximum, which is what a
    chirp-smeared, rippled peak needs; with a hint as well, the peak and
    those bins are sought within half the hinted depth of it.
    """
    mag = np.asarray(ascan.magnitude, dtype=float)
    z = np.asarray(ascan.depth_axis, dtype=float)
    if mag.size < 3 or not np.all(np.isfinite(mag)):
        raise DetectionError("A-scan too short or not finite")
    hint = None if peak_hint is None else int(np.argmin(np.abs(z - peak_hint)))
    region = np.ones(mag.size, dtype=bool)
    if outer and peak_hint is not None:
        region = np.abs(z - peak_hint) <= 0.5 * abs(peak_hint)
        i = int(np.flatnonzero(region)[np.argmax(mag[region])])
    else:
        i = _peak_index(mag, hint)
    peak = mag[i]
    if peak <= 0:
        raise DetectionError("no peak above zero")
    if min_prominence is not None and peak < min_prominence * float(np.median(mag)):
        raise DetectionError(f"peak is below {min_prominence}x the median background")
    half = 0.5 * peak
    if outer:
        above = np.flatnonzero(region & (mag > half))
        lo, hi = max(above[0] - 1, 0), min(above[-1] + 1, mag.size - 1)
    else:
        lo = i
        while lo > 0 and mag[lo] > half:
            lo -= 1
        hi = i
        while hi < mag.size - 1 and mag[hi] > half:
            hi += 1
    if mag[lo] > half or mag[hi] > half:
        raise DetectionError("peak does not fall to half height inside the scan")
    z_lo = z[lo] + (half - mag[lo]) / (mag[lo + 1] - mag[lo]) * (z[lo + 1] - z[lo])
    z_hi = z[hi - 1] + (mag[hi - 1] - half) / (mag[hi - 1] - mag[hi]) * (z[hi] - z[hi - 1])
    return float(z_hi - z_lo)


def peak_height(ascan: AScan, peak_hint: float | None = None) -> float:
    mag = np.asarray(ascan.magnitude, dtype=float)
    hint = None if peak_hint is None else int(np.argmin(np.abs(ascan.depth_axis - peak_hint)))
    return float(mag[_peak_index(mag, hint)])


def _samples(x) -> np.ndarray:
    return x.samples if isinstance(x, CalibratedScan) else np.asarray(x, dtype=float)


def mse(a, b) -> float:
    """Mean squared difference of two scans (or plain arrays) of equal length."""
    xa, xb = _samples(a), _samples(b)
    if xa.shape != xb.shape:
        raise ContractError(f"length mismatch: {xa.size} vs {xb.size}")
    return float(np.mean((xa - xb) ** 2))


def predicted_mse(sigma_k_sq: float, r_prod: float) -> float:
    """Interferometric MSE from a Gaussian wavenumber-phase error of variance sigma_k_sq."""
    if sigma_k_sq < 0 or r_prod < 0:
        raise DomainError("inputs must be nonnegative")
    return 0.5 * r_prod * sigma_k_sq


def mse_improvement(mse_resampling: float, mse_realtime: float) -> float:
    """Percent reduction of the resampling MSE achieved by the real-time path."""
    if mse_resampling <= 0:
        raise DomainError("resampling MSE must be positive")
    return (mse_resampling - mse_realtime) / mse_resampling * 100.0


def tradeoff(l_c: float, n_ascan_rate: float, z_max: float) -> float:
    """Sampling rate needed for a given resolution, A-scan rate and depth range."""
    if min(l_c, n_ascan_rate, z_max) <= 0:
        raise DomainError("all inputs must be positive")
    return 4.0 * math.sqrt(math.log(2.0)) * n_ascan_rate / math.pi * z_max / l_c


def tradeoff_samples(m_samples: float, n_ascan_rate: float) -> float:
    """Sampling rate as samples per A-scan times A-scan rate."""
    return m_samples * n_ascan_rate


@dataclass(frozen=True)
class RolloffCurve:
    depths: np.ndarray
    db: np.ndarray
    failures: tuple = ()

    @property
    def depth_6db(self) -> float | None:
        """Depth where the curve first reaches -6.02 dB, by linear interpolation."""
        below = np.flatnonzero(self.db <= HALF_POWER_DB)
        if below.size == 0:
            return None
        j = below[0]
        if j == 0:
            return float(self.depths[0])
        d0, d1 = self.db[j - 1], self.db[j]
        z0, z1 = self.depths[j - 1], self.depths[j]
        return float(z0 + (HALF_POWER_DB - d0) / (d1 - d0) * (z1 - z0))


def rolloff_curve(depths, peak_of) -> RolloffCurve:
    """Peak level in dB versus depth, normalized to the shallowest depth.

    ``peak_of(depth)`` returns the A-scan peak magnitude of a mirror at that
    depth (e.g. built on the scenario pipelines). Failing depths are dropped
    and reported.
    """
    depths = np.sort(np.asarray(depths, dtype=float))
    kept, peaks, failures = [], [], []
    for d in depths:
        try:
            peaks.append(float(peak_of(float(d))))
            kept.append(d)
        except (DetectionError, ValueError) as exc:
            failures.append((float(d), str(exc)))
    if not peaks:
        raise DetectionError("no depth produced a peak")
    db = 20.0 * np.log10(np.asarray(peaks) / peaks[0])
    db[0] = 0.0
    return RolloffCurve(np.asarray(kept), db, tuple(failures))


def axial_resolution_sweep(base, depths, m_cs, bits=None, trials: int = 10,
                           methods=("envelope", "hilbert"), target: float | None = None,
                           tolerance: float = 0.15) -> MetricsReport:
    """FWHM per (method, depth, M_C, bits) cell over seeded trials.

    ``base`` is a scenario.Scenario. Trial i uses the same seed stream in
    every cell, so means with the same trial set are reproducible. Cells
    whose mean deviates more than ``tolerance`` from ``target`` (default:
    the grid mean) are flagged.
    """
    from . import scenario

    bits = (base.adc_bits,) if bits is None else tuple(bits)
    rep = MetricsReport("axial_resolution", "fwhm", "m")
    for method in methods:
        for b in bits:
            for depth in depths:
                for m_c in m_cs:
                    sc = base.with_(depth=float(depth), m_c=int(m_c), adc_bits=int(b))
                    vals, fails = [], []
                    for t in range(trials):
                        try:
                            a = scenario.ascan(sc, scenario.calibrate(sc, method, t))
                            vals.append(fwhm(a, peak_hint=sc.depth))
                        except (DetectionError, ValueError, RuntimeError) as exc:
                            fails.append(f"trial {t}: {exc}")
                    rep.add({"method": method, "depth_m": float(depth), "m_c": int(m_c), "bits": int(b)},
                            vals, fails)
    means = rep.means()
    finite = means[np.isfinite(means)]
    ref = (float(finite.mean()) if finite.size else float("nan")) if target is None else target
    for c in rep.cells:
        if c.failures or not abs(c.mean - ref) <= tolerance * ref:
            rep.flags.append(c.params)
    return rep
