"""Starting states for the Kalman trackers from a quick block-frequency pass."""
from __future__ import annotations

import numpy as np

from ..synth import SampledSignal
from .ipdft import IpdftParams, ipdft_estimate


def coarse_phase_poly(mzi: SampledSignal, fraction: float = 0.25, block_len: int = 32) -> np.ndarray:
    """Cubic in sample index fitted to the block-estimated phase of the leading part.

    Returns coefficients c0..c3 of c0 + c1 n + c2 n² + c3 n³.
    """
    n_use = max(int(len(mzi) * fraction) // block_len, 4) * block_len
    n_use = min(n_use, (len(mzi) // block_len) * block_len)
    head = mzi.with_values(mzi.values) if n_use == len(mzi) else type(mzi).uniform_grid(mzi.values[:n_use], mzi.rate)
    est = ipdft_estimate(head, IpdftParams(block_len, "RVCI", 1))
    n = np.arange(n_use, dtype=float)
    scale = float(n_use)
    c = np.polynomial.polynomial.polyfit(n / scale, est.phase, 3)
    return c / scale ** np.arange(4)


def _amplitude(mzi: SampledSignal, n: int = 64) -> float:
    head = mzi.values[:n]
    return float(np.sqrt(2.0 * np.mean((head - head.mean()) ** 2)))


def ekf_initial_state(mzi: SampledSignal, fraction: float = 0.25) -> tuple:
    """State one sample before the first measurement."""
    c0, c1, c2, c3 = coarse_phase_poly(mzi, fraction)
    t = -1.0
    return (
        _amplitude(mzi),
        c0 + c1 * t + c2 * t * t + c3 * t**3,
        c1 + 2 * c2 * t + 3 * c3 * t * t,
        2 * c2 + 6 * c3 * t,
        6 * c3,
    )


def ukf_initial_params(mzi: SampledSignal, fraction: float = 0.25) -> dict:
    """x0, phase0 and time_scale for UkfParams."""
    c0, c1, c2, c3 = coarse_phase_poly(mzi, fraction)
    s = float(len(mzi))
    return {"x0": (_amplitude(mzi), c3 * s**3, c2 * s**2, c1 * s), "phase0": c0, "time_scale": s}


def ekf_initial_cov(amplitude: float = 1.0) -> tuple:
    """Diagonal initial covariance matched to ekf_initial_state.

    The coarse fit pins the phase derivatives far better than an identity
    covariance admits; with unit variance on the second and third
    derivatives one noisy sample early on can throw the tracker off.
    """
    return ((0.1 * amplitude) ** 2, 1.0, 1e-6, 1e-10, 1e-14)
