from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..synth import SampledSignal
from .base import DivergenceError, PhaseEstimate, require_uniform

# Taylor propagation of [phase, 1st, 2nd, 3rd derivative] over one sample
F_PHASE = np.array([
    [1.0, 1.0, 0.5, 1.0 / 6.0],
    [0.0, 1.0, 1.0, 0.5],
    [0.0, 0.0, 1.0, 1.0],
    [0.0, 0.0, 0.0, 1.0],
])
V_PATTERN = np.array([
    [1.0, 1.0, 1.0, 1.0],
    [1.0, 2.0, 3.0, 4.0],
    [1.0, 3.0, 6.0, 10.0],
    [1.0, 4.0, 10.0, 20.0],
])


@dataclass(frozen=True)
class EkfParams:
    x0: tuple
    sigma_nA: float = 1e-3
    sigma_nk: float = 1e-6
    sigma_w: float = 0.1
    p0_diag: tuple | None = None

    def __post_init__(self):
        if len(self.x0) != 5:
            raise ValueError("EKF state has exactly five entries")
        if self.p0_diag is not None and (len(self.p0_diag) != 5 or min(self.p0_diag) <= 0):
            raise ValueError("initial covariance needs five positive variances")
        if min(self.sigma_nA, self.sigma_nk, self.sigma_w) < 0:
            raise ValueError("noise levels must be nonnegative")


def transition() -> np.ndarray:
    F = np.zeros((5, 5))
    F[0, 0] = 1.0
    F[1:, 1:] = F_PHASE
    return F


def process_cov(p: EkfParams) -> np.ndarray:
    V = np.zeros((5, 5))
    V[0, 0] = p.sigma_nA**2
    V[1:, 1:] = p.sigma_nk**2 * V_PATTERN
    return V


@njit(cache=True)
def _ekf_loop(y, x, P, F, V, r, check_psd):
    n_s = y.size
    amp = np.empty(n_s)
    phase = np.empty(n_s)
    xp = np.empty(5)
    FP = np.empty((5, 5))
    Pp = np.empty((5, 5))
    ph = np.empty(5)
    kg = np.empty(5)
    for n in range(n_s):
        # time update: x = F x, P = F P F' + V
        for i in range(5):
            acc = 0.0
            for j in range(5):
                acc += F[i, j] * x[j]
            xp[i] = acc
        for i in range(5):
            for j in range(5):
                acc = 0.0
                for m in range(5):
                    acc += F[i, m] * P[m, j]
                FP[i, j] = acc
        for i in range(5):
            for j in range(5):
                acc = V[i, j]
                for m in range(5):
                    acc += FP[i, m] * F[j, m]
                Pp[i, j] = acc
        # measurement update with H = [cos, -A sin, 0, 0, 0]
        c = np.cos(xp[1])
        s = np.sin(xp[1])
        h0 = c
        h1 = -xp[0] * s
        for i in range(5):
            ph[i] = Pp[i, 0] * h0 + Pp[i, 1] * h1
        S = h0 * ph[0] + h1 * ph[1] + r
        innov = y[n] - xp[0] * c
        for i in range(5):
            kg[i] = ph[i] / S
            x[i] = xp[i] + kg[i] * innov
        # Joseph form (I - K H) P (I - K H)' + r K K', kept symmetric; the
        # short form loses definiteness once the derivative variances get tiny
        for j in range(5):
            hp = h0 * Pp[0, j] + h1 * Pp[1, j]
            for i in range(5):
                FP[i, j] = Pp[i, j] - kg[i] * hp
        for i in range(5):
            hf = h0 * FP[i, 0] + h1 * FP[i, 1]
            for j in range(i, 5):
                acc = FP[i, j] - kg[j] * hf + r * kg[i] * kg[j]
                P[i, j] = acc
                P[j, i] = acc
        for i in range(5):
            if not np.isfinite(x[i]):
                return amp, phase, n
        if check_psd:
            ev = np.linalg.eigvalsh(0.5 * (P + P.T))
            if ev.min() < -1e-9 * np.trace(P):
                return amp, phase, -n - 2
        amp[n] = x[0]
        phase[n] = x[1]
    return amp, phase, -1


def ekf_estimate(mzi: SampledSignal, p: EkfParams, check_psd: bool = False) -> PhaseEstimate:
    """Track amplitude and phase of y[n] = A cos(phase[n]) + noise.

    The state is amplitude, phase and three phase derivatives per sample.
    ``x0`` is the state one step before the first measurement. The initial
    covariance is the identity unless ``p0_diag`` gives its diagonal.
    """
    require_uniform(mzi, 2)
    P0 = np.eye(5) if p.p0_diag is None else np.diag(np.asarray(p.p0_diag, dtype=float))
    amp, phase, bad = _ekf_loop(mzi.values, np.array(p.x0, dtype=float), P0, transition(),
                                process_cov(p), p.sigma_w**2, check_psd)
    if bad >= 0:
        raise DivergenceError("non-finite EKF state", bad)
    if bad < -1:
        raise DivergenceError("EKF covariance lost positive semidefiniteness", -bad - 2)
    return PhaseEstimate(phase, amp)
