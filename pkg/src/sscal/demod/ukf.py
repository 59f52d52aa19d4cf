from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numba import njit

from ..synth import SampledSignal
from .base import DivergenceError, PhaseEstimate, require_uniform

L_STATE = 4


@dataclass(frozen=True)
class UkfParams:
    """Scaled unscented filter over [A, a3, a2, a1].

    The measurement model is A·cos(a3 τ³ + a2 τ² + a1 τ + phase0) with
    τ = n/time_scale, so the polynomial coefficients are in radians per
    power of τ. ``time_scale`` defaults to the signal length.
    """

    x0: tuple
    sigma_A: float = 1e-3
    sigma_a: tuple = (1e-3, 1e-3, 1e-3)
    sigma_w: float = 0.1
    alpha: float = 1e-2
    beta: float = 2.0
    kappa: float = 0.0
    phase0: float = 0.0
    time_scale: float | None = None

    def __post_init__(self):
        if len(self.x0) != L_STATE:
            raise ValueError("UKF state has exactly four entries")
        if not 0 < self.alpha <= 1 or self.beta < 0 or self.kappa < 0:
            raise ValueError("invalid unscented-transform parameters")

    @property
    def lam(self) -> float:
        return self.alpha**2 * (L_STATE + self.kappa) - L_STATE

    @property
    def gamma(self) -> float:
        return float(np.sqrt(L_STATE + self.lam))

    def weights(self):
        lam = self.lam
        wm = np.full(2 * L_STATE + 1, 1.0 / (2.0 * (L_STATE + lam)))
        wc = wm.copy()
        wm[0] = lam / (lam + L_STATE)
        wc[0] = wm[0] + 1.0 - self.alpha**2 + self.beta
        return wm, wc


@njit(cache=True)
def _cholesky(P, out):
    """Lower Cholesky factor written into out; False if P is not positive definite."""
    n = P.shape[0]
    for i in range(n):
        for j in range(i + 1):
            acc = P[i, j]
            for m in range(j):
                acc -= out[i, m] * out[j, m]
            if i == j:
                if acc <= 0.0:
                    return False
                out[i, i] = np.sqrt(acc)
            else:
                out[i, j] = acc / out[j, j]
        for j in range(i + 1, n):
            out[i, j] = 0.0
    return True


@njit(cache=True)
def _ukf_loop(y, x, V, r, wm, wc, g, phase0, scale):
    L = 4
    n_sig = 2 * L + 1
    n_s = y.size
    P = np.eye(L)
    S = np.zeros((L, L))
    chi = np.empty((n_sig, L))
    Y = np.empty(n_sig)
    K = np.empty(L)
    amp = np.empty(n_s)
    phase = np.empty(n_s)
    params = np.empty((n_s, L))
    jitter = np.eye(L) * 1e-12
    for n in range(n_s):
        tau = n / scale
        b2 = tau * tau
        b3 = b2 * tau
        # identity dynamics: the sigma-point time update reduces to P + V
        for i in range(L):
            for j in range(L):
                P[i, j] += V[i, j]
        if not _cholesky(P, S):
            if not _cholesky(P + jitter, S):
                return amp, phase, params, n
        for i in range(L):
            chi[0, i] = x[i]
        for j in range(L):
            for i in range(L):
                chi[1 + j, i] = x[i] + g * S[i, j]
                chi[1 + L + j, i] = x[i] - g * S[i, j]
        ym = 0.0
        for s in range(n_sig):
            arg = chi[s, 1] * b3 + chi[s, 2] * b2 + chi[s, 3] * tau + phase0
            Y[s] = chi[s, 0] * np.cos(arg)
            ym += wm[s] * Y[s]
        pyy = r
        for i in range(L):
            K[i] = 0.0
        for s in range(n_sig):
            dy = Y[s] - ym
            pyy += wc[s] * dy * dy
            for i in range(L):
                K[i] += wc[s] * dy * (chi[s, i] - x[i])
        innov = y[n] - ym
        for i in range(L):
            K[i] /= pyy
            x[i] += K[i] * innov
        for i in range(L):
            for j in range(L):
                P[i, j] -= pyy * K[i] * K[j]
        for i in range(L):
            if not np.isfinite(x[i]):
                return amp, phase, params, n
        amp[n] = x[0]
        phase[n] = x[1] * b3 + x[2] * b2 + x[3] * tau + phase0
        for i in range(L):
            params[n, i] = x[i]
    return amp, phase, params, -1


def ukf_estimate(mzi: SampledSignal, p: UkfParams) -> PhaseEstimate:
    """Unscented tracker of the sweep polynomial; covariance starts at identity."""
    require_uniform(mzi, 2)
    wm, wc = p.weights()
    V = np.diag([p.sigma_A**2, *(s**2 for s in p.sigma_a)])
    amp, phase, params, bad = _ukf_loop(
        mzi.values, np.array(p.x0, dtype=float), V, p.sigma_w**2, wm, wc, p.gamma,
        float(p.phase0), float(p.time_scale or len(mzi)))
    if bad >= 0:
        raise DivergenceError("UKF covariance not positive definite or state non-finite", bad)
    return PhaseEstimate(phase, amp, params=params)
