from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numba import njit

from ..synth import SampledSignal
from .base import DegenerateSignalError, PhaseEstimate, require_uniform
from .fft import OpCounter, split_radix_fft
from .windows import window_gen

TINY = 1e-300


@dataclass(frozen=True)
class IpdftParams:
    block_len: int = 32
    method: str = "RVCI"
    order: int = 1

    def __post_init__(self):
        P = self.block_len
        if P < 8 or P & (P - 1):
            raise ValueError("block length must be a power of two ≥ 8")
        if self.method not in ("BY2", "RVCI"):
            raise ValueError("method must be BY2 or RVCI")
        if self.method == "RVCI" and self.order < 1:
            raise ValueError("RVCI needs order ≥ 1")

    @property
    def window(self) -> np.ndarray:
        return _window(self.method, self.block_len, self.order)


@lru_cache(maxsize=None)
def _window(method: str, P: int, order: int) -> np.ndarray:
    w = np.ones(P) if method == "BY2" else window_gen("rvci", P, order, sym=False)
    w.flags.writeable = False
    return w


def _by2(Y: np.ndarray, K: np.ndarray, P: int):
    """Pole of a damped complex exponential from second-difference bin ratios.

    The second difference of the rectangular-window DFT equals a raised-cosine
    windowed DFT; its ratio at two adjacent bins is a quadratic in
    w = pole·exp(−jω_K), solved exactly here.
    """
    rows = np.arange(Y.shape[0])
    left = np.abs(Y[rows, K - 1]) > np.abs(Y[rows, K + 1])
    # reference bin: the ratio is always D2[ref−1]/D2[ref]
    ref = np.where(left, K, K + 1)
    d2 = lambda m: Y[rows, m - 1] - 2.0 * Y[rows, m] + Y[rows, m + 1]
    num, den = d2(ref - 1), d2(ref)
    # a vanishing denominator yields non-finite output, flagged by the caller
    R = num / den
    rho_inv = np.exp(2j * np.pi / P)
    a = rho_inv * (1.0 - R * rho_inv)
    b = (1.0 - rho_inv**2) * (R + 1.0)
    c = R - rho_inv
    disc = np.sqrt(b * b - 4.0 * a * c)
    roots = np.stack(((-b + disc) / (2 * a), (-b - disc) / (2 * a)), axis=-1)
    # the physical root sits near w = 1 (small offset, weak damping)
    pick = np.argmin(np.abs(np.log(roots)), axis=-1)
    w = roots[rows, pick]
    pole = w * np.exp(2j * np.pi * ref / P)
    return np.angle(pole), -np.log(np.abs(pole))


@njit(cache=True)
def _rvci_kernel(Y, P, order):
    """Peak bin, offset and decay per block; status 1 flags an edge-bin peak,
    2 a degenerate bin ratio, 0 a usable block."""
    nb = Y.shape[0]
    omega = np.zeros(nb)
    decay = np.zeros(nb)
    status = np.zeros(nb, dtype=np.int8)
    O = order
    for b in range(nb):
        K = 0
        best = -1.0
        for m in range(P // 2):
            v = Y[b, m].real ** 2 + Y[b, m].imag ** 2
            if v > best:
                best = v
                K = m
        if K < 1 or K > P // 2 - 2:
            status[b] = 1
            continue
        p0 = best
        if p0 < TINY:
            status[b] = 2
            continue
        R1 = (Y[b, K + 1].real ** 2 + Y[b, K + 1].imag ** 2) / p0
        R2 = (Y[b, K - 1].real ** 2 + Y[b, K - 1].imag ** 2) / p0
        den = 2 * (O + 1) * R1 * R2 - R1 - R2 - 2 * O
        if abs(den) < TINY:
            status[b] = 2
            continue
        delta = -(2 * O + 1) / 2.0 * (R1 - R2) / den
        if delta >= 0:
            arg = ((delta + O) ** 2 - R1 * (delta - O - 1) ** 2) / (R1 - 1.0) if R1 != 1.0 else 0.0
        else:
            arg = ((delta - O) ** 2 - R2 * (delta + O + 1) ** 2) / (R2 - 1.0) if R2 != 1.0 else 0.0
        if not np.isfinite(arg) or arg < 0.0:
            arg = 0.0
        omega[b] = (K + delta) * 2 * np.pi / P
        decay[b] = 2 * np.pi / P * np.sqrt(arg)
    return omega, decay, status


def _blocks(x: np.ndarray, p: IpdftParams, counter: OpCounter | None):
    """(omega0, decay, status) per block without raising; status as in the RVCI kernel."""
    P = p.block_len
    Y = split_radix_fft(x * p.window, counter)
    if p.method == "RVCI":
        return _rvci_kernel(Y, P, p.order)
    K = np.argmax(np.abs(Y[:, : P // 2]), axis=1)
    status = ((K < 2) | (K > P // 2 - 3)).astype(np.int8)
    omega, decay = np.zeros(len(K)), np.zeros(len(K))
    ok = status == 0
    if ok.any():
        with np.errstate(all="ignore"):
            o, d = _by2(Y[ok], K[ok], P)
        bad = ~np.isfinite(o) | ~np.isfinite(d)
        o[bad], d[bad] = 0.0, 0.0
        omega[ok], decay[ok] = o, d
        idx = np.flatnonzero(ok)
        status[idx[bad]] = 2
    return omega, decay, status


def block_estimates(x: np.ndarray, p: IpdftParams, counter: OpCounter | None = None):
    """Per-block (omega0, decay) for a 2-D array of blocks; any unusable block raises."""
    omega, decay, status = _blocks(x, p, counter)
    if (status == 1).any():
        raise DegenerateSignalError(f"peak at an edge bin in block {int(np.flatnonzero(status == 1)[0])}")
    if (status == 2).any():
        raise DegenerateSignalError("degenerate bin ratio")
    return omega, decay


def ipdft_estimate(mzi: SampledSignal, p: IpdftParams) -> PhaseEstimate:
    """Blockwise frequency estimates integrated into a continuous phase.

    Inside a block the phase is linear at that block's frequency; blocks are
    joined end to end. Blocks with an edge-bin peak or a degenerate ratio
    borrow the frequency interpolated from usable neighbours; the start
    phase is a least-squares fit on the first usable block. Samples after
    the last full block are dropped.
    """
    require_uniform(mzi, p.block_len)
    P = p.block_len
    nb = len(mzi) // P
    if nb * P != len(mzi):
        warnings.warn("trailing partial block dropped")
    x = mzi.values[: nb * P].reshape(nb, P)
    omega, d, status = _blocks(x, p, None)
    good = np.flatnonzero(status == 0)
    if good.size == 0:
        raise DegenerateSignalError("no usable block: every peak is at an edge bin or degenerate")
    if good.size < nb:
        # unusable blocks (noise-only stretches, edge peaks) take the interpolated neighbour frequency
        bad = np.flatnonzero(status != 0)
        omega[bad] = np.interp(bad, good, omega[good])
        d[bad] = np.interp(bad, good, d[good])
    n = np.arange(P)
    # start phase: least squares x ≈ a·cos(ωn) + b·sin(ωn) on the first usable block
    g = good[0]
    c, s = np.cos(omega[g] * n), np.sin(omega[g] * n)
    cc, ss, cs = c @ c, s @ s, c @ s
    xc, xs = x[g] @ c, x[g] @ s
    det = cc * ss - cs * cs
    ca, sb = (ss * xc - cs * xs) / det, (cc * xs - cs * xc) / det
    offsets = np.concatenate(([0.0], np.cumsum(omega[:-1] * P)))
    starts = np.arctan2(-sb, ca) + offsets - offsets[g]
    phase = (starts[:, None] + omega[:, None] * n).ravel()
    blocks = np.column_stack((np.arange(nb) * P, omega, d))
    return PhaseEstimate(phase, per_block_freq=blocks)
