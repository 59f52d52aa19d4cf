from math import comb

import numpy as np


def rvci_coefficients(order: int) -> np.ndarray:
    """Cosine-sum weights of the Rife-Vincent class I window of given order."""
    a = np.array([comb(2 * order, order - m) for m in range(order + 1)], dtype=float)
    a /= 4.0**order
    a[1:] *= 2.0
    return a


def window_gen(kind: str, P: int, order: int = 1, sym: bool = True) -> np.ndarray:
    """Window coefficients scaled to unit peak.

    ``sym=True`` gives w[n] = w[P−1−n]; ``sym=False`` gives the DFT-even
    (periodic) form the interpolation formulas are derived for.
    """
    if P < 8:
        raise ValueError("window length must be at least 8")
    denom = P - 1 if sym else P
    n = np.arange(P)
    if kind == "rectangular":
        return np.ones(P)
    if kind in ("rvci", "hann"):
        if kind == "hann":
            order = 1
        if order < 0:
            raise ValueError("order must be nonnegative")
        a = rvci_coefficients(order)
        w = sum((-1) ** m * a[m] * np.cos(2 * np.pi * m * n / denom) for m in range(order + 1))
    elif kind == "hamming":
        w = 0.54 - 0.46 * np.cos(2 * np.pi * n / denom)
    else:
        raise ValueError(f"unsupported window kind {kind!r}")
    w = np.asarray(w, dtype=float) * np.ones(P)
    return w / w.max()
