import warnings

import numpy as np

from ..synth import SampledSignal
from .base import DegenerateSignalError, PhaseEstimate, require_uniform

LPF_TAPS = np.full(4, 0.25)
DELAY = 4


def envelope_equalize(mzi: SampledSignal):
    """Square, 4-tap moving average, double, square root; then divide.

    Returns (equalized, envelope). The equalized signal at sample n is
    mzi[n−4]/envelope[n]; its time base is shifted back by the delay so
    that each value sits at the time of the MZI sample it came from.
    """
    require_uniform(mzi, DELAY + 8)
    x = mzi.values
    lp = np.convolve(x * x, LPF_TAPS)[: x.size]
    env = np.sqrt(2.0 * lp)
    eps = 1e-3 * env.max()
    if eps == 0 or np.mean(env < eps) > 0.01:
        warnings.warn("envelope below guard level on more than 1% of samples")
    eq = x[:-DELAY] / np.maximum(env[DELAY:], eps)
    equalized = SampledSignal(mzi.times[:-DELAY], eq, True, mzi.rate)
    return equalized, mzi.with_values(env)


def equalized_phase(eq: np.ndarray) -> np.ndarray:
    """Monotone phase of a unit-amplitude cosine from its samples.

    Between consecutive extrema the cosine is monotone, so arccos gives the
    phase within a half cycle; falling halves map to [0, π] and rising
    halves to [π, 2π]. Extrema are taken as the largest |value| between
    sign changes, which does not depend on reaching full amplitude.
    """
    c = np.clip(eq, -1.0, 1.0)
    sign = np.signbit(c)
    zc = np.flatnonzero(sign[1:] != sign[:-1]) + 1
    if zc.size < 4:
        raise DegenerateSignalError("too few fringes to track")
    bounds = np.concatenate(([0], zc, [c.size]))
    ext = np.array([a + np.argmax(np.abs(c[a:b])) for a, b in zip(bounds[:-1], bounds[1:])])
    # when the true peak lies after the largest sample, that sample still
    # belongs to the half cycle approaching the peak
    a = np.abs(c)
    inner = (ext > 0) & (ext < c.size - 1)
    after = np.zeros(ext.size, dtype=bool)
    after[inner] = a[ext[inner] + 1] > a[ext[inner] - 1]
    ext = ext + after
    phase = np.empty(c.size)
    acos = np.arccos(c)
    # samples before the first extremum run towards it
    head = slice(0, ext[0])
    top = c[ext - after] > 0
    phase[head] = -acos[head] if top[0] else acos[head]
    cyc = 0.0
    for i, e in enumerate(ext):
        stop = ext[i + 1] if i + 1 < ext.size else c.size
        seg = slice(e, stop)
        if top[i]:  # falling from a maximum
            phase[seg] = cyc + acos[seg]
        else:  # rising from a minimum
            phase[seg] = cyc + 2.0 * np.pi - acos[seg]
            cyc += 2.0 * np.pi
    return np.maximum.accumulate(phase)


def envelope_phase(mzi: SampledSignal) -> PhaseEstimate:
    """Phase implied by the level crossings of the equalized signal.

    The filter delay leaves the last few input samples without an
    equalized value; their phase is extrapolated at the final slope.
    """
    eq, env = envelope_equalize(mzi)
    ph = equalized_phase(eq.values)
    slope = (ph[-1] - ph[-1 - DELAY]) / DELAY
    ph = np.concatenate((ph, ph[-1] + slope * np.arange(1, DELAY + 1)))
    return PhaseEstimate(ph, env.values)
