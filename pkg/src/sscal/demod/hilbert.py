import numpy as np

from ..synth import SampledSignal
from .base import DegenerateSignalError, PhaseEstimate, require_uniform


def analytic_signal(x: np.ndarray) -> np.ndarray:
    """Full-length FFT with the negative half zeroed and the positive half doubled."""
    n = x.size
    spec = np.fft.fft(x)
    gain = np.zeros(n)
    gain[0] = 1.0
    if n % 2 == 0:
        gain[n // 2] = 1.0
        gain[1:n // 2] = 2.0
    else:
        gain[1:(n + 1) // 2] = 2.0
    return np.fft.ifft(spec * gain)


def hilbert_phase(mzi: SampledSignal) -> PhaseEstimate:
    require_uniform(mzi, 16)
    x = mzi.values
    ac = x - x.mean()
    if np.sqrt(np.mean(ac * ac)) <= 1e-9 * max(np.max(np.abs(x)), 1e-300):
        raise DegenerateSignalError("signal has no oscillating component")
    z = analytic_signal(x)
    return PhaseEstimate(np.unwrap(np.arctan2(z.imag, z.real)), np.abs(z))
