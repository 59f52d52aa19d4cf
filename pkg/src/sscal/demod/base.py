from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..synth import SampledSignal


class DegenerateSignalError(ValueError):
    """Input carries no usable phase information."""


class DivergenceError(RuntimeError):
    def __init__(self, msg: str, index: int):
        super().__init__(f"{msg} at sample {index}")
        self.index = index


@dataclass(frozen=True, eq=False)
class PhaseEstimate:
    """Per-sample unwrapped phase in radians, plus optional side outputs.

    ``per_block_freq`` is only set by the block estimator: rows of
    (block start index, omega0 rad/sample, decay per sample).
    """

    phase: np.ndarray
    amplitude: np.ndarray | None = None
    per_block_freq: np.ndarray | None = None
    params: np.ndarray | None = None

    def wavenumber(self, dl: float) -> np.ndarray:
        return self.phase / dl


def require_uniform(sig: SampledSignal, min_len: int = 1):
    if not sig.uniform:
        raise ValueError("estimator needs a uniformly sampled signal")
    if len(sig) < min_len:
        raise ValueError(f"signal shorter than {min_len} samples")
