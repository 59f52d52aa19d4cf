"""Calibrating (MZI) and interferometric waveforms, noise and ADC quantization."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .sweep_model import (
    DomainError,
    InvariantError,
    MziGeometry,
    ReflectivityProfile,
    SourceSpectrum,
    SweepProfile,
    rolloff_factor,
)


@dataclass(frozen=True, eq=False)
class SampledSignal:
    times: np.ndarray
    values: np.ndarray
    uniform: bool = False
    rate: float | None = None
    clipped: int = 0

    def __post_init__(self):
        t = np.asarray(self.times, dtype=float)
        v = np.asarray(self.values, dtype=float)
        if t.shape != v.shape or t.ndim != 1:
            raise InvariantError("times and values must be equal-length 1-D arrays")
        if t.size > 1 and np.any(np.diff(t) <= 0):
            raise InvariantError("times must be strictly increasing")
        object.__setattr__(self, "times", t)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.values.size

    @classmethod
    def uniform_grid(cls, values, rate: float, t0: float = 0.0) -> "SampledSignal":
        v = np.asarray(values, dtype=float)
        return cls(t0 + np.arange(v.size) / rate, v, True, rate)

    def with_values(self, values) -> "SampledSignal":
        return SampledSignal(self.times, values, self.uniform, self.rate)


@dataclass(frozen=True)
class NoiseModel:
    sigma_w: float = 0.0
    seed: int = 0
    stream: int = 0

    def __post_init__(self):
        if self.sigma_w < 0:
            raise InvariantError("sigma_w must be nonnegative")

    def rng(self) -> np.random.Generator:
        return make_rng(self.seed, self.stream)


@dataclass(frozen=True)
class AdcModel:
    bits: int
    full_scale: float
    rate: float

    def __post_init__(self):
        if not 1 <= self.bits <= 24:
            raise InvariantError("bits must lie in [1, 24]")
        if not (self.full_scale > 0 and self.rate > 0):
            raise InvariantError("full_scale and rate must be positive")

    @property
    def lsb(self) -> float:
        return self.full_scale / 2**self.bits

    def noise_floor(self) -> float:
        """Mean-square quantization error of a busy input, U²·2^(−2Q)/12."""
        return self.lsb**2 / 12.0


def make_rng(seed: int, stream: int = 0) -> np.random.Generator:
    """Counter-based generator keyed by (seed, stream)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed) & (2**64 - 1), int(stream)])))


def uniform_times(profile: SweepProfile, rate: float) -> np.ndarray:
    n = int(math.floor(profile.t_scan * rate + 1e-9))
    return np.arange(n) / rate


def _check_grid(profile: SweepProfile, t: np.ndarray):
    if t.size == 0:
        raise DomainError("empty time grid")
    if t[0] < 0 or t[-1] > profile.t_scan:
        raise DomainError("time grid outside the sweep")


def _add_noise(values: np.ndarray, noise: NoiseModel | None) -> np.ndarray:
    if noise is None or noise.sigma_w == 0:
        return values
    return values + noise.sigma_w * noise.rng().standard_normal(values.size)


def _signal(t, values) -> SampledSignal:
    d = np.diff(t)
    uni = t.size > 1 and np.allclose(d, d[0], rtol=1e-9, atol=0)
    rate = 1.0 / d[0] if uni else None
    return SampledSignal(t, values, bool(uni), rate)


def mzi_phase(profile: SweepProfile, geom: MziGeometry, t):
    return geom.dl * (profile.k0 + t * (profile.a1 + t * (profile.a2 + t * profile.a3)))


def synth_mzi(profile: SweepProfile, geom: MziGeometry, spec: SourceSpectrum | None,
              grid, noise: NoiseModel | None = None) -> SampledSignal:
    """C·S(k(t))·cos(dl·k(t)) + white noise; spec=None means a flat spectrum."""
    t = np.asarray(grid, dtype=float)
    _check_grid(profile, t)
    k = profile.k0 + t * (profile.a1 + t * (profile.a2 + t * profile.a3))
    amp = geom.c_amp * (1.0 if spec is None else spec.shape(k))
    return _signal(t, _add_noise(amp * np.cos(geom.dl * k), noise))


def interferogram_values(profile: SweepProfile, refl: ReflectivityProfile,
                         spec: SourceSpectrum | None, t, include_auto: bool = False,
                         linewidth_k: float = 0.0, perturbation=None, k=None) -> np.ndarray:
    """Noise-free detector current at times t.

    Path differences enter as round-trip phase 2k·Δz, so a reflector at
    Δz = z_ref − z_s shows up at depth Δz in the A-scan. ``perturbation``
    is an (amplitude, omega) pair that moves every sample reflector by
    amplitude·sin(omega·t). ``linewidth_k`` applies the depth roll-off
    envelope of a finite instantaneous linewidth. ``k`` overrides the
    wavenumber at each t when it is known exactly.
    """
    t = np.asarray(t, dtype=float)
    if k is None:
        k = profile.k0 + t * (profile.a1 + t * (profile.a2 + t * profile.a3))
    else:
        k = np.asarray(k, dtype=float)
    s = np.ones_like(k) if spec is None else spec.shape(k)
    shift = 0.0
    if perturbation is not None:
        t_start = perturbation[2] if len(perturbation) > 2 else 0.0
        shift = perturb_depth(0.0, perturbation[0], perturbation[1], t_start + t)
    out = 0.25 * s * (refl.r_ref + sum(r for _, r in refl.reflectors))
    if not refl.coherent:
        return out
    for z_s, r_s in refl.reflectors:
        dz = refl.z_ref - (z_s + shift)
        term = np.sqrt(refl.r_ref * r_s) * np.cos(2.0 * k * dz)
        if linewidth_k > 0:
            term = term * rolloff_factor(linewidth_k, dz)
        out = out + 0.5 * s * term
    if include_auto:
        refs = refl.reflectors
        for m in range(len(refs)):
            for n in range(m + 1, len(refs)):
                dz = refs[m][0] - refs[n][0]
                out = out + 0.5 * s * np.sqrt(refs[m][1] * refs[n][1]) * np.cos(2.0 * k * dz)
    return out


def synth_interferogram(profile: SweepProfile, refl: ReflectivityProfile,
                        spec: SourceSpectrum | None, grid, noise: NoiseModel | None = None,
                        include_auto: bool = False, linewidth_k: float = 0.0,
                        perturbation=None) -> SampledSignal:
    t = np.asarray(grid, dtype=float)
    _check_grid(profile, t)
    vals = interferogram_values(profile, refl, spec, t, include_auto, linewidth_k, perturbation)
    return _signal(t, _add_noise(vals, noise))


def quantize(sig: SampledSignal, adc: AdcModel) -> SampledSignal:
    """Mid-rise quantizer over [−U/2, U/2]; ties go up, overflow saturates."""
    levels = 2**adc.bits
    lsb = adc.lsb
    idx = np.floor((sig.values + 0.5 * adc.full_scale) / lsb)
    clipped = int(np.count_nonzero((idx < 0) | (idx > levels - 1)))
    idx = np.clip(idx, 0, levels - 1)
    q = (idx + 0.5) * lsb - 0.5 * adc.full_scale
    return SampledSignal(sig.times, q, sig.uniform, sig.rate, clipped)


def perturb_depth(z_nominal, amp: float, omega_z: float, t):
    if amp < 0:
        raise DomainError("perturbation amplitude must be nonnegative")
    return z_nominal + amp * np.sin(omega_z * np.asarray(t, dtype=float))
