"""Swept-source geometry: wavenumber sweep law, source spectrum and derived depths."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np


class DomainError(ValueError):
    """Argument outside the valid domain of an operation."""


class InvariantError(ValueError):
    """A model object violates one of its construction invariants."""


def k_from_wavelength(lam: float) -> float:
    return 2.0 * math.pi / lam


def dk_from_dlambda(lam0: float, dlam: float) -> float:
    """First-order bandwidth conversion dk = 2π·dλ/λ0²."""
    return 2.0 * math.pi * dlam / lam0**2


@dataclass(frozen=True)
class SweepProfile:
    """Cubic sweep k(t) = k0 + a1 t + a2 t² + a3 t³ over [0, t_scan]."""

    k0: float
    a1: float
    a2: float
    a3: float
    t_scan: float

    def __post_init__(self):
        if not self.t_scan > 0:
            raise InvariantError("t_scan must be positive")
        # k'(t) is quadratic; check its minimum over the interval
        cands = [0.0, self.t_scan]
        if self.a3 != 0.0:
            tv = -self.a2 / (3.0 * self.a3)
            if 0.0 < tv < self.t_scan:
                cands.append(tv)
        if min(self.slope(t) for t in cands) <= 0.0:
            raise InvariantError("sweep is not strictly increasing on [0, t_scan]")

    def slope(self, t):
        return self.a1 + 2.0 * self.a2 * t + 3.0 * self.a3 * t * t

    @property
    def k_end(self) -> float:
        return _horner(self, self.t_scan)

    @property
    def span(self) -> float:
        return self.k_end - self.k0

    @property
    def tol_k(self) -> float:
        return 1e-12 * self.span

    @classmethod
    def linear(cls, k0: float, span: float, t_scan: float) -> "SweepProfile":
        return cls(k0, span / t_scan, 0.0, 0.0, t_scan)

    @classmethod
    def s_shaped(cls, k0: float, span: float, t_scan: float, gain: float) -> "SweepProfile":
        """Sweep that is slow at both ends and fastest mid-scan.

        ``gain`` is the relative slope excess at t_scan/2 over the end slopes,
        so gain=0.3 means the middle sweeps 30% faster than the edges.
        """
        a1 = span / (t_scan * (1.0 + 2.0 * gain / 3.0))
        a3 = -gain * a1 / (0.75 * t_scan**2)
        a2 = -1.5 * a3 * t_scan
        return cls(k0, a1, a2, a3, t_scan)


def _horner(p: SweepProfile, t):
    return p.k0 + t * (p.a1 + t * (p.a2 + t * p.a3))


def eval_sweep(profile: SweepProfile, t):
    """Wavenumber at time(s) t; raises DomainError outside [0, t_scan]."""
    ta = np.asarray(t, dtype=float)
    if np.any(ta < 0.0) or np.any(ta > profile.t_scan):
        raise DomainError("time outside [0, t_scan]")
    out = _horner(profile, ta)
    return float(out) if out.ndim == 0 else out


def invert_sweep(profile: SweepProfile, k_target, max_iter: int = 100):
    """Time at which the sweep reaches k_target (scalar or array).

    Safeguarded Newton: every iterate is kept inside a bracket that is
    shrunk on each step, with bisection whenever Newton leaves it.
    """
    kt = np.atleast_1d(np.asarray(k_target, dtype=float))
    scalar = np.ndim(k_target) == 0
    k_end = profile.k_end
    if np.any(kt < profile.k0) or np.any(kt > k_end):
        raise DomainError("target wavenumber outside the sweep span")
    tol = profile.tol_k
    lo = np.zeros_like(kt)
    hi = np.full_like(kt, profile.t_scan)
    # linear initial guess
    t = (kt - profile.k0) / (k_end - profile.k0) * profile.t_scan
    done = np.zeros(kt.shape, dtype=bool)
    for _ in range(max_iter):
        f = _horner(profile, t) - kt
        done = np.abs(f) <= tol
        if done.all():
            break
        pos = f > 0
        hi = np.where(pos, t, hi)
        lo = np.where(pos, lo, t)
        step = f / profile.slope(t)
        tn = t - step
        bad = (tn <= lo) | (tn >= hi) | ~np.isfinite(tn)
        tn = np.where(bad, 0.5 * (lo + hi), tn)
        t = np.where(done, t, tn)
    else:
        f = _horner(profile, t) - kt
        if np.any(np.abs(f) > tol):
            raise DomainError("sweep inversion did not converge")
    return float(t[0]) if scalar else t


@dataclass(frozen=True)
class SourceSpectrum:
    """Gaussian source spectrum with 1/e half-width dk around k_center."""

    k_center: float
    dk: float

    def __post_init__(self):
        if not self.dk > 0 or not self.k_center > self.dk:
            raise InvariantError("need dk > 0 and k_center > dk")

    @classmethod
    def from_wavelength(cls, lam0: float, dlam: float) -> "SourceSpectrum":
        """Source with full width at half maximum dlam (wavelength units)."""
        return cls(k_from_wavelength(lam0), dk_from_dlambda(lam0, dlam) / (2.0 * math.sqrt(math.log(2.0))))

    @classmethod
    def for_resolution(cls, lam0: float, l_c: float) -> "SourceSpectrum":
        return cls(k_from_wavelength(lam0), 2.0 * math.sqrt(math.log(2.0)) / l_c)

    def density(self, k):
        """Unit-area spectrum S(k)."""
        x = (np.asarray(k, dtype=float) - self.k_center) / self.dk
        return np.exp(-x * x) / (self.dk * math.sqrt(math.pi))

    def shape(self, k):
        """Peak-normalized spectrum used inside waveforms (max 1)."""
        x = (np.asarray(k, dtype=float) - self.k_center) / self.dk
        return np.exp(-x * x)


@dataclass(frozen=True)
class MziGeometry:
    dl: float
    c_amp: float = 1.0

    def __post_init__(self):
        if not (self.dl > 0 and self.c_amp > 0):
            raise InvariantError("dl and c_amp must be positive")


@dataclass(frozen=True)
class ReflectivityProfile:
    """Reference mirror plus sample reflectors as (position, reflectivity) pairs.

    With ``coherent`` false the profile produces only the non-interferometric
    background (the power returned by every reflector), as recorded for
    background subtraction.
    """

    r_ref: float
    z_ref: float
    reflectors: tuple = field(default_factory=tuple)
    coherent: bool = True

    def __post_init__(self):
        if not 0.0 < self.r_ref <= 1.0:
            raise InvariantError("r_ref must lie in (0, 1]")
        refl = tuple((float(z), float(r)) for z, r in self.reflectors)
        for _, r in refl:
            if not 0.0 <= r <= 1.0:
                raise InvariantError("reflector reflectivity must lie in [0, 1]")
        if len({z for z, _ in refl}) != len(refl):
            raise InvariantError("reflector positions must be distinct")
        object.__setattr__(self, "reflectors", refl)

    @classmethod
    def mirror(cls, depth: float, r_ref: float = 1.0, r_s: float = 1.0, z_ref: float = 0.0):
        """Single reflector whose path difference from the reference is ``depth``."""
        return cls(r_ref, z_ref, ((z_ref - depth, r_s),))

    def reference_only(self) -> "ReflectivityProfile":
        """Background recording: same returned power, no interference terms."""
        return ReflectivityProfile(self.r_ref, self.z_ref, self.reflectors, coherent=False)


def coherence_length(spec: SourceSpectrum) -> float:
    return 2.0 * math.sqrt(math.log(2.0)) / spec.dk


def max_depth(delta_s_k: float) -> float:
    if not delta_s_k > 0:
        raise DomainError("sample spacing must be positive")
    return math.pi / (2.0 * delta_s_k)


def rolloff_6db(delta_r_k: float) -> float:
    if not delta_r_k > 0:
        raise DomainError("spectral resolution must be positive")
    return 2.0 * math.log(2.0) / delta_r_k


def rolloff_factor(delta_r_k: float, z):
    """Amplitude decay with depth caused by finite instantaneous linewidth."""
    z = np.asarray(z, dtype=float)
    return np.exp(-(delta_r_k**2) * z * z / (4.0 * math.log(2.0)))
