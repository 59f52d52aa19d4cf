"""Default desk-scale setup and the end-to-end pipelines built on it."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from . import demod
from .calib import (
    AScan,
    CalibratedScan,
    dc_subtract,
    phase_to_wavenumber,
    realtime_calibrate,
    reconstruct_ascan,
    resample_calibrate,
    uncalibrated_scan,
    zero_crossing_calibrate,
)
from .lcs import CalibClock, build_ladder, crossings_from_samples, find_crossings
from .sweep_model import MziGeometry, ReflectivityProfile, SourceSpectrum, SweepProfile
from .synth import AdcModel, NoiseModel, SampledSignal, quantize, synth_interferogram, synth_mzi

METHODS = ("hilbert", "envelope", "ekf", "ukf", "ipdft-by2", "ipdft-rvci1", "ipdft-rvci3",
           "zero-crossing", "zero-crossing-quad", "realtime")


@dataclass(frozen=True)
class Scenario:
    """All knobs of one simulated acquisition, in SI units.

    The sweep covers ``span_factor`` source half-widths centred on the
    source, and is ``sweep_gain`` faster mid-scan than at its ends, unless
    ``sweep_coeffs`` gives (k0, a1, a2, a3) outright. The MZI delay is
    chosen so the scan holds ``mzi_cycles`` fringes, unless ``mzi_dl`` is set.
    """

    lam0: float = 1310e-9
    l_c: float = 11.1e-6
    span_factor: float = 5.0
    sweep_rate: float = 150e3
    sweep_gain: float = 0.3
    mzi_cycles: float = 512.0
    n_samples: int = 4096
    adc_bits: int = 14
    adc_full_scale: float = 2.2
    sigma_w: float = 1e-3
    seed: int = 0
    depth: float = 998e-6
    r_ref: float = 1.0
    r_s: float = 1.0
    m_c: int = 8
    ladder_m: int = 1024
    osr: float = 4.0
    interp: str = "cubic_spline"
    fft_pad: int = 8
    linewidth_k: float = 0.0
    sweep_coeffs: tuple | None = None
    mzi_dl: float | None = None

    @property
    def t_scan(self) -> float:
        return 1.0 / self.sweep_rate

    @property
    def spectrum(self) -> SourceSpectrum:
        return SourceSpectrum.for_resolution(self.lam0, self.l_c)

    @property
    def profile(self) -> SweepProfile:
        if self.sweep_coeffs is not None:
            return SweepProfile(*map(float, self.sweep_coeffs), self.t_scan)
        s = self.spectrum
        span = self.span_factor * s.dk
        k0 = s.k_center - 0.5 * span
        if self.sweep_gain == 0:
            return SweepProfile.linear(k0, span, self.t_scan)
        return SweepProfile.s_shaped(k0, span, self.t_scan, self.sweep_gain)

    @property
    def geometry(self) -> MziGeometry:
        if self.mzi_dl is not None:
            return MziGeometry(self.mzi_dl)
        return MziGeometry(2 * math.pi * self.mzi_cycles / self.profile.span)

    @property
    def rate(self) -> float:
        return self.n_samples / self.t_scan

    @property
    def adc(self) -> AdcModel:
        return AdcModel(self.adc_bits, self.adc_full_scale, self.rate)

    @property
    def mirror(self) -> ReflectivityProfile:
        return ReflectivityProfile.mirror(self.depth, self.r_ref, self.r_s)

    def times(self) -> np.ndarray:
        return np.arange(self.n_samples) / self.rate

    def with_(self, **kw) -> "Scenario":
        return replace(self, **kw)

    def as_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True, eq=False)
class Acquisition:
    mzi: SampledSignal
    interf: SampledSignal
    reference: SampledSignal


def acquire(sc: Scenario, trial: int = 0, refl: ReflectivityProfile | None = None,
            quantized: bool = True) -> Acquisition:
    """Uniformly sampled MZI, sample-arm and reference-only signals for one trial."""
    refl = sc.mirror if refl is None else refl
    t = sc.times()
    prof, spec = sc.profile, sc.spectrum
    mzi = synth_mzi(prof, sc.geometry, spec, t, NoiseModel(sc.sigma_w, sc.seed, 3 * trial))
    itf = synth_interferogram(prof, refl, spec, t, NoiseModel(sc.sigma_w, sc.seed, 3 * trial + 1),
                              linewidth_k=sc.linewidth_k)
    ref = synth_interferogram(prof, refl.reference_only(), spec, t,
                              NoiseModel(sc.sigma_w, sc.seed, 3 * trial + 2))
    if quantized:
        adc = sc.adc
        mzi, itf, ref = quantize(mzi, adc), quantize(itf, adc), quantize(ref, adc)
    return Acquisition(mzi, itf, ref)


def estimate_phase(method: str, mzi: SampledSignal, sigma_w: float = 1e-2) -> demod.PhaseEstimate:
    """Run one of the five estimators with its default tuning."""
    if method == "hilbert":
        return demod.hilbert_phase(mzi)
    if method == "envelope":
        return demod.envelope_phase(mzi)
    if method == "ekf":
        x0 = demod.ekf_initial_state(mzi)
        return demod.ekf_estimate(mzi, demod.EkfParams(x0, sigma_nA=1e-3, sigma_nk=1e-10, sigma_w=sigma_w,
                                                       p0_diag=demod.ekf_initial_cov(x0[0])))
    if method == "ukf":
        return demod.ukf_estimate(mzi, demod.UkfParams(sigma_w=sigma_w, **demod.ukf_initial_params(mzi)))
    if method.startswith("ipdft-"):
        kind = method.split("-", 1)[1]
        if kind == "by2":
            p = demod.IpdftParams(32, "BY2")
        else:
            p = demod.IpdftParams(32, "RVCI", int(kind[-1]))
        est = demod.ipdft_estimate(mzi, p)
        if est.phase.size < len(mzi):
            # hold the last block's slope over the dropped tail
            n = len(mzi) - est.phase.size
            slope = est.per_block_freq[-1, 1]
            tail = est.phase[-1] + slope * np.arange(1, n + 1)
            est = demod.PhaseEstimate(np.concatenate((est.phase, tail)), per_block_freq=est.per_block_freq)
        return est
    raise ValueError(f"unknown estimator {method!r}")


def estimated_clock(sc: Scenario, est: demod.PhaseEstimate, times: np.ndarray, m_c: int) -> CalibClock:
    """Clock with m_c events per MZI fringe from a sampled phase estimate."""
    k_hat = phase_to_wavenumber(est, sc.geometry.dl, sc.profile.k0)
    ladder = estimated_ladder(sc, k_hat, m_c)
    return crossings_from_samples(times[: k_hat.size], k_hat, ladder)


def estimated_ladder(sc: Scenario, k_hat: np.ndarray, m_c: int):
    """Equidistant ladder with m_c levels per fringe, one step inside the estimated span."""
    dl = sc.geometry.dl
    k_mono = np.maximum.accumulate(k_hat)
    step = 2 * math.pi / (m_c * dl)
    lo, hi = k_mono[0] + step, k_mono[-1] - step
    m = int(math.floor((hi - lo) / step)) + 1
    return build_ladder(lo, lo + (m - 1) * step, m)


def calibrate(sc: Scenario, method: str, trial: int = 0, refl: ReflectivityProfile | None = None,
              acq: Acquisition | None = None) -> CalibratedScan:
    """DC-subtracted calibrated scan from one of the supported methods.

    Estimator-driven methods use the proposed real-time path: the estimated
    phase drives a level-crossing clock with m_c events per fringe and the
    analog interferogram is sampled at those events. ``hilbert`` is the
    conventional baseline instead: lookup on the estimated sweep and
    interpolation of the uniformly sampled interferogram.
    """
    refl = sc.mirror if refl is None else refl
    acq = acquire(sc, trial, refl) if acq is None else acq
    prof, spec = sc.profile, sc.spectrum
    if method == "realtime":
        lad = build_ladder(prof.k0, prof.k_end, sc.ladder_m)
        clock = find_crossings(prof, lad)
        return _realtime_pair(sc, clock, refl, trial)
    if method in ("zero-crossing", "zero-crossing-quad"):
        mode = "basic" if method == "zero-crossing" else "quadrature"
        dl = sc.geometry.dl
        scan = zero_crossing_calibrate(acq.mzi, acq.interf, dl, mode, prof.k0)
        ref = zero_crossing_calibrate(acq.mzi, acq.reference, dl, mode, prof.k0)
        return dc_subtract(scan, ref)
    if method == "hilbert":
        est = demod.hilbert_phase(acq.mzi)
        k_hat = phase_to_wavenumber(est, sc.geometry.dl, prof.k0)
        lad = estimated_ladder(sc, k_hat, sc.m_c)
        def estimator(_):
            return k_hat
        scan = resample_calibrate(acq.mzi, acq.interf, estimator, lad, sc.interp, sc.osr)
        ref = resample_calibrate(acq.mzi, acq.reference, estimator, lad, sc.interp, sc.osr)
        return dc_subtract(scan, ref)
    est = estimate_phase(method, acq.mzi, max(sc.sigma_w, 1e-2))
    clock = estimated_clock(sc, est, acq.mzi.times, sc.m_c)
    return _realtime_pair(sc, clock, refl, trial)


def _realtime_pair(sc: Scenario, clock: CalibClock, refl: ReflectivityProfile, trial: int) -> CalibratedScan:
    prof, spec = sc.profile, sc.spectrum
    adc = sc.adc
    scan = realtime_calibrate(prof, refl, spec, clock, NoiseModel(sc.sigma_w, sc.seed, 3 * trial + 1),
                              adc, sc.linewidth_k)
    ref = realtime_calibrate(prof, refl.reference_only(), spec, clock,
                             NoiseModel(sc.sigma_w, sc.seed, 3 * trial + 2), adc)
    return dc_subtract(scan, ref)


def ascan(sc: Scenario, scan: CalibratedScan) -> AScan:
    n = len(scan)
    fft_len = sc.fft_pad * (1 << (n - 1).bit_length())
    return reconstruct_ascan(scan, fft_len)


def uncalibrated(sc: Scenario, trial: int = 0, refl: ReflectivityProfile | None = None) -> CalibratedScan:
    refl = sc.mirror if refl is None else refl
    acq = acquire(sc, trial, refl)
    return dc_subtract(uncalibrated_scan(acq.interf, sc.profile), uncalibrated_scan(acq.reference, sc.profile))
