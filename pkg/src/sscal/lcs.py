"""Behavioral level-crossing sampler producing the calibrating clock."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .sweep_model import DomainError, InvariantError, SweepProfile, eval_sweep, invert_sweep


@dataclass(frozen=True, eq=False)
class LevelLadder:
    """Strictly increasing wavenumber levels (rad/m).

    Ladders made by build_ladder are equidistant; ladders returned by
    lms_adapt follow the sweep shape and generally are not.
    """

    levels: np.ndarray

    def __post_init__(self):
        lv = np.asarray(self.levels, dtype=float)
        if lv.ndim != 1 or lv.size < 2 or np.any(np.diff(lv) <= 0):
            raise InvariantError("levels must be a strictly increasing array of ≥ 2 values")
        object.__setattr__(self, "levels", lv)

    def __len__(self):
        return self.levels.size

    @property
    def spacing(self) -> float:
        return (self.levels[-1] - self.levels[0]) / (self.levels.size - 1)

    def is_uniform(self, rtol: float = 1e-9) -> bool:
        return bool(np.allclose(np.diff(self.levels), self.spacing, rtol=rtol, atol=0))


@dataclass(frozen=True, eq=False)
class CalibClock:
    """Event times where the sweep crosses ladder levels, with the level hit.

    ``on_levels`` marks clocks from the analytic inverse, where the sweep
    sits exactly on the level at each event; clocks found on an estimate
    of k carry that estimate's timing error instead.
    """

    events: np.ndarray
    level_index: np.ndarray
    ladder: LevelLadder
    skipped: int = 0
    on_levels: bool = False

    def __post_init__(self):
        ev = np.asarray(self.events, dtype=float)
        if ev.size > 1 and np.any(np.diff(ev) <= 0):
            raise InvariantError("clock events must be strictly increasing")
        object.__setattr__(self, "events", ev)
        object.__setattr__(self, "level_index", np.asarray(self.level_index, dtype=int))

    def __len__(self):
        return self.events.size

    @property
    def event_levels(self) -> np.ndarray:
        return self.ladder.levels[self.level_index]


def build_ladder(k_start: float, k_end: float, M: int) -> LevelLadder:
    if M < 2:
        raise DomainError("a ladder needs at least two levels")
    if not k_end > k_start:
        raise DomainError("k_end must exceed k_start")
    step = (k_end - k_start) / (M - 1)
    levels = k_start + step * np.arange(M)
    levels[-1] = k_end
    return LevelLadder(levels)


def find_crossings(profile: SweepProfile, ladder: LevelLadder) -> CalibClock:
    lv = ladder.levels
    inside = (lv >= profile.k0) & (lv <= profile.k_end)
    skipped = int((~inside).sum())
    if skipped:
        warnings.warn(f"{skipped} ladder levels outside the sweep span were skipped")
    idx = np.flatnonzero(inside)
    return CalibClock(invert_sweep(profile, lv[idx]), idx, ladder, skipped, on_levels=True)


def crossings_from_samples(times: np.ndarray, k_hat: np.ndarray, ladder: LevelLadder) -> CalibClock:
    """Crossing times of a sampled, increasing wavenumber estimate.

    Each crossing is located by linear interpolation between the two
    bracketing samples, so accuracy is limited to a fraction of a sample.
    """
    k_mono = np.maximum.accumulate(np.asarray(k_hat, dtype=float))
    lv = ladder.levels
    inside = (lv >= k_mono[0]) & (lv <= k_mono[-1])
    idx = np.flatnonzero(inside)
    ev = np.interp(lv[idx], k_mono, times)
    keep = np.concatenate(([True], np.diff(ev) > 0))
    return CalibClock(ev[keep], idx[keep], ladder, int(lv.size - keep.sum()))


@dataclass(frozen=True)
class LcsHardware:
    bits: int
    full_scale: float
    max_event_rate: float
    loop_delay: float = 0.0

    def __post_init__(self):
        if self.bits < 1 or not self.max_event_rate > 0:
            raise InvariantError("need bits ≥ 1 and a positive event rate")

    def slew_rate(self) -> float:
        """Fastest input slope the ladder can follow, U·f_s/2^Q (V/s)."""
        return self.full_scale * self.max_event_rate / 2**self.bits


LCS_7G7 = LcsHardware(bits=8, full_scale=1.0, max_event_rate=7.7e9)
LCS_5G = LcsHardware(bits=8, full_scale=1.0, max_event_rate=5e9)
DEFAULT_LCS = LCS_5G


@dataclass(frozen=True)
class RateReport:
    n_events: int
    min_spacing: float
    violations: int
    slew_rate: float
    slope_ok: bool | None

    @property
    def ok(self) -> bool:
        return self.violations == 0 and self.slope_ok is not False


def check_rate(clock: CalibClock, hw: LcsHardware, input_slope: float | None = None) -> RateReport:
    """Flag consecutive events closer than one hardware period."""
    gaps = np.diff(clock.events)
    period = 1.0 / hw.max_event_rate
    # equality passes; the tolerance absorbs rounding of the period itself
    bad = int(np.count_nonzero(gaps < period * (1.0 - 1e-12)))
    sr = hw.slew_rate()
    slope_ok = None if input_slope is None else abs(input_slope) <= sr
    return RateReport(len(clock), float(gaps.min()) if gaps.size else float("inf"), bad, sr, slope_ok)


def fom(power_w: float, enob: float, bw_hz: float) -> float:
    """Energy per conversion step, P/(2^ENOB·2·BW), in joules."""
    if min(power_w, enob, bw_hz) <= 0:
        raise DomainError("power, ENOB and bandwidth must be positive")
    return power_w / (2.0**enob * 2.0 * bw_hz)


def estimate_skew(trigger_time: float, t_delay_calibrating: float, t_delay_interferometric: float) -> float:
    """Positive when the calibrating path is the slower one.

    The trigger instant cancels out of the difference; it is accepted so the
    call mirrors the measurement setup.
    """
    if t_delay_calibrating < 0 or t_delay_interferometric < 0:
        raise DomainError("delays must be nonnegative")
    return (trigger_time + t_delay_calibrating) - (trigger_time + t_delay_interferometric)


class ConvergenceError(RuntimeError):
    def __init__(self, msg: str, residuals):
        super().__init__(msg)
        self.residuals = list(residuals)


@dataclass(frozen=True, eq=False)
class LmsResult:
    ladder: LevelLadder
    residuals: list
    iterations: int

    @property
    def residual(self) -> float:
        return self.residuals[-1]


def lms_adapt(profile: SweepProfile, ladder: LevelLadder, true_skew, step_mu: float = 1.0,
              iters: int = 200, tol: float = 1e-12) -> LmsResult:
    """Shift each level so its crossing moves by the path skew.

    Per event the timing error e = skew − (t(k') − t(k)) drives
    k' ← k' + µ·a1·e. ``residuals`` holds the max |e| before each update
    and after the last one.
    """
    if step_mu <= 0:
        raise DomainError("step size must be positive")
    base = invert_sweep(profile, ladder.levels)
    skew = np.broadcast_to(np.asarray(true_skew, dtype=float), base.shape)
    k_adj = ladder.levels.copy()
    residuals = []
    for it in range(iters + 1):
        try:
            err = skew - (invert_sweep(profile, k_adj) - base)
        except DomainError:
            raise ConvergenceError("adjusted levels left the sweep span", residuals) from None
        residuals.append(float(np.max(np.abs(err))))
        if residuals[-1] < tol:
            return LmsResult(LevelLadder(k_adj), residuals, it)
        if it == iters:
            break
        k_adj = k_adj + step_mu * profile.a1 * err
    raise ConvergenceError(f"residual {residuals[-1]:.3e} s after {iters} iterations", residuals)


def clock_error(profile: SweepProfile, clock: CalibClock) -> float:
    """Largest |k(t_event) − level| over the clock."""
    if len(clock) == 0:
        return 0.0
    return float(np.max(np.abs(eval_sweep(profile, clock.events) - clock.event_levels)))


def write_clock(path, clock: CalibClock):
    """Clock CSV: event_index, t_s, level_rad_per_m."""
    from .io import write_columns
    return write_columns(path, ("event_index", "t_s", "level_rad_per_m"),
                         np.arange(len(clock)), clock.events, clock.event_levels)
