"""Experiment harness: studies over the scenario pipelines with pass/fail records."""
from __future__ import annotations

import hashlib
import json
import math
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import demod, io, metrics, scenario
from .calib import CalibratedScan, realtime_calibrate, resample_calibrate
from .lcs import (
    DEFAULT_LCS,
    LcsHardware,
    build_ladder,
    check_rate,
    clock_error,
    find_crossings,
    lms_adapt,
)
from .sweep_model import ReflectivityProfile, eval_sweep, invert_sweep, rolloff_6db
from .synth import (
    AdcModel,
    NoiseModel,
    SampledSignal,
    interferogram_values,
    make_rng,
    mzi_phase,
    quantize,
    synth_mzi,
)

EXPERIMENTS = ("table31", "noise-sweep", "mse-law", "osr-surface", "perturbation", "timing", "rolloff", "skew")


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class BenchResult:
    name: str
    config: dict
    reports: list = field(default_factory=list)
    checks: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    plots: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def check(self, name: str, passed, detail: str = "") -> Check:
        c = Check(name, bool(passed), detail)
        self.checks.append(c)
        return c


def config_hash(name: str, config: dict) -> str:
    blob = json.dumps({"experiment": name, "config": io._jsonable(config)}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:12]


def _map(fn, items, threads: int = 1) -> list:
    items = list(items)
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(threads) as ex:
        return list(ex.map(fn, items))


def write_outputs(res: BenchResult, out_root) -> Path:
    """out_root/<experiment>/<hash>/{report.csv, summary.json, plots/*.svg}."""
    d = Path(out_root) / res.name / config_hash(res.name, res.config)
    rows = []
    for rep in res.reports:
        rows += [{"report": rep.name, **r} for r in rep.rows()]
    io.write_rows(d / "report.csv", rows)
    io.write_json(d / "summary.json", {
        "experiment": res.name,
        "hash": config_hash(res.name, res.config),
        "config": res.config,
        "passed": res.passed,
        "checks": [asdict(c) for c in res.checks],
        "summary": res.summary,
    })
    for name, spec in res.plots.items():
        io.svg_lines(d / "plots" / f"{name}.svg", **spec)
    return d


# Axial-resolution grid -----------------------------------------------------------

# published FWHM of two reference cells: (method, depth, M_C) -> meters
REFERENCE_CELLS = {("hilbert", 514e-6, 8): 11.10e-6, ("envelope", 998e-6, 12): 11.72e-6}


def run_table31(base: scenario.Scenario | None = None, trials: int = 100, depths=(514e-6, 998e-6, 1481e-6),
                m_cs=(8, 12, 16), tolerance: float = 0.15, threads: int = 1) -> BenchResult:
    """FWHM of envelope and Hilbert pipelines over depth × M_C."""
    base = scenario.Scenario() if base is None else base
    if trials < 1:
        raise ValueError("need at least one trial")
    cfg = {"scenario": base.as_dict(), "trials": trials, "depths": list(depths), "m_cs": list(m_cs),
           "tolerance": tolerance}
    res = BenchResult("table31", cfg)
    target = base.l_c
    cells = [(m, d, c) for m in ("envelope", "hilbert") for d in depths for c in m_cs]

    def one(cell):
        m, d, c = cell
        return metrics.axial_resolution_sweep(base, [d], [c], trials=trials, methods=(m,)).cells[0]

    rep = metrics.MetricsReport("table31", "fwhm", "m")
    for cell in _map(one, cells, threads):
        rep.cells.append(cell)
    res.reports.append(rep)
    grid_mean = float(np.mean(rep.means()))
    for c in rep.cells:
        p = c.params
        tag = f"{p['method']} depth={p['depth_m'] * 1e6:.0f}um M_C={p['m_c']}"
        res.check(f"fwhm {tag}", not c.failures and abs(c.mean - target) <= tolerance * target,
                  f"mean {c.mean * 1e6:.3f} um, target {target * 1e6:.2f} um")
        res.check(f"flat {tag}", abs(c.mean - grid_mean) <= tolerance * grid_mean,
                  f"grid mean {grid_mean * 1e6:.3f} um")
    by = {(c.params["depth_m"], c.params["m_c"], c.params["method"]): c.mean for c in rep.cells}
    for (m, d, mc), ref in REFERENCE_CELLS.items():
        if (d, mc, m) in by:
            res.check(f"reference {m} depth={d * 1e6:.0f}um M_C={mc}", abs(by[(d, mc, m)] - ref) <= tolerance * ref,
                      f"mean {by[(d, mc, m)] * 1e6:.3f} um, reference {ref * 1e6:.2f} um")
    for d in depths:
        for mc in m_cs:
            e, h = by[(float(d), int(mc), "envelope")], by[(float(d), int(mc), "hilbert")]
            res.check(f"parity depth={d * 1e6:.0f}um M_C={mc}", abs(e - h) <= tolerance * h,
                      f"envelope {e * 1e6:.3f} um, hilbert {h * 1e6:.3f} um")
    res.summary = {"grid_mean_m": grid_mean, "target_m": target}
    res.plots["fwhm"] = {
        "series": [(f"{m} M_C={mc}", [d * 1e6 for d in depths],
                    [by[(float(d), int(mc), m)] * 1e6 for d in depths])
                   for m in ("envelope", "hilbert") for mc in m_cs],
        "title": "Axial resolution", "xlabel": "depth (um)", "ylabel": "FWHM (um)"}
    return res


# EKF versus Hilbert ---------------------------------------------------------------

EKF_TRACKING = {"sigma_nA": 1e-5, "sigma_nk": 1e-10}


def phase_mse(estimate: np.ndarray, truth: np.ndarray, edge: float = 0.1) -> float:
    """Phase MSE over the interior, after removing the best whole-cycle offset.

    The first and last ``edge`` fraction are excluded so start-up transients
    of the trackers do not dominate.
    """
    n = min(estimate.size, truth.size)
    a, b = int(n * edge), n - int(n * edge)
    d = estimate[a:b] - truth[a:b]
    d = d - 2 * math.pi * np.round(np.mean(d) / (2 * math.pi))
    return float(np.mean(d**2))


def snr_sigma(snr_db: float | None, amplitude: float = 1.0) -> float:
    if snr_db is None or math.isinf(snr_db):
        return 0.0
    return math.sqrt(0.5 * amplitude**2 / 10 ** (snr_db / 10))


def run_noise_sweep(base: scenario.Scenario | None = None, snr_grid=(10, 15, 20, 25, 30), trials: int = 50,
                    depths=(500e-6, 1000e-6, 1500e-6), threads: int = 1) -> BenchResult:
    """Phase MSE of EKF and Hilbert on a unit-amplitude chirp across SNR.

    The interferometric MSE reported alongside is that of a unit-amplitude
    mirror term read at the estimated instead of the true wavenumber.
    """
    base = scenario.Scenario() if base is None else base
    cfg = {"scenario": base.as_dict(), "snr_grid": list(snr_grid), "trials": trials, "depths": list(depths),
           "ekf": EKF_TRACKING}
    res = BenchResult("noise-sweep", cfg)
    prof, geom = base.profile, base.geometry
    t = base.times()
    truth = mzi_phase(prof, geom, t)
    k_true = eval_sweep(prof, t)
    rep = metrics.MetricsReport("noise-sweep", "phase_mse", "rad^2")
    irep = metrics.MetricsReport("noise-sweep-interferometric", "mse", "1")

    def one(args):
        snr, trial = args
        sw = snr_sigma(snr)
        mzi = synth_mzi(prof, geom, None, t, NoiseModel(sw, base.seed, 1000 + trial))
        out = {}
        h = demod.hilbert_phase(mzi).phase
        out["hilbert"] = h
        try:
            x0 = demod.ekf_initial_state(mzi)
            p = demod.EkfParams(x0, sigma_w=max(sw, 1e-3), p0_diag=demod.ekf_initial_cov(x0[0]), **EKF_TRACKING)
            out["ekf"] = demod.ekf_estimate(mzi, p).phase
        except demod.DivergenceError as exc:
            out["ekf"] = exc
        return out

    points = list(snr_grid) + [None]
    for snr in points:
        runs = _map(one, [(snr, i) for i in range(trials)], threads)
        for method in ("ekf", "hilbert"):
            vals, fails, ivals = [], [], {d: [] for d in depths}
            for i, r in enumerate(runs):
                ph = r[method]
                if isinstance(ph, Exception):
                    fails.append(f"trial {i}: {ph}")
                    continue
                vals.append(phase_mse(ph, truth))
                k_hat = ph / geom.dl
                k_hat = k_hat + 2 * math.pi / geom.dl * np.round((k_true[0] - k_hat[0]) * geom.dl / (2 * math.pi))
                n = k_hat.size
                sl = slice(n // 10, n - n // 10)
                for d in depths:
                    ivals[d].append(float(np.mean((np.cos(2 * k_hat[sl] * d) - np.cos(2 * k_true[sl] * d)) ** 2)))
            label = "inf" if snr is None else snr
            rep.add({"method": method, "snr_db": label}, vals, fails)
            for d in depths:
                irep.add({"method": method, "snr_db": label, "depth_m": d}, ivals[d])
    res.reports += [rep, irep]
    by = {(c.params["method"], c.params["snr_db"]): c for c in rep.cells}
    ratios = {}
    for snr in snr_grid:
        e, h = by[("ekf", snr)], by[("hilbert", snr)]
        ratio = e.mean / h.mean
        ratios[snr] = ratio
        res.check(f"ekf/hilbert snr={snr}dB", not e.failures and ratio <= 0.1,
                  f"ratio {ratio:.4f} (ekf {e.mean:.3e}, hilbert {h.mean:.3e}), {len(e.failures)} diverged")
    e, h = by[("ekf", "inf")], by[("hilbert", "inf")]
    res.check("noiseless phase mse < 1e-6", e.mean < 1e-6 and h.mean < 1e-6,
              f"ekf {e.mean:.3e}, hilbert {h.mean:.3e}")
    res.summary = {"ratio_by_snr": ratios}
    res.plots["phase_mse"] = {
        "series": [(m, list(snr_grid), [by[(m, s)].mean for s in snr_grid]) for m in ("ekf", "hilbert")],
        "title": "Phase MSE", "xlabel": "SNR (dB)", "ylabel": "MSE (rad^2)", "logy": True}
    return res


# MSE law under injected phase error ---------------------------------------------------

def run_mse_law(base: scenario.Scenario | None = None, sigmas_sq=(1e-6, 1e-4, 1e-2), trials: int = 1000,
                depth: float = 1000e-6, tolerance: float = 0.10, threads: int = 1) -> BenchResult:
    """Monte-Carlo interferometric MSE when each calibrated sample lands at a wrong wavenumber.

    Each clock event is displaced so that the mirror phase 2kΔz errs by a
    Gaussian amount of the given variance. Scans are divided by the model's
    cross-term gain so the mirror term has amplitude sqrt(R_R R_S).
    """
    base = scenario.Scenario() if base is None else base
    cfg = {"scenario": base.as_dict(), "sigmas_sq": list(sigmas_sq), "trials": trials, "depth": depth}
    res = BenchResult("mse-law", cfg)
    prof = base.profile
    refl = ReflectivityProfile.mirror(depth, base.r_ref, base.r_s)
    ref_only = refl.reference_only()
    margin = 8 * math.sqrt(max(sigmas_sq)) / (2 * depth)
    lad = build_ladder(prof.k0 + margin, prof.k_end - margin, base.ladder_m)
    clock = find_crossings(prof, lad)
    gain = 0.5

    def scan(times):
        v = interferogram_values(prof, refl, None, times) - interferogram_values(prof, ref_only, None, times)
        return v / gain

    ideal = scan(clock.events)
    rep = metrics.MetricsReport("mse-law", "mse", "1")
    r_prod = base.r_ref * base.r_s
    for s2 in sigmas_sq:
        def one(trial, s2=s2):
            eps = make_rng(base.seed, 5000 + trial).normal(0.0, math.sqrt(s2), lad.levels.size)
            t_err = invert_sweep(prof, clock.event_levels + eps / (2 * depth))
            return metrics.mse(scan(t_err), ideal)
        vals = _map(one, range(trials), threads)
        cell = rep.add({"sigma_k_sq": s2}, vals)
        pred = metrics.predicted_mse(s2, r_prod)
        rel = abs(cell.mean - pred) / pred
        res.check(f"mse law sigma^2={s2:g}", rel <= tolerance,
                  f"measured {cell.mean:.4e}, predicted {pred:.4e}, rel err {rel:.4f}")
    res.reports.append(rep)
    return res


# Resampling versus real-time ---------------------------------------------------------

def _osr_setup(base: scenario.Scenario, depth: float):
    prof = base.profile
    lad = build_ladder(prof.k0, prof.k_end, base.ladder_m)
    clock = find_crossings(prof, lad)
    tt = np.linspace(0.0, prof.t_scan, 20001)
    bandwidth = 2 * depth * float(np.max(prof.slope(tt))) / (2 * math.pi)
    return prof, lad, clock, bandwidth


def _resampled(prof, spec, refl, lad, rate, adc, interp, osr, perturbation=None) -> CalibratedScan:
    t = np.arange(int(prof.t_scan * rate) + 1) / rate
    sig = SampledSignal.uniform_grid(interferogram_values(prof, refl, spec, t, perturbation=perturbation), rate)
    sig = quantize(sig, adc)
    return resample_calibrate(sig, sig, lambda s: eval_sweep(prof, s.times), lad, interp, osr)


def _trial_mirror(base, depth, trial):
    # sub-wavelength jitter randomizes the fringe phase from trial to trial
    jitter = make_rng(base.seed, 7000 + trial).uniform(0.0, base.lam0 / 2)
    return ReflectivityProfile.mirror(depth + jitter, base.r_ref, base.r_s)


def run_osr_surface(base: scenario.Scenario | None = None, osr_grid=(2, 4, 8, 16, 32), bits_grid=(12, 14),
                    interps=("previous", "linear", "cubic_spline"), trials: int = 20, depth: float = 1481e-6,
                    threads: int = 1) -> BenchResult:
    """MSE of resampled and real-time scans against the ideal scan at the ladder levels.

    Resampling reads the interferogram, sampled at osr × its Nyquist rate,
    at the true level-crossing times; its error is interpolation plus
    quantization. The real-time path quantizes samples taken at the events.
    Ordering and monotonicity are asserted at the finest ADC of the grid,
    where interpolation error rather than quantization dominates.
    """
    base = scenario.Scenario() if base is None else base
    cfg = {"scenario": base.as_dict(), "osr_grid": list(osr_grid), "bits_grid": list(bits_grid),
           "interps": list(interps), "trials": trials, "depth": depth}
    res = BenchResult("osr-surface", cfg)
    prof, lad, clock, bw = _osr_setup(base, depth)
    spec = base.spectrum
    rep = metrics.MetricsReport("osr-surface", "mse", "V^2")
    rt_rep = metrics.MetricsReport("osr-surface-realtime", "mse", "V^2")

    def one(args):
        bits, trial = args
        adc = AdcModel(bits, base.adc_full_scale, 1.0)
        refl = _trial_mirror(base, depth, trial)
        ideal = interferogram_values(prof, refl, spec, clock.events)
        rt = realtime_calibrate(prof, refl, spec, clock, None, adc)
        out = {"rt": metrics.mse(rt, ideal)}
        for kind in interps:
            for osr in osr_grid:
                r = _resampled(prof, spec, refl, lad, osr * 2 * bw, adc, kind, osr)
                out[(kind, osr)] = metrics.mse(r.samples, ideal[: len(r)])
        return out

    table = {}
    for bits in bits_grid:
        runs = _map(one, [(bits, i) for i in range(trials)], threads)
        floor = (base.adc_full_scale * 2.0**-bits) ** 2 / 12
        for kind in interps:
            for osr in osr_grid:
                c = rep.add({"bits": bits, "interp": kind, "osr": osr}, [r[(kind, osr)] for r in runs])
                table[(bits, kind, osr)] = c.mean
        rt_vals = [r["rt"] for r in runs]
        for osr in osr_grid:
            c = rt_rep.add({"bits": bits, "osr": osr}, rt_vals)
            table[(bits, "realtime", osr)] = c.mean
        rt_means = [table[(bits, "realtime", o)] for o in osr_grid]
        spread = (max(rt_means) - min(rt_means)) / min(rt_means)
        res.check(f"realtime independent of osr bits={bits}", spread < 0.01, f"relative spread {spread:.2e}")
        ratio = rt_means[0] / floor
        res.check(f"realtime near quantization floor bits={bits}", 1 / 3 <= ratio <= 3,
                  f"mse/floor {ratio:.3f}")
        if "linear" in interps:
            worst = min(table[(bits, "linear", o)] for o in osr_grid if o <= 32)
            res.check(f"linear above realtime bits={bits}", worst > rt_means[0],
                      f"best linear {worst:.3e} vs realtime {rt_means[0]:.3e}")
    top = max(bits_grid)
    for kind in interps:
        seq = [table[(top, kind, o)] for o in osr_grid]
        res.check(f"strictly decreasing with osr {kind} bits={top}", all(b < a for a, b in zip(seq, seq[1:])),
                  " > ".join(f"{v:.4e}" for v in seq))
    if "cubic_spline" in interps:
        o = max(osr_grid)
        sp, rt = table[(top, "cubic_spline", o)], table[(top, "realtime", o)]
        res.check(f"spline within 2x of realtime at osr={o} bits={top}", sp <= 2 * rt,
                  f"spline {sp:.4e}, realtime {rt:.4e}")
    order = [k for k in ("previous", "linear", "cubic_spline") if k in interps]
    for osr in osr_grid:
        seq = [table[(top, k, osr)] for k in order]
        res.check(f"ordering at osr={osr} bits={top}", all(a >= b for a, b in zip(seq, seq[1:])),
                  " >= ".join(f"{k} {v:.4e}" for k, v in zip(order, seq)))
    improvement = {f"{k}@{o}": metrics.mse_improvement(table[(top, k, o)], table[(top, "realtime", o)])
                   for k in interps for o in osr_grid}
    res.summary = {"improvement_percent": improvement,
                   "quantization_floor": {b: (base.adc_full_scale * 2.0**-b) ** 2 / 12 for b in bits_grid}}
    res.reports += [rep, rt_rep]
    res.plots["mse_vs_osr"] = {
        "series": [(f"{k} {b}b", list(osr_grid), [table[(b, k, o)] for o in osr_grid])
                   for b in bits_grid for k in (*interps, "realtime")],
        "title": "Resampling MSE", "xlabel": "OSR", "ylabel": "MSE (V^2)", "logy": True}
    return res


def run_perturbation(base: scenario.Scenario | None = None, osr_grid=(8, 16, 32), trials: int = 20,
                     amplitude: float = 1e-6, freq: float = 100.0, depth: float = 1481e-6,
                     interp: str = "cubic_spline", tolerance: float = 0.20, threads: int = 1) -> BenchResult:
    """Resampling MSE with the sample moving as amplitude·sin(2π·freq·t).

    Each trial starts its scan at a random point of the perturbation period
    and is compared against the unperturbed ideal scan.
    """
    base = scenario.Scenario() if base is None else base
    cfg = {"scenario": base.as_dict(), "osr_grid": list(osr_grid), "trials": trials, "amplitude": amplitude,
           "freq": freq, "depth": depth, "interp": interp}
    res = BenchResult("perturbation", cfg)
    prof, lad, clock, bw = _osr_setup(base, depth)
    spec = base.spectrum
    adc = base.adc
    omega = 2 * math.pi * freq
    rep = metrics.MetricsReport("perturbation", "mse", "V^2")

    def one(trial):
        refl = _trial_mirror(base, depth, trial)
        t_start = make_rng(base.seed, 9000 + trial).uniform(0.0, 1.0 / freq)
        ideal = interferogram_values(prof, refl, spec, clock.events)
        out = {}
        for osr in osr_grid:
            r = _resampled(prof, spec, refl, lad, osr * 2 * bw, adc, interp, osr, (amplitude, omega, t_start))
            out[osr] = metrics.mse(r.samples, ideal[: len(r)])
        return out

    runs = _map(one, range(trials), threads)
    means = []
    for osr in osr_grid:
        means.append(rep.add({"osr": osr, "interp": interp}, [r[osr] for r in runs]).mean)
    spread = max(means) / min(means) - 1
    res.check("perturbation floor flat across osr", spread <= tolerance,
              ", ".join(f"osr {o}: {m:.4e}" for o, m in zip(osr_grid, means)) + f"; spread {spread:.3f}")
    res.reports.append(rep)
    return res


# Execution time ------------------------------------------------------------------------

TIMED = ("hilbert", "ipdft", "ekf", "ukf")


def _timing_signal(n: int, seed: int) -> SampledSignal:
    sc = scenario.Scenario(n_samples=n, mzi_cycles=n / 8)
    return synth_mzi(sc.profile, sc.geometry, None, sc.times(), NoiseModel(0.05, seed, 0))


def _timed_call(method: str, mzi: SampledSignal):
    if method == "hilbert":
        return lambda: demod.hilbert_phase(mzi)
    if method == "ipdft":
        p = demod.IpdftParams(32, "RVCI", 1)
        return lambda: demod.ipdft_estimate(mzi, p)
    if method == "ekf":
        x0 = demod.ekf_initial_state(mzi)
        p = demod.EkfParams(x0, sigma_w=0.05, p0_diag=demod.ekf_initial_cov(x0[0]), **EKF_TRACKING)
        return lambda: demod.ekf_estimate(mzi, p)
    if method == "ukf":
        p = demod.UkfParams(sigma_w=0.05, **demod.ukf_initial_params(mzi))
        return lambda: demod.ukf_estimate(mzi, p)
    raise ValueError(f"unknown timed method {method!r}")


def median_time(fn, repeats: int = 7, min_time: float = 0.02) -> float:
    """Median wall time of fn; calls are batched until one batch exceeds min_time."""
    fn()
    batch = 1
    while True:
        t0 = time.perf_counter()
        for _ in range(batch):
            fn()
        if time.perf_counter() - t0 >= min_time or batch >= 1 << 12:
            break
        batch *= 2
    times = []
    for _ in range(max(repeats, 5)):
        t0 = time.perf_counter()
        for _ in range(batch):
            fn()
        times.append((time.perf_counter() - t0) / batch)
    return float(np.median(times))


def run_timing(methods=TIMED, lengths=(1024, 4096, 8192, 16384), repeats: int = 7, seed: int = 0) -> BenchResult:
    cfg = {"methods": list(methods), "lengths": list(lengths), "repeats": repeats, "seed": seed}
    res = BenchResult("timing", cfg)
    rep = metrics.MetricsReport("timing", "median_wall_time", "s")
    table = {}
    for n in lengths:
        mzi = _timing_signal(n, seed)
        for m in methods:
            table[(m, n)] = median_time(_timed_call(m, mzi), repeats)
            rep.add({"method": m, "length": n}, [table[(m, n)]])
    res.reports.append(rep)
    for n in lengths:
        if n < 4096:
            continue
        if {"ukf", "ekf"} <= set(methods):
            u, e = table[("ukf", n)], table[("ekf", n)]
            res.check(f"ukf <= ekf L={n}", u <= e, f"ukf {u * 1e3:.3f} ms, ekf {e * 1e3:.3f} ms, ratio {u / e:.2f}")
        if {"ipdft", "hilbert"} <= set(methods):
            i, h = table[("ipdft", n)], table[("hilbert", n)]
            res.check(f"ipdft <= hilbert L={n}", i <= h,
                      f"ipdft {i * 1e3:.3f} ms, hilbert {h * 1e3:.3f} ms, ratio {i / h:.2f}")
    ops = {}
    for n in lengths:
        h, i = demod.count_ops("hilbert", 17, n), demod.count_ops("ipdft", L=n, P=32)
        ops[n] = {"hilbert_total": str(h.total), "ipdft_total": str(i.total)}
    res.summary = {"median_s": {f"{m}@{n}": v for (m, n), v in table.items()}, "op_counts": ops}
    res.plots["timing"] = {
        "series": [(m, list(lengths), [table[(m, n)] * 1e3 for n in lengths]) for m in methods],
        "title": "Execution time", "xlabel": "samples", "ylabel": "median time (ms)", "logy": True}
    return res


# Roll-off -------------------------------------------------------------------------------

def run_rolloff(base: scenario.Scenario | None = None, linewidth_lambda: float = 0.2e-9,
                depths=None, tolerance: float = 0.10) -> BenchResult:
    """Peak level versus depth through the real-time path with a finite linewidth."""
    base = scenario.Scenario() if base is None else base
    # the default ladder's depth range stops short of the deepest points
    base = base.with_(ladder_m=max(base.ladder_m, 4096))
    lk = 2 * math.pi * linewidth_lambda / base.lam0**2
    depths = np.arange(0.25e-3, 3.01e-3, 0.25e-3) if depths is None else np.asarray(depths, float)
    cfg = {"scenario": base.as_dict(), "linewidth_lambda": linewidth_lambda, "depths": depths}
    res = BenchResult("rolloff", cfg)
    curves = {}
    for label, width in (("finite", lk), ("ideal", 0.0)):
        sc = base.with_(linewidth_k=width)

        def peak(d, sc=sc):
            s = sc.with_(depth=d)
            return metrics.peak_height(scenario.ascan(s, scenario.calibrate(s, "realtime")), d)

        curves[label] = metrics.rolloff_curve(depths, peak)
    oracle = rolloff_6db(lk)
    z6 = curves["finite"].depth_6db
    rel = float("inf") if z6 is None else abs(z6 - oracle) / oracle
    res.check("-6 dB depth", rel <= tolerance,
              f"measured {z6 if z6 is None else f'{z6 * 1e3:.4f} mm'}, predicted {oracle * 1e3:.4f} mm")
    flat = float(np.max(np.abs(curves["ideal"].db)))
    res.check("ideal model flat within 1 dB", flat <= 1.0, f"max deviation {flat:.3f} dB")
    rise = float(np.max(np.diff(curves["finite"].db)))
    res.check("roll-off nonincreasing", rise <= 0.5, f"largest rise {rise:.3f} dB")
    rep = metrics.MetricsReport("rolloff", "peak", "dB")
    for label, c in curves.items():
        for d, v in zip(c.depths, c.db):
            rep.add({"model": label, "depth_m": float(d)}, [v])
    res.reports.append(rep)
    res.summary = {"depth_6db_m": z6, "predicted_m": oracle}
    res.plots["rolloff"] = {
        "series": [(k, c.depths * 1e3, c.db) for k, c in curves.items()],
        "title": "Sensitivity roll-off", "xlabel": "depth (mm)", "ylabel": "peak (dB)"}
    return res


# Clock accuracy and skew --------------------------------------------------------------

def run_skew(base: scenario.Scenario | None = None, skews=(-1e-9, -0.3e-9, 0.1e-9, 0.5e-9, 1e-9),
             iters: int = 200, hw: LcsHardware = DEFAULT_LCS) -> BenchResult:
    """Clock-event accuracy, event-rate check and LMS skew adaptation."""
    base = scenario.Scenario() if base is None else base
    cfg = {"scenario": base.as_dict(), "skews": list(skews), "iters": iters, "hw": asdict(hw)}
    res = BenchResult("skew", cfg)
    prof = base.profile
    lad = build_ladder(prof.k0, prof.k_end, base.ladder_m)
    clock = find_crossings(prof, lad)
    err = clock_error(prof, clock)
    res.check("clock events on levels", err <= 1e-12 * prof.span,
              f"max |k(t)-level| {err:.3e} rad/m, bound {1e-12 * prof.span:.3e}")
    rate = check_rate(clock, hw)
    res.check("event rate within hardware limit", rate.violations == 0,
              f"min spacing {rate.min_spacing:.3e} s, {rate.violations} violations")
    # keep adapted levels inside the sweep: trim both ends by the largest skew
    guard = max(abs(s) for s in skews) * float(np.max(prof.slope(np.linspace(0, prof.t_scan, 1001)))) * 2
    inner = build_ladder(prof.k0 + guard, prof.k_end - guard, base.ladder_m)
    rep = metrics.MetricsReport("skew", "residual", "s")
    for s in skews:
        try:
            out = lms_adapt(prof, inner, s, iters=iters, tol=1e-13)
            resid, its = out.residual, out.iterations
        except Exception as exc:  # ConvergenceError carries the history
            resid, its = getattr(exc, "residuals", [float("inf")])[-1], iters
        rep.add({"skew_s": s, "iterations": its}, [resid])
        res.check(f"lms skew={s:g}s", resid < 1e-12, f"residual {resid:.3e} s after {its} iterations")
    res.reports.append(rep)
    res.summary = {"clock_error": err, "min_event_spacing_s": rate.min_spacing}
    return res


def run(name: str, base: scenario.Scenario | None = None, threads: int = 1, **kw) -> BenchResult:
    if name == "table31":
        return run_table31(base, threads=threads, **kw)
    if name == "noise-sweep":
        return run_noise_sweep(base, threads=threads, **kw)
    if name == "mse-law":
        return run_mse_law(base, threads=threads, **kw)
    if name == "osr-surface":
        return run_osr_surface(base, threads=threads, **kw)
    if name == "perturbation":
        return run_perturbation(base, threads=threads, **kw)
    if name == "timing":
        return run_timing(**kw)
    if name == "rolloff":
        return run_rolloff(base, **kw)
    if name == "skew":
        return run_skew(base, **kw)
    raise ValueError(f"unknown experiment {name!r}; choose from {', '.join(EXPERIMENTS)}")
