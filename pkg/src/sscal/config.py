"""INI configuration with a strict schema; all numbers in SI units.

Example::

    [source]
    lambda0 = 1310e-9
    delta_lambda = 68e-9       # or: coherence_length = 11.1e-6

    [sweep]
    rate = 150e3               # A-scans per second; t_scan = 1/rate
    gain = 0.3                 # mid-scan speed-up of the S-shaped law
    span_factor = 5            # swept span in source half-widths
    # coeffs = k0, a1, a2, a3  # explicit cubic law instead of gain/span

    [geometry]
    dl = 4.3e-3                # or: mzi_cycles = 512

    [sample]
    depth = 998e-6
    r_ref = 1
    r_s = 1

    [ladder]
    m = 1024
    m_c = 8

    [adc]
    bits = 14
    rate = 250e6
    full_scale = 2.2

    [noise]
    sigma_w = 1e-3
    seed = 0

    [pipeline]
    method = realtime
    interp = cubic_spline
    osr = 4
    fft_pad = 8
    linewidth_lambda = 0

    [experiment]
    name = table31
    trials = 100
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from pathlib import Path

from .calib import INTERP_KINDS
from .scenario import METHODS, Scenario
from .sweep_model import coherence_length, SourceSpectrum

HARDWARE_DEFAULTS = {"lam0": 1310e-9, "sweep_rate": 150e3, "adc_bits": 14, "adc_rate": 250e6}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending key."""


def _float(v: str) -> float:
    return float(v)


def _int(v: str) -> int:
    f = float(v)
    if f != int(f):
        raise ValueError(f"{v!r} is not an integer")
    return int(f)


def _floats(v: str) -> tuple:
    return tuple(float(x) for x in v.replace(",", " ").split())


def _choice(options):
    def conv(v: str) -> str:
        v = v.strip()
        if v not in options:
            raise ValueError(f"{v!r} is not one of {', '.join(options)}")
        return v
    return conv


SCHEMA = {
    "source": {"lambda0": _float, "delta_lambda": _float, "coherence_length": _float},
    "sweep": {"rate": _float, "gain": _float, "span_factor": _float, "coeffs": _floats},
    "geometry": {"dl": _float, "mzi_cycles": _float},
    "sample": {"depth": _float, "r_ref": _float, "r_s": _float},
    "ladder": {"m": _int, "m_c": _int},
    "adc": {"bits": _int, "rate": _float, "full_scale": _float},
    "noise": {"sigma_w": _float, "seed": _int},
    "pipeline": {"method": _choice(METHODS), "interp": _choice(INTERP_KINDS), "osr": _float,
                 "fft_pad": _int, "linewidth_lambda": _float},
    "experiment": {"name": str, "trials": _int},
}


@dataclass
class Config:
    values: dict = field(default_factory=dict)

    def get(self, section: str, key: str, default=None):
        return self.values.get(section, {}).get(key, default)

    def is_set(self, section: str, key: str) -> bool:
        return key in self.values.get(section, {})

    def set(self, section: str, key: str, raw: str):
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        if key not in SCHEMA[section]:
            raise ConfigError(f"unknown key '{key}' in [{section}]")
        try:
            self.values.setdefault(section, {})[key] = SCHEMA[section][key](raw)
        except ValueError as exc:
            raise ConfigError(f"[{section}] {key}: {exc}") from None


def parse_config(text: str, source: str = "<config>") -> Config:
    cp = configparser.ConfigParser(inline_comment_prefixes=("#", ";"), interpolation=None)
    cp.optionxform = str
    try:
        cp.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    cfg = Config()
    for section in cp.sections():
        for key, raw in cp.items(section):
            try:
                cfg.set(section, key, raw)
            except ConfigError as exc:
                raise ConfigError(f"{source}: {exc}") from None
    return cfg


def load_config(path=None) -> Config:
    if path is None:
        return Config()
    p = Path(path)
    try:
        text = p.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {p}: {exc}") from None
    return parse_config(text, str(p))


def to_scenario(cfg: Config, base: Scenario | None = None) -> Scenario:
    """Apply the configured keys on top of ``base``.

    Without a base the hardware defaults apply: a 250 MS/s ADC, with the
    MZI delay chosen for about eight samples per fringe unless configured.
    """
    kw = {}
    if base is None:
        n = int(round(HARDWARE_DEFAULTS["adc_rate"] / HARDWARE_DEFAULTS["sweep_rate"]))
        base = Scenario(n_samples=n, mzi_cycles=n / 8)
    g = cfg.get
    if cfg.is_set("source", "lambda0"):
        kw["lam0"] = g("source", "lambda0")
    lam0 = kw.get("lam0", base.lam0)
    if cfg.is_set("source", "delta_lambda") and cfg.is_set("source", "coherence_length"):
        raise ConfigError("[source] give delta_lambda or coherence_length, not both")
    if cfg.is_set("source", "delta_lambda"):
        kw["l_c"] = coherence_length(SourceSpectrum.from_wavelength(lam0, g("source", "delta_lambda")))
    if cfg.is_set("source", "coherence_length"):
        kw["l_c"] = g("source", "coherence_length")
    simple = {("sweep", "rate"): "sweep_rate", ("sweep", "gain"): "sweep_gain",
              ("sweep", "span_factor"): "span_factor", ("sweep", "coeffs"): "sweep_coeffs",
              ("geometry", "dl"): "mzi_dl", ("geometry", "mzi_cycles"): "mzi_cycles",
              ("sample", "depth"): "depth", ("sample", "r_ref"): "r_ref", ("sample", "r_s"): "r_s",
              ("ladder", "m"): "ladder_m", ("ladder", "m_c"): "m_c", ("adc", "bits"): "adc_bits",
              ("adc", "full_scale"): "adc_full_scale", ("noise", "sigma_w"): "sigma_w",
              ("noise", "seed"): "seed", ("pipeline", "interp"): "interp", ("pipeline", "osr"): "osr",
              ("pipeline", "fft_pad"): "fft_pad"}
    for (sec, key), name in simple.items():
        if cfg.is_set(sec, key):
            kw[name] = g(sec, key)
    if "sweep_coeffs" in kw and len(kw["sweep_coeffs"]) != 4:
        raise ConfigError("[sweep] coeffs needs four numbers: k0, a1, a2, a3")
    rate = kw.get("sweep_rate", base.sweep_rate)
    if cfg.is_set("adc", "rate"):
        kw["n_samples"] = int(round(g("adc", "rate") / rate))
    if cfg.is_set("pipeline", "linewidth_lambda"):
        kw["linewidth_k"] = 2 * math.pi * g("pipeline", "linewidth_lambda") / lam0**2
    sc = base.with_(**kw)
    validate(sc)
    return sc


def validate(sc: Scenario):
    """Build every derived object once so invariant violations surface before a run."""
    checks = (("source", lambda: sc.spectrum), ("sweep", lambda: sc.profile), ("geometry", lambda: sc.geometry),
              ("sample", lambda: sc.mirror), ("adc", lambda: sc.adc))
    for section, build in checks:
        try:
            build()
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"[{section}] {exc}") from None
    if sc.n_samples < 64:
        raise ConfigError("[adc] rate gives fewer than 64 samples per scan")
    if sc.ladder_m < 2 or sc.m_c < 1:
        raise ConfigError("[ladder] needs m >= 2 and m_c >= 1")
    if sc.depth <= 0:
        raise ConfigError("[sample] depth must be positive")
