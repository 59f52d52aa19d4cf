"""Command line: synthesize, calibrate, run experiments, summarize runs.

Exit codes: 0 when every assertion passes, 2 when one fails, 1 on usage,
configuration or IO errors.
"""
from __future__ import annotations

import json
import sys
from dataclasses import dataclass
from pathlib import Path

import click
import numpy as np

from . import bench, io, metrics, scenario
from .config import ConfigError, load_config, to_scenario
from .sweep_model import eval_sweep

EXIT_ASSERTION = 2
EXIT_USAGE = 1


class AssertionFailed(click.ClickException):
    exit_code = EXIT_ASSERTION


@dataclass
class Context:
    config_path: str | None
    seed: int | None
    out: Path
    threads: int

    def config(self):
        try:
            return load_config(self.config_path)
        except ConfigError as exc:
            raise click.UsageError(str(exc)) from None

    def scenario(self, base=None) -> scenario.Scenario:
        """Resolved scenario: hardware defaults (or ``base``), then the file, then --seed."""
        try:
            sc = to_scenario(self.config(), base)
        except ConfigError as exc:
            raise click.UsageError(str(exc)) from None
        return sc if self.seed is None else sc.with_(seed=self.seed)


def _floats(text: str | None):
    if text is None:
        return None
    try:
        return tuple(float(v) for v in text.split(",") if v.strip())
    except ValueError:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}") from None


def _ints(text: str | None):
    vals = _floats(text)
    if vals is None:
        return None
    if any(v != int(v) for v in vals):
        raise click.BadParameter(f"expected integers, got {text!r}")
    return tuple(int(v) for v in vals)


@click.group(context_settings={"help_option_names": ["-h", "--help"]})
@click.option("--config", "config_path", type=click.Path(dir_okay=False), help="INI configuration file.")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), help="Base seed; overrides [noise] seed.")
@click.option("--out", type=click.Path(file_okay=False), default="out", show_default=True,
              help="Output root directory.")
@click.option("--threads", type=click.IntRange(1), default=1, show_default=True,
              help="Worker threads for experiment trials.")
@click.pass_context
def cli(ctx, config_path, seed, out, threads):
    """Simulation and calibration of swept-source OCT scans."""
    ctx.obj = Context(config_path, seed, Path(out), threads)


@cli.command()
@click.pass_obj
def synth(obj: Context):
    """Write MZI, interferogram and ground-truth sweep CSVs."""
    sc = obj.scenario()
    acq = scenario.acquire(sc)
    d = obj.out / "synth"
    t = acq.mzi.times
    io.write_columns(d / "mzi.csv", ("time_s", "value"), t, acq.mzi.values)
    io.write_columns(d / "interferogram.csv", ("time_s", "value"), t, acq.interf.values)
    io.write_columns(d / "sweep.csv", ("time_s", "k_rad_per_m"), t, eval_sweep(sc.profile, t))
    io.write_json(d / "summary.json", {"command": "synth", "config": sc.as_dict(), "samples": len(t),
                                       "clipped": {"mzi": acq.mzi.clipped, "interferogram": acq.interf.clipped}})
    click.echo(f"wrote {len(t)} samples per signal to {d}")


def _write_ascan(d: Path, stem: str, a) -> None:
    io.write_columns(d / f"{stem}.csv", ("depth_m", "magnitude"), a.depth_axis, a.magnitude)


@cli.command()
@click.option("--method", type=click.Choice(scenario.METHODS), default=None,
              help="Calibration method; defaults to [pipeline] method or realtime.")
@click.option("--no-calib", is_flag=True, help="Also emit the uncalibrated A-scan for comparison.")
@click.option("--plot/--no-plot", default=True, show_default=True, help="Write an SVG of the A-scan.")
@click.pass_obj
def calibrate(obj: Context, method, no_calib, plot):
    """Calibrate one simulated scan and reconstruct its A-scan."""
    sc = obj.scenario()
    method = method or obj.config().get("pipeline", "method") or "realtime"
    try:
        scan = scenario.calibrate(sc, method)
    except (ValueError, RuntimeError) as exc:
        raise click.ClickException(f"{method} calibration failed: {exc}") from None
    a = scenario.ascan(sc, scan)
    d = obj.out / "calibrate" / method
    io.write_columns(d / "calibrated.csv", ("k_rad_per_m", "value"), scan.k_values, scan.samples)
    _write_ascan(d, "ascan", a)
    skip = int(np.searchsorted(a.depth_axis, 0.25 * sc.depth))
    peak = float(a.depth_axis[skip + int(np.argmax(a.magnitude[skip:]))])
    summary = {"command": "calibrate", "method": method, "config": sc.as_dict(), "samples": len(scan),
               "peak_depth_m": peak}
    try:
        summary["fwhm_m"] = metrics.fwhm(a, peak_hint=sc.depth)
    except metrics.DetectionError as exc:
        summary["fwhm_m"] = None
        summary["fwhm_error"] = str(exc)
    series = [(method, a.depth_axis * 1e3, a.magnitude)]
    if no_calib:
        u = scenario.ascan(sc, scenario.uncalibrated(sc))
        _write_ascan(d, "ascan_uncalibrated", u)
        try:
            summary["fwhm_uncalibrated_m"] = metrics.fwhm(u, peak_hint=sc.depth, outer=True)
        except metrics.DetectionError as exc:
            summary["fwhm_uncalibrated_m"] = None
            summary["fwhm_uncalibrated_error"] = str(exc)
        series.append(("uncalibrated", u.depth_axis * 1e3, u.magnitude))
    if plot:
        io.svg_lines(d / "ascan.svg", series, title=f"A-scan ({method})", xlabel="depth (mm)",
                     ylabel="magnitude")
    io.write_json(d / "summary.json", summary)
    click.echo(f"{method}: {len(scan)} samples, peak at {peak * 1e6:.1f} um; wrote {d}")


# option name -> (keyword of the bench runner, parser)
OVERRIDES = {
    "trials": ("trials", int),
    "osr": ("osr_grid", _floats),
    "bits": ("bits_grid", _ints),
    "snr": ("snr_grid", _floats),
    "lengths": ("lengths", _ints),
    "repeats": ("repeats", int),
}

ACCEPTS = {
    "table31": {"trials"},
    "noise-sweep": {"trials", "snr"},
    "mse-law": {"trials"},
    "osr-surface": {"trials", "osr", "bits"},
    "perturbation": {"trials", "osr"},
    "timing": {"lengths", "repeats"},
    "rolloff": set(),
    "skew": set(),
}


@cli.command("bench")
@click.argument("experiment", type=click.Choice(bench.EXPERIMENTS))
@click.option("--trials", type=click.IntRange(1), help="Trials per cell.")
@click.option("--osr", help="Comma-separated oversampling ratios.")
@click.option("--bits", help="Comma-separated ADC resolutions.")
@click.option("--snr", help="Comma-separated SNR grid in dB.")
@click.option("--lengths", help="Comma-separated scan lengths (timing).")
@click.option("--repeats", type=click.IntRange(5), help="Timed repeats per point (timing).")
@click.pass_obj
def bench_cmd(obj: Context, experiment, **given):
    """Run one experiment and write report.csv, summary.json and plots."""
    kw = {}
    for opt, raw in given.items():
        if raw is None:
            continue
        if opt not in ACCEPTS[experiment]:
            raise click.UsageError(f"--{opt} does not apply to {experiment}")
        name, parse = OVERRIDES[opt]
        kw[name] = parse(raw)
    if experiment == "timing":
        if obj.seed is not None:
            kw["seed"] = obj.seed
        res = bench.run(experiment, **kw)
    else:
        res = bench.run(experiment, obj.scenario(scenario.Scenario()), threads=obj.threads, **kw)
    d = bench.write_outputs(res, obj.out)
    for c in res.checks:
        click.echo(f"{'PASS' if c.passed else 'FAIL'}  {c.name}  {c.detail}")
    click.echo(f"wrote {d}")
    if not res.passed:
        failed = sum(not c.passed for c in res.checks)
        raise AssertionFailed(f"{failed} of {len(res.checks)} checks failed")


@cli.command()
@click.argument("root", type=click.Path(exists=True, file_okay=False), required=False)
@click.pass_obj
def report(obj: Context, root):
    """Summarize every experiment run found under ROOT (default: --out)."""
    root = Path(root) if root else obj.out
    runs = sorted(root.glob("*/*/summary.json"))
    runs = [p for p in runs if "experiment" in json.loads(p.read_text())]
    if not runs:
        raise click.ClickException(f"no experiment runs under {root}")
    rows, failed = [], 0
    for p in runs:
        s = json.loads(p.read_text())
        bad = [c["name"] for c in s["checks"] if not c["passed"]]
        failed += bool(bad)
        rows.append({"experiment": s["experiment"], "hash": s["hash"], "passed": s["passed"],
                     "checks": len(s["checks"]), "failed": len(bad)})
        click.echo(f"{'PASS' if s['passed'] else 'FAIL'}  {s['experiment']:<14} {s['hash']}  "
                   f"{len(s['checks']) - len(bad)}/{len(s['checks'])} checks")
        for name in bad:
            click.echo(f"      failed: {name}")
    io.write_rows(root / "index.csv", rows)
    if failed:
        raise AssertionFailed(f"{failed} of {len(runs)} runs have failing checks")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="sscal", standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.Abort:
        click.echo("aborted", err=True)
        return EXIT_USAGE
    except AssertionFailed as exc:
        exc.show()
        return EXIT_ASSERTION
    except click.ClickException as exc:
        exc.show()
        return EXIT_USAGE
    except OSError as exc:
        click.echo(f"Error: {exc}", err=True)
        return EXIT_USAGE
    return 0


if __name__ == "__main__":
    sys.exit(main())
