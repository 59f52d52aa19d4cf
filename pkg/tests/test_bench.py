import json

import numpy as np
import pytest

from sscal import bench
from sscal.scenario import Scenario


def test_config_hash_is_stable_and_sensitive():
    cfg = {"scenario": Scenario().as_dict(), "trials": 3}
    assert bench.config_hash("table31", cfg) == bench.config_hash("table31", dict(cfg))
    assert bench.config_hash("table31", cfg) != bench.config_hash("table31", {**cfg, "trials": 4})
    assert bench.config_hash("table31", cfg) != bench.config_hash("noise-sweep", cfg)
    assert len(bench.config_hash("x", {})) == 12


def test_unknown_experiment():
    with pytest.raises(ValueError, match="choose from"):
        bench.run("table99")


def test_outputs_layout_and_byte_identical_rerun(tmp_path):
    a = bench.write_outputs(bench.run("skew"), tmp_path / "a")
    b = bench.write_outputs(bench.run("skew"), tmp_path / "b")
    assert a.relative_to(tmp_path / "a") == b.relative_to(tmp_path / "b")
    assert a.parent.name == "skew" and len(a.name) == 12
    for name in ("report.csv", "summary.json"):
        assert (a / name).read_bytes() == (b / name).read_bytes()
    s = json.loads((a / "summary.json").read_text())
    assert s["hash"] == a.name and s["experiment"] == "skew"
    assert s["passed"] is True and all(set(c) == {"name", "passed", "detail"} for c in s["checks"])
    assert s["config"]["scenario"]["ladder_m"] == 1024


def test_table31_grid_and_threads(tmp_path):
    one = bench.run("table31", trials=2)
    many = bench.run("table31", trials=2, threads=4)
    assert one.reports[0].rows() == many.reports[0].rows()
    cells = {(c.params["method"], c.params["depth_m"], c.params["m_c"]) for c in one.reports[0].cells}
    assert len(cells) == 18
    assert one.passed, [c for c in one.checks if not c.passed]
    names = [c.name for c in one.checks]
    assert "reference envelope depth=998um M_C=12" in names
    d = bench.write_outputs(one, tmp_path)
    assert (d / "plots" / "fwhm.svg").read_text().startswith("<svg")
    header = (d / "report.csv").read_text().splitlines()[0].split(",")
    assert header == ["report", "method", "depth_m", "m_c", "bits", "quantity", "unit", "statistic", "value"]


def test_noise_sweep_small():
    res = bench.run("noise-sweep", trials=2, snr_grid=(20,))
    checks = {c.name: c for c in res.checks}
    assert checks["ekf/hilbert snr=20dB"].passed
    assert checks["noiseless phase mse < 1e-6"].passed


def test_mse_law_small():
    res = bench.run("mse-law", trials=100)
    assert res.passed, [c.detail for c in res.checks]


def test_osr_surface_cells():
    res = bench.run("osr-surface", trials=1, osr_grid=(2, 4, 8), bits_grid=(14,))
    resampled = res.reports[0]
    assert len(resampled.cells) == 9
    names = {c.name: c.passed for c in res.checks}
    assert names["realtime independent of osr bits=14"]
    assert names["ordering at osr=2 bits=14"]
    assert names["strictly decreasing with osr previous bits=14"]
    assert res.summary["improvement_percent"]["linear@2"] > 0


def test_rolloff_and_skew_pass():
    for name in ("rolloff", "skew"):
        res = bench.run(name)
        assert res.passed, [(c.name, c.detail) for c in res.checks if not c.passed]


def test_timing_records_every_length():
    res = bench.run("timing", lengths=(1024, 4096), repeats=5)
    assert {c.name for c in res.checks} >= {"ukf <= ekf L=4096", "ipdft <= hilbert L=4096"}
    rows = res.reports[0].rows()
    assert {r["length"] for r in rows} == {1024, 4096}


def test_phase_mse_and_snr_sigma():
    truth = np.linspace(0, 100, 1000)
    assert bench.phase_mse(truth + 2 * np.pi, truth) == pytest.approx(0, abs=1e-20)
    assert bench.snr_sigma(None) == 0
    assert bench.snr_sigma(20) == pytest.approx(np.sqrt(0.5 / 100))
