import math

import numpy as np
import pytest

from sscal.scenario import Scenario
from sscal.sweep_model import SweepProfile


@pytest.fixture(scope="session")
def desk():
    return Scenario()


@pytest.fixture(scope="session")
def cubic_profile():
    """Fast-middle sweep over 5 source half-widths at 1310 nm, one 150 kHz scan."""
    return Scenario().profile


def chirp_phase(n, cycles=512, gain=0.3):
    """Phase (rad/sample index) of an s-shaped sweep with `cycles` fringes over n samples."""
    prof = SweepProfile.s_shaped(0.0, 2 * math.pi * cycles, float(n), gain)
    t = np.arange(n, dtype=float)
    return prof.k0 + t * (prof.a1 + t * (prof.a2 + t * prof.a3))


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        terminalreporter.write_line(results[number])
