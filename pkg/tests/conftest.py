import math
from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from atomgates.core import PulseTrain

ROOT = Path(__file__).resolve().parents[1]
CONFIGS = ROOT / "configs"

DT = 1e-6


@pytest.fixture
def mirror_config_path():
    return CONFIGS / "mirror.default"


@pytest.fixture
def bs_config_path():
    return CONFIGS / "bs.default"


def random_trains(rng, count, dt=DT, max_len=40):
    """Unconstrained random trains (pulse areas up to a few pi)."""
    out = []
    for _ in range(count):
        n = int(rng.integers(1, max_len + 1))
        scale = 2 * math.pi / (dt * math.sqrt(n))
        out.append(PulseTrain(dt, float(rng.uniform(-math.pi, math.pi)),
                              rng.normal(0, scale, n), rng.normal(0, scale, n)))
    return out


pulse_values = st.floats(-5e6, 5e6, allow_nan=False, allow_subnormal=False)


@st.composite
def trains(draw, min_len=1, max_len=30):
    n = draw(st.integers(min_len, max_len))
    omegas = draw(st.lists(pulse_values, min_size=n, max_size=n))
    deltas = draw(st.lists(pulse_values, min_size=n, max_size=n))
    phi = draw(st.floats(-math.pi, math.pi))
    return PulseTrain(DT, phi, omegas, deltas)


def unitary_dist(a, b):
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance")
    if module is None or not module.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(module.RESULTS):
        terminalreporter.write_line(module.RESULTS[n])
