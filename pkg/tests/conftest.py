import numpy as np
import pytest
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from fusionrank.geometry import Conformation

finite_angles = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False, allow_infinity=False)


def make_conf(coords, seq=None, id="c", energy=0.0):
    coords = np.asarray(coords, dtype=float)
    seq = seq or "A" * len(coords)
    return Conformation(id, seq, coords, energy)


def random_rotations(n, seed):
    return Rotation.random(n, random_state=seed).as_matrix()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = []


@pytest.fixture
def acceptance():
    """Record one pass/fail line per acceptance criterion."""

    def log(n, ok, detail):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}"
        _ACCEPTANCE.append(line)
        print(line)
        return ok

    return log


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
