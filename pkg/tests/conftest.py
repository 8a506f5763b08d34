import numpy as np
import pytest

from geobeam.dynamics import BoundarySpec, End
from geobeam.material import MaterialParams, RigidityTensors


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def tensors():
    return RigidityTensors.from_params(MaterialParams())


@pytest.fixture
def clamped_free():
    return BoundarySpec(End.CLAMPED, End.FREE)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Record one PASS/FAIL line per acceptance criterion; echoed in the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(code, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'} {code}: {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split()[1][1:].rstrip(":"))):
            terminalreporter.write_line(line)
