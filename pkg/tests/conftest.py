import time
from contextlib import contextmanager
from importlib import resources

import numpy as np
import pytest

# criterion number -> (status, seconds, note)
_CRITERIA: dict = {}


@contextmanager
def _record(number: int, budget: float):
    t0 = time.perf_counter()
    try:
        yield
    except BaseException as exc:
        _CRITERIA[number] = ("FAIL", time.perf_counter() - t0, f"{type(exc).__name__}: {exc}"[:160])
        raise
    elapsed = time.perf_counter() - t0
    if elapsed > budget:
        _CRITERIA[number] = ("FAIL", elapsed, f"over the {budget:g} s budget")
        pytest.fail(f"criterion {number} took {elapsed:.1f} s (budget {budget:g} s)")
    _CRITERIA[number] = ("PASS", elapsed, "")


@pytest.fixture
def criterion():
    """``with criterion(n, budget_seconds): ...`` records a PASS/FAIL line."""
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, seconds, note = _CRITERIA[number]
        line = f"criterion {number:2d}: {status}  ({seconds:7.2f} s)"
        terminalreporter.write_line(line + (f"  {note}" if note else ""))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def scene_dir():
    return resources.files("cornerscatter") / "data"
