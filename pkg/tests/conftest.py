import numpy as np
import pytest
import sympy as sp
from hypothesis import settings

from qsys.algebra import Polynomial

settings.register_profile("qsys", deadline=None, max_examples=60)
settings.load_profile("qsys")


def to_sympy(p):
    """Independent view of a qsys polynomial or rational function."""
    if isinstance(p, Polynomial):
        return sp.sympify(str(p).replace("^", "**"), rational=True)
    return sp.sympify(f"({p.numerator})/({p.denominator})".replace("^", "**"), rational=True)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[list]()


def pytest_configure(config):
    config.stash[_ACCEPTANCE] = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; shown in the terminal summary."""
    lines = request.config.stash[_ACCEPTANCE]

    def record(label, ok, detail):
        line = f"criterion {label:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        print(line)
        lines.append(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
