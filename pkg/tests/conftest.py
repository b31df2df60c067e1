from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

from motpave.instances import example_2_2
from motpave.measures import DiscreteMeasure

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

F = Fraction


@pytest.fixture(scope="session")
def ex22():
    return example_2_2()


@pytest.fixture
def dirac0():
    return DiscreteMeasure.dirac((0,))


@pytest.fixture
def sym1():
    """(delta_-1 + delta_1) / 2 on the line."""
    return DiscreteMeasure.from_atoms([((-1,), "1/2"), ((1,), "1/2")])


@pytest.fixture
def sym2():
    return DiscreteMeasure.from_atoms([((-2,), "1/2"), ((2,), "1/2")])


_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    """Record one PASS/FAIL line per acceptance criterion; the lines are
    printed as they happen and again in the terminal summary."""
    def record(n, ok, detail=""):
        line = f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}".rstrip()
        _VERDICTS.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _VERDICTS:
        terminalreporter.section("acceptance criteria")
        for line in _VERDICTS:
            terminalreporter.write_line(line)
