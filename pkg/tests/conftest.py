import pytest
from hypothesis import HealthCheck, settings

from qgc.structure import build_table

settings.register_profile("qgc", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qgc")

ACCEPTANCE = {}


@pytest.fixture
def acceptance():
    """Record ``(criterion, passed, detail)`` for the end-of-run summary."""
    def record(n, ok, detail):
        ACCEPTANCE[n] = (bool(ok), detail)
        return ok
    return record


@pytest.fixture(scope="session")
def table3():
    return build_table(3)


@pytest.fixture(scope="session")
def table5():
    return build_table(5)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
