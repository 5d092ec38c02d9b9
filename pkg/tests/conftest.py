import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from alarmtaxis.grid import Domain

settings.register_profile("default", deadline=None, max_examples=100,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(params=["1d", "2d"])
def domain(request):
    if request.param == "1d":
        return Domain.interval(3.0, 24)
    return Domain.rectangle(2.0, 3.0, 10, 15)


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(results):
        parts = results[n]
        ok = all(p[1] for p in parts)
        detail = "; ".join(f"{name}={'ok' if good else 'FAILED'} ({info})" for name, good, info in parts)
        tr.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
