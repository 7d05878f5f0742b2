import pytest
from hypothesis import HealthCheck, settings

from holblock import IntersectionSpec

settings.register_profile("default", max_examples=100, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

THIRD = (1 / 3, 1 / 3, 1 / 3)


def model1(rates=(0.1, 0.1, 0.1), probs=THIRD, p_t=0.0):
    return IntersectionSpec.build("I", rates, probs, p_t)


def model2(rates=(0.15, 0.15), probs=(0.5, 0.5), p_t=0.0):
    return IntersectionSpec.build("II", rates, probs, p_t)


@pytest.fixture
def sym1():
    return model1()


@pytest.fixture
def sym2():
    return model2()


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
