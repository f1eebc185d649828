from fractions import Fraction

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite",
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("suite")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Compile the jitted kernels once so individual tests see steady-state
    runtimes (the cache persists across sessions)."""
    from mmskit import Additive, Table, check_class, exact_mms

    v = Additive([Fraction(1), Fraction(2), Fraction(3)])
    exact_mms(v, 3, 2)
    check_class(v)
    check_class(Table([0, 1, 1, 1], validate=False))
