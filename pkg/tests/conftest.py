import os

import pytest
from hypothesis import HealthCheck, settings

from perturbed_airy import INTEGRAL, WeightParams, build_aux, build_system

# every example rebuilds extended-precision objects, so keep counts modest
settings.register_profile(
    "default",
    max_examples=20,
    deadline=None,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.register_profile("thorough", max_examples=200, deadline=None)
settings.register_profile("debugger", max_examples=5, deadline=None, report_multiple_bugs=False)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

HALF_ONE = WeightParams("1/2", 1)


@pytest.fixture(scope="session")
def half_one():
    return HALF_ONE


@pytest.fixture(scope="session")
def table14():
    """lambda=1/2, t=1, nmax=14 at 60 digits."""
    return build_system(HALF_ONE, 14, 60)


@pytest.fixture(scope="session")
def aux14(table14):
    return build_aux(table14, INTEGRAL)
