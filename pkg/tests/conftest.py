import math

import pytest
from hypothesis import HealthCheck, settings

from wedgewh.kernel import make_params

settings.register_profile("wedgewh", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("wedgewh")

THETA0 = 5 * math.pi / 4


@pytest.fixture(scope="session")
def ref_params():
    """k1 = 1+i, k2 = 2+i, incidence 5 pi/4."""
    return make_params(1 + 1j, 2 + 1j, THETA0)


@pytest.fixture(scope="session")
def deg_params():
    return make_params(1 + 1j, 1 + 1j, THETA0)
