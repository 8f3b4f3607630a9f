import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile(
    "default", deadline=None, max_examples=40, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

unit = st.floats(-1.0, 1.0, allow_nan=False, allow_infinity=False)
complexes = st.builds(complex, unit, unit)


def coeff_lists(n):
    return st.lists(complexes, min_size=n, max_size=n)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def close(a, b, tol):
    a = np.asarray(a, dtype=complex)
    b = np.asarray(b, dtype=complex)
    return float(np.max(np.abs(a - b), initial=0.0)) <= tol * max(1.0, float(np.max(np.abs(b), initial=0.0)))
