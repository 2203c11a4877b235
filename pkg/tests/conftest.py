import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from qdlab import RationalQD

settings.register_profile(
    "qdlab",
    deadline=None,
    max_examples=30,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("qdlab")


def random_integrable(rng: np.random.Generator, n_poles: int, spread: float = 2.0, min_sep: float = 0.05) -> RationalQD:
    """Sphere-integrable differential: simple poles, at most n_poles - 3 zeros."""
    poles: list[complex] = []
    while len(poles) < n_poles:
        p = complex(*rng.uniform(-spread, spread, 2))
        if all(abs(p - u) > min_sep for u in poles):
            poles.append(p)
    n_zeros = int(rng.integers(0, n_poles - 2))
    zeros = []
    while len(zeros) < n_zeros:
        z = complex(*rng.uniform(-spread, spread, 2))
        if all(abs(z - u) > min_sep for u in poles):
            zeros.append(z)
    leading = complex(*rng.normal(size=2))
    return RationalQD.from_points(leading, zeros, poles)


@pytest.fixture
def rng():
    return np.random.default_rng(0)
