import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab import (
    AffineMap,
    BadRadii,
    NonIntegrable,
    QuadratureConfig,
    RationalQD,
    affine_pullback,
    annulus_log_mass,
    annulus_modulus,
    mass_fraction_profile,
    mass_on_region,
    plane_mass_partition,
)
from qdlab.quadrature import shell_masses
from qdlab.regions import Annulus, Complement, Disk, Intersection, Plane

from conftest import random_integrable

LOG = RationalQD.from_points(1, [], [0, 0])  # dz^2/z^2
CUBIC = RationalQD.from_points(1, [], [0, 1, -1])  # dz^2/(z(z-1)(z+1))
# independent scipy oracle (scripts/oracles.py)
CUBIC_PLANE_MASS = 13.750371636


def test_log_annulus_examples():
    assert mass_on_region(LOG, Annulus(0, 1, 3)).value == pytest.approx(2 * math.pi * math.log(3), rel=1e-4)
    assert mass_on_region(LOG, Annulus(0, 1, math.e)).value == pytest.approx(2 * math.pi, rel=1e-4)


@given(st.floats(0.01, 10), st.floats(1.01, 1e3))
def test_log_annulus_closed_form(r, ratio):
    res = mass_on_region(LOG, Annulus(0, r, r * ratio))
    assert res.value == pytest.approx(annulus_log_mass(r, r * ratio), rel=1e-4)
    assert res.error_estimate >= 0


def test_plane_mass_against_oracle_and_partition():
    cfg = QuadratureConfig(rel_tol=1e-7)
    a = mass_on_region(CUBIC, Plane(), cfg)
    b = plane_mass_partition(CUBIC, cfg)
    assert a.value == pytest.approx(CUBIC_PLANE_MASS, rel=1e-6)
    assert b.value == pytest.approx(CUBIC_PLANE_MASS, rel=1e-6)
    d = mass_on_region(CUBIC, Plane())
    p = plane_mass_partition(CUBIC)
    assert abs(d.value - p.value) <= 2e-4 * d.value


def test_closed_form_helpers():
    assert annulus_log_mass(1, 3) == 2 * math.pi * math.log(3)
    assert annulus_log_mass(2.5, 2.5 * math.e) == pytest.approx(2 * math.pi, rel=1e-15)
    for n in (1, 2, 3):
        assert annulus_modulus(math.exp(-2 * math.pi * n), 1) == pytest.approx(n)
    for n in (3, 4):
        assert annulus_modulus(math.exp(-2 * math.pi * n * (n - 1)), math.exp(-2 * math.pi * n)) == pytest.approx(
            n * (n - 2), abs=1e-12
        )
    assert annulus_modulus(1, math.exp(2 * math.pi)) == pytest.approx(1.0)
    for r, R in [(2, 2), (3, 1), (0, 1), (-1, 1)]:
        with pytest.raises(BadRadii):
            annulus_log_mass(r, R)
        with pytest.raises(BadRadii):
            annulus_modulus(r, R)


def test_non_integrable_inputs():
    with pytest.raises(NonIntegrable):
        mass_on_region(LOG, Disk(0, 1))
    with pytest.raises(NonIntegrable):
        mass_on_region(RationalQD.from_points(1, [], [0]), Plane())  # too slow at infinity
    # a double pole outside the region is fine
    assert mass_on_region(LOG, Disk(5, 1)).value > 0


def test_additivity_and_monotonicity(rng):
    q = random_integrable(rng, 5)
    inner = mass_on_region(q, Disk(0.3, 1.5))
    outer = mass_on_region(q, Complement(Disk(0.3, 1.5)))
    whole = mass_on_region(q, Plane())
    tol = inner.error_estimate + outer.error_estimate + whole.error_estimate
    assert abs(inner.value + outer.value - whole.value) <= tol + 1e-12
    assert inner.value <= whole.value + tol


def _inverted(q: RationalQD) -> RationalQD:
    """q(1/w) / w^4 as a rational differential in w (no zeros or poles of q at 0)."""
    zs = [z for z, m in q.zeros for _ in range(m)]
    ps = [p for p, m in q.poles for _ in range(m)]
    lead = q.leading * np.prod([-z for z in zs]) / np.prod([-p for p in ps])
    k = len(ps) - len(zs) - 4
    zeros = [1 / z for z in zs] + [0] * max(k, 0)
    poles = [1 / p for p in ps] + [0] * max(-k, 0)
    return RationalQD.from_points(lead, zeros, poles)


def test_inverted_differential_matches_density(rng):
    q = random_integrable(rng, 5)
    w = np.array([0.3 + 0.1j, -0.2j, 0.05 - 0.04j])
    assert np.allclose(_inverted(q)(w), q(1 / w) / w**4, rtol=1e-12)


@pytest.mark.parametrize("seed", range(3))
def test_chart_consistency(seed):
    q = random_integrable(np.random.default_rng(seed), 5)
    R = 1.7
    direct = mass_on_region(q, Complement(Disk(0, R))).value
    chart = mass_on_region(_inverted(q), Disk(0, 1 / R)).value
    assert direct == pytest.approx(chart, rel=2e-4)


@pytest.mark.parametrize("seed", range(3))
def test_scale_equivariance(seed):
    rng = np.random.default_rng(seed)
    q = random_integrable(rng, 4)
    a = complex(*rng.uniform(0.3, 3, 2))
    base = mass_on_region(q, Plane()).value
    moved = mass_on_region(affine_pullback(q, AffineMap(a, 0.7j)), Plane()).value
    assert moved == pytest.approx(base, rel=2e-4)


def test_intersection_region():
    # upper half of A(1, 3) for dz^2/z^2 carries half the mass
    half = Intersection(Annulus(0, 1, 3), Disk(2j, 2.0))
    full = mass_on_region(LOG, Annulus(0, 1, 3)).value
    part = mass_on_region(LOG, half).value
    assert 0 < part < full


def test_shell_masses_partition():
    shells, err = shell_masses(LOG, 0, [2, 4, 8], r_inner=1)
    assert shells == pytest.approx([2 * math.pi * math.log(2)] * 3, rel=1e-4)
    with pytest.raises(ValueError):
        shell_masses(LOG, 0, [2, 2])


def test_mass_fraction_profile_monotone():
    fr = mass_fraction_profile(CUBIC, 0, [0.5, 1.0, 2.0, 10.0, 1e4])
    assert all(b >= a for a, b in zip(fr, fr[1:]))
    assert all(0 <= f <= 1 + 2e-4 for f in fr)
    assert fr[-1] == pytest.approx(1.0, abs=1e-3)
    with pytest.raises(ValueError):
        mass_fraction_profile(CUBIC, 0, [1.0, 1.0])


def test_determinism():
    a = mass_on_region(CUBIC, Plane())
    b = mass_on_region(CUBIC, Plane())
    assert a == b
