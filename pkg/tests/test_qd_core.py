import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qdlab import (
    AffineMap,
    EvalAtPole,
    PoleCollision,
    RationalQD,
    affine_pullback,
    affine_pushforward,
    degree_at_infinity,
    detect_cos_symmetric_pairs,
    eval_density,
)

finite = st.floats(-5, 5, allow_nan=False)
nonzero = st.complex_numbers(min_magnitude=0.1, max_magnitude=5, allow_nan=False, allow_infinity=False)
cplx = st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False)


def test_eval_double_pole():
    q = RationalQD(1, (), ((0, 2),))
    assert eval_density(q, 2) == pytest.approx(0.25)


def test_eval_rational_by_hand():
    q = RationalQD.from_points(1, [1j, -1j], [1, -1, 2, -2, 3])
    assert eval_density(q, 0) == pytest.approx(-1 / 12)


def test_eval_at_pole_raises():
    q = RationalQD(1, (), ((0, 2),))
    with pytest.raises(EvalAtPole):
        eval_density(q, 0)


def test_degree_at_infinity_cases():
    assert degree_at_infinity(RationalQD(1, (), ((0, 3),))) == -1
    assert not RationalQD(1, (), ((0, 3),)).is_sphere_integrable
    assert degree_at_infinity(RationalQD(1, (), ((0, 2),))) == -2
    q = RationalQD.from_points(1, [1j, -1j], [0.5, -0.5, 1.5, -1.5, 1])
    assert degree_at_infinity(q) == -1 and q.is_sphere_integrable


def test_duplicates_merge_and_collisions():
    q = RationalQD(1, (), ((1, 1), (1 + 1e-14, 1)))
    assert q.poles == ((1 + 0j, 2),)
    with pytest.raises(PoleCollision):
        RationalQD(1, ((1, 1),), ((1, 1),))
    with pytest.raises(ValueError):
        RationalQD(0, (), ((1, 1),))


def test_pullback_double_pole_invariant():
    q = RationalQD(1, (), ((0, 2),))
    assert affine_pullback(q, AffineMap(2, 0)) == q


def test_pullback_pushforward_examples():
    q = RationalQD.from_points(1, [], [0, 1, -1])
    M = AffineMap(3, 1)
    p = affine_pullback(q, M)
    z = np.array([0.3 + 0.2j, -1.7 + 0.4j])
    assert np.allclose(p(z), 9 * q(3 * z + 1))
    back = affine_pushforward(p, M)
    assert np.allclose(back(z), q(z))


@given(a=nonzero, b=cplx, z=cplx)
def test_pullback_formula(a, b, z):
    q = RationalQD.from_points(1.3 - 0.2j, [0.4j], [0.5, -1, 2j, 1 + 1j])
    M = AffineMap(a, b)
    w = M(z)
    if min(abs(w - p) for p in q.pole_points) < 1e-3:
        return
    lhs = complex(affine_pullback(q, M)(np.array(z)))
    rhs = a**2 * complex(q(np.array(w)))
    assert abs(lhs - rhs) <= 1e-9 * max(1, abs(rhs))


@given(a1=nonzero, b1=cplx, a2=nonzero, b2=cplx, z=cplx)
def test_affine_group_laws(a1, b1, a2, b2, z):
    M, N = AffineMap(a1, b1), AffineMap(a2, b2)
    assert abs((M @ N)(z) - M(N(z))) <= 1e-9 * (1 + abs(M(N(z))))
    assert abs(M.inverse()(M(z)) - z) <= 1e-9 * (1 + abs(z))


def test_affine_zero_scale_rejected():
    with pytest.raises(ValueError):
        AffineMap(0, 1)


def test_local_chart_consistency():
    q = RationalQD.from_points(2, [0.3], [1, -1, 0.5j, 2])
    c = 0.1 + 0.2j
    zeta = np.array([0.7 - 0.1j, 5 + 3j])
    assert np.allclose(q.local(zeta, c), q(c + zeta))
    omega = 1 / zeta
    assert np.allclose(q.chart(omega, c), q(c + zeta) / omega**4)


def test_residues_sum_to_zero_for_cubic_decay():
    q = RationalQD.from_points(1, [0.2], [1, -1, 2j, 3])
    res = q.residues()
    assert abs(res.sum()) < 1e-12
    assert abs((res * q.pole_points).sum()) < 1e-12


def test_json_round_trip():
    q = RationalQD(1 - 2j, ((0.5j, 2),), ((1, 1), (-3, 3)))
    assert RationalQD.from_json(q.to_json()) == q


def test_cos_symmetric_pairs_examples():
    assert detect_cos_symmetric_pairs([math.pi - 0.3, math.pi + 0.3, 2.0]) == [(1, pytest.approx(-0.3))]
    assert detect_cos_symmetric_pairs([0.1, 0.2, 5.0]) == []
    pairs = detect_cos_symmetric_pairs([0.5, -0.5, 1.5, -1.5, 1.0])
    assert [k for k, _ in pairs] == [0, 0]


def test_cos_symmetric_pairs_bad_tol():
    with pytest.raises(ValueError):
        detect_cos_symmetric_pairs([1, -1], tol=0)


@given(k=st.integers(-4, 4), z0=st.complex_numbers(min_magnitude=0.05, max_magnitude=1, allow_nan=False))
def test_cos_symmetric_pair_detected(k, z0):
    pairs = detect_cos_symmetric_pairs([k * math.pi + z0, k * math.pi - z0])
    assert len(pairs) == 1 and pairs[0][0] == k
    assert abs(pairs[0][1] - z0) < 1e-9
