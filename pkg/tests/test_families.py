import csv
import io
import math

import numpy as np
import pytest

from qdlab import (
    PoleCollision,
    QuadratureConfig,
    RationalQD,
    annulus_modulus,
    detect_cos_symmetric_pairs,
    efficiency_ratio,
    mass_on_region,
)
from qdlab.families import (
    SWEEP_HEADER,
    Example41Params,
    Example42Params,
    Family,
    control_family,
    efficiency_sweep,
    example41_build,
    example42_build,
    geometric_family,
    normalize_mass,
    polygon_family,
    sweep_to_csv,
)
from qdlab.regions import Disk, Plane

# regression snapshots for the a = 2^-n, b = 3a schedule, n = 1..8
GEOMETRIC_RATIOS = [0.7235812, 0.8972074, 0.9575899, 0.9863518, 0.9959476, 0.9988357, 0.9996710, 0.9999075]


@pytest.mark.parametrize("a,b", [(0.5, 1.5), (0.1, 0.3), (0.02, 2.5)])
def test_example42_structure(a, b):
    q = example42_build(Example42Params(a, b))
    assert q.is_sphere_integrable and q.degree_at_infinity == -1
    pairs = detect_cos_symmetric_pairs(q.pole_points, 1e-9)
    assert len(pairs) == 2 and all(k == 0 for k, _ in pairs)
    assert sorted(abs(z0) for _, z0 in pairs) == pytest.approx([a, b])
    assert mass_on_region(q, Plane()).value == pytest.approx(4.0, rel=1e-4)
    assert np.allclose(sorted(q.zero_points, key=lambda z: z.imag), [-1j, 1j])


def test_example42_symmetric_poles():
    q = example42_build(Example42Params(0.2, 0.7))
    sym = sorted((p for p in q.pole_points if abs(p - 1) > 1e-12), key=lambda z: z.real)
    assert np.allclose(sym, sorted((-p for p in sym), key=lambda z: z.real))


@pytest.mark.parametrize("a,b", [(0.5, 0.5), (0.5, 1.0), (1.0, 2.0)])
def test_example42_collisions(a, b):
    with pytest.raises(PoleCollision):
        Example42Params(a, b)


def test_example42_invalid():
    with pytest.raises(ValueError):
        Example42Params(0.5, 0.2)
    with pytest.raises(ValueError):
        Example42Params(0.5, 1.5, p_coeffs=(1, 0, 0))


def test_normalization_idempotent():
    q = example42_build(Example42Params(0.25, 0.75))
    again = normalize_mass(q, 4.0)
    assert abs(again.leading / q.leading) == pytest.approx(1.0, rel=1e-4)


def test_example41_moduli():
    p2, p3 = Example41Params(2), Example41Params(3)
    assert annulus_modulus(p2.R3, 1) == pytest.approx(2)
    assert annulus_modulus(p3.R2, p3.R3) == pytest.approx(3)
    assert (p3.log_R1 - p3.log_R2) / (-2 * math.pi) == pytest.approx(3)
    assert p2.R1 < p2.R2 <= p2.R3 < 1
    with pytest.raises(ValueError):
        Example41Params(1)


def test_example41_member():
    q = example41_build(Example41Params(2))
    poles = sum(m for _, m in q.poles) + (-q.order_at_infinity if q.order_at_infinity < 0 else 0)
    assert poles == 6 and sum(m for _, m in q.zeros) == 2
    assert q.is_sphere_integrable
    assert mass_on_region(q, Plane()).value == pytest.approx(4.0, rel=1e-4)


def test_example41_unresolvable_cluster():
    with pytest.raises(PoleCollision):
        example41_build(Example41Params(3))


def test_single_index_sweep_matches_ratio():
    fam = geometric_family()
    row = efficiency_sweep(fam, [2])[0]
    assert row.ok
    assert row.ratio == efficiency_ratio(fam.build(2))


def test_geometric_sweep_snapshot():
    rows = efficiency_sweep(geometric_family(), range(8, 0, -1))
    assert [r.index for r in rows] == list(range(1, 9))
    ratios = [r.ratio for r in rows]
    assert ratios == pytest.approx(GEOMETRIC_RATIOS, abs=5e-6)
    # below 1 by more than the error bar, even where the ratio is 1 - 1e-4
    assert all(0 < r.ratio < 1 - r.error_estimate for r in rows)
    fr = [r.concentration_fraction for r in rows]
    assert all(b >= a for a, b in zip(fr, fr[1:]))


def test_control_family_stays_away_from_one():
    rows = efficiency_sweep(control_family(), [1, 4, 8])
    assert all(r.ratio < 0.8 for r in rows)
    assert len({r.ratio for r in rows}) == 1


def test_sweep_records_member_failures():
    rows = efficiency_sweep(polygon_family(), [2, 3])
    assert rows[0].ok and rows[0].ratio < 1
    assert not rows[1].ok and "PoleCollision" in rows[1].error


def test_csv_output():
    bad = Family("bad", lambda n: RationalQD.from_points(1, [], [0, 0]))
    rows = efficiency_sweep(geometric_family(), [1]) + efficiency_sweep(bad, [2])
    text = sweep_to_csv(rows)
    parsed = list(csv.reader(io.StringIO(text)))
    assert tuple(parsed[0]) == SWEEP_HEADER
    assert parsed[1][0] == "1" and float(parsed[1][3]) == pytest.approx(GEOMETRIC_RATIOS[0], abs=1e-6)
    assert parsed[2] == ["2", "nan", "nan", "nan", "nan", "nan"]


def test_concentration_disk():
    fam = geometric_family()
    assert fam.disk(3) == Disk(0, 10 / 8)
