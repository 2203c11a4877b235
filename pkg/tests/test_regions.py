import math

import numpy as np
import pytest

from qdlab import BadRadii
from qdlab.regions import Annulus, Complement, Disk, HalfStrip, Intersection, Plane, region_from_json


def test_disk_membership_is_closed():
    d = Disk(1j, 2.0)
    assert d.contains(1j + 2.0)
    assert not d.contains(1j + 2.001)
    assert d.bbox() == (-2.0, 2.0, -1.0, 3.0)


def test_annulus_membership_and_modulus():
    a = Annulus(0, 1.0, math.e ** (2 * math.pi))
    z = np.array([0.5, 1.0, 2.0, a.R, a.R * 1.01])
    assert a.contains(z).tolist() == [False, True, True, True, False]
    assert a.modulus == pytest.approx(1.0)


@pytest.mark.parametrize("bad", [lambda: Disk(0, 0.0), lambda: Annulus(0, 2.0, 2.0), lambda: HalfStrip(-1.0)])
def test_degenerate_regions_rejected(bad):
    with pytest.raises(BadRadii):
        bad()


def test_complement_keeps_boundary():
    c = Complement(Disk(0, 1.0))
    assert c.contains(1.0) and c.contains(5.0) and not c.contains(0.5)
    assert not c.bounded
    assert Complement(Plane()).bounded


def test_intersection_bbox_is_overlap():
    r = Intersection(Disk(0, 2.0), Disk(1.0, 2.0))
    assert r.bbox() == (-1.0, 2.0, -2.0, 2.0)
    assert r.contains(0.5) and not r.contains(-1.5)


def test_halfstrip():
    h = HalfStrip(2.0)
    assert h.contains(np.array([0.0, math.pi, 1 + 2j])).all()
    assert not h.contains(-0.1) and not h.contains(1 + 2.1j)


@pytest.mark.parametrize(
    "region",
    [
        Disk(1 + 1j, 0.5),
        Annulus(0, 1.0, 3.0),
        Plane(),
        Complement(Annulus(2j, 1.0, 2.0)),
        Intersection(Disk(0, 1.0), Complement(Disk(0.5, 0.2))),
        HalfStrip(3.0),
    ],
)
def test_json_round_trip(region):
    assert region_from_json(region.to_json()) == region


def test_json_example_shape():
    r = region_from_json({"type": "annulus", "center": [0, 0], "r": 1.0, "R": 3.0})
    assert r == Annulus(0, 1.0, 3.0)
    with pytest.raises(ValueError):
        region_from_json({"type": "hexagon"})
