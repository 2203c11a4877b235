"""Measurable plane regions over which masses are integrated.

Membership is closed: points on a boundary circle or edge belong to the
region, up to a small relative tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import BadRadii

__all__ = [
    "Region",
    "Disk",
    "Annulus",
    "Plane",
    "Complement",
    "Intersection",
    "HalfStrip",
    "region_from_json",
]

_EDGE = 1e-12


def _pt(v) -> complex:
    if isinstance(v, (list, tuple)):
        return complex(v[0], v[1] if len(v) > 1 else 0.0)
    return complex(v)


class Region:
    bounded: bool = True

    def contains(self, z) -> np.ndarray:
        raise NotImplementedError

    def bbox(self) -> tuple[float, float, float, float]:
        """(xmin, xmax, ymin, ymax); only defined for bounded regions."""
        raise ValueError(f"{type(self).__name__} is unbounded")

    def to_json(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class Disk(Region):
    center: complex
    radius: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not self.radius > 0:
            raise BadRadii(f"disk radius must be positive, got {self.radius}")

    def contains(self, z):
        d = np.abs(np.asarray(z) - self.center)
        return d <= self.radius * (1 + _EDGE)

    def bbox(self):
        c, r = self.center, self.radius
        return (c.real - r, c.real + r, c.imag - r, c.imag + r)

    def to_json(self):
        return {"type": "disk", "center": [self.center.real, self.center.imag], "radius": self.radius}


@dataclass(frozen=True)
class Annulus(Region):
    center: complex
    r: float
    R: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if not (0 <= self.r < self.R):
            raise BadRadii(f"annulus needs 0 <= r < R, got r={self.r}, R={self.R}")

    def contains(self, z):
        d = np.abs(np.asarray(z) - self.center)
        return (d >= self.r * (1 - _EDGE)) & (d <= self.R * (1 + _EDGE))

    def bbox(self):
        c, R = self.center, self.R
        return (c.real - R, c.real + R, c.imag - R, c.imag + R)

    @property
    def modulus(self) -> float:
        return math.log(self.R / self.r) / (2 * math.pi)

    def to_json(self):
        return {"type": "annulus", "center": [self.center.real, self.center.imag], "r": self.r, "R": self.R}


@dataclass(frozen=True)
class Plane(Region):
    bounded = False

    def contains(self, z):
        return np.ones(np.shape(z), dtype=bool)

    def to_json(self):
        return {"type": "plane"}


@dataclass(frozen=True)
class Complement(Region):
    inner: Region

    @property
    def bounded(self):  # type: ignore[override]
        if isinstance(self.inner, Plane):
            return True
        if isinstance(self.inner, Complement):
            return self.inner.inner.bounded
        return False

    def contains(self, z):
        inner = self.inner
        # closed boundary on both sides
        if isinstance(inner, Disk):
            return np.abs(np.asarray(z) - inner.center) >= inner.radius * (1 - _EDGE)
        if isinstance(inner, Annulus):
            d = np.abs(np.asarray(z) - inner.center)
            return (d <= inner.r * (1 + _EDGE)) | (d >= inner.R * (1 - _EDGE))
        return ~inner.contains(z)

    def bbox(self):
        if isinstance(self.inner, Complement):
            return self.inner.inner.bbox()
        if isinstance(self.inner, Plane):
            return (0.0, 0.0, 0.0, 0.0)
        return super().bbox()

    def to_json(self):
        return {"type": "complement", "region": self.inner.to_json()}


@dataclass(frozen=True)
class Intersection(Region):
    a: Region
    b: Region

    @property
    def bounded(self):  # type: ignore[override]
        return self.a.bounded or self.b.bounded

    def contains(self, z):
        return self.a.contains(z) & self.b.contains(z)

    def bbox(self):
        boxes = [r.bbox() for r in (self.a, self.b) if r.bounded]
        if not boxes:
            return super().bbox()
        return (
            max(b[0] for b in boxes),
            min(b[1] for b in boxes),
            max(b[2] for b in boxes),
            min(b[3] for b in boxes),
        )

    def to_json(self):
        return {"type": "intersection", "a": self.a.to_json(), "b": self.b.to_json()}


@dataclass(frozen=True)
class HalfStrip(Region):
    """0 <= Re z <= pi, |Im z| <= Y."""

    Y: float

    def __post_init__(self):
        if not self.Y > 0:
            raise BadRadii("strip height must be positive")

    def contains(self, z):
        z = np.asarray(z)
        tol = _EDGE * math.pi
        return (z.real >= -tol) & (z.real <= math.pi + tol) & (np.abs(z.imag) <= self.Y * (1 + _EDGE))

    def bbox(self):
        return (0.0, math.pi, -self.Y, self.Y)

    def to_json(self):
        return {"type": "halfstrip", "Y": self.Y}


def region_from_json(data: dict) -> Region:
    kind = data.get("type")
    if kind == "disk":
        return Disk(_pt(data.get("center", 0)), float(data["radius"]))
    if kind == "annulus":
        return Annulus(_pt(data.get("center", 0)), float(data["r"]), float(data["R"]))
    if kind == "plane":
        return Plane()
    if kind == "complement":
        return Complement(region_from_json(data["region"]))
    if kind == "intersection":
        return Intersection(region_from_json(data["a"]), region_from_json(data["b"]))
    if kind == "halfstrip":
        return HalfStrip(float(data["Y"]))
    raise ValueError(f"unknown region type {kind!r}")
