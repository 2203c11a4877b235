"""Rational quadratic differentials q(z) dz^2 on the Riemann sphere.

A differential is stored by its divisor: a leading coefficient plus finite
zeros and poles with explicit multiplicities. Everything is immutable;
transport under affine maps acts on the divisor, so no root finding is
ever needed to move a differential around.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import EvalAtPole, PoleCollision

__all__ = [
    "IDENTITY_TOL",
    "AffineMap",
    "RationalQD",
    "eval_density",
    "degree_at_infinity",
    "affine_pullback",
    "affine_pushforward",
    "detect_cos_symmetric_pairs",
]

# absolute tolerance below which two divisor points are treated as equal
IDENTITY_TOL = 1e-12


def _merge(points: Iterable[tuple[complex, int]], tol: float) -> tuple[tuple[complex, int], ...]:
    merged: list[list] = []
    for z, m in points:
        z = complex(z)
        m = int(m)
        if m <= 0:
            raise ValueError(f"multiplicity must be positive, got {m}")
        for entry in merged:
            if abs(entry[0] - z) <= tol:
                entry[1] += m
                break
        else:
            merged.append([z, m])
    return tuple((z, m) for z, m in merged)


@dataclass(frozen=True)
class AffineMap:
    """The map z -> a*z + b."""

    a: complex
    b: complex = 0j

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))
        if self.a == 0:
            raise ValueError("affine map needs a != 0")

    def __call__(self, z):
        return self.a * z + self.b

    def compose(self, other: "AffineMap") -> "AffineMap":
        """Return self o other."""
        return AffineMap(self.a * other.a, self.a * other.b + self.b)

    __matmul__ = compose

    def inverse(self) -> "AffineMap":
        return AffineMap(1 / self.a, -self.b / self.a)

    @classmethod
    def identity(cls) -> "AffineMap":
        return cls(1, 0)


@dataclass(frozen=True)
class RationalQD:
    """q(z) dz^2 = leading * prod (z - z_i)^m_i / prod (z - p_j)^n_j dz^2."""

    leading: complex
    zeros: tuple[tuple[complex, int], ...] = ()
    poles: tuple[tuple[complex, int], ...] = ()

    def __post_init__(self):
        leading = complex(self.leading)
        if leading == 0 or not np.isfinite(leading):
            raise ValueError("leading coefficient must be finite and nonzero")
        zeros = _merge(self.zeros, IDENTITY_TOL)
        poles = _merge(self.poles, IDENTITY_TOL)
        for z, _ in zeros:
            for p, _ in poles:
                if abs(z - p) <= IDENTITY_TOL:
                    raise PoleCollision(f"zero and pole coincide at {z}")
        object.__setattr__(self, "leading", leading)
        object.__setattr__(self, "zeros", zeros)
        object.__setattr__(self, "poles", poles)

    @classmethod
    def from_points(cls, leading, zeros: Sequence[complex] = (), poles: Sequence[complex] = ()):
        """Build from plain point lists, each point counted once."""
        return cls(leading, tuple((z, 1) for z in zeros), tuple((p, 1) for p in poles))

    # --- divisor data -------------------------------------------------

    @property
    def pole_points(self) -> np.ndarray:
        return np.array([p for p, _ in self.poles], dtype=complex)

    @property
    def zero_points(self) -> np.ndarray:
        return np.array([z for z, _ in self.zeros], dtype=complex)

    @property
    def finite_poles(self) -> tuple[tuple[complex, int], ...]:
        return self.poles

    @property
    def degree_at_infinity(self) -> int:
        nz = sum(m for _, m in self.zeros)
        npl = sum(n for _, n in self.poles)
        return npl - nz - 4

    @property
    def order_at_infinity(self) -> int:
        return self.degree_at_infinity

    @property
    def is_sphere_integrable(self) -> bool:
        return all(n == 1 for _, n in self.poles) and self.degree_at_infinity >= -1

    def scaled(self, c: complex) -> "RationalQD":
        return RationalQD(self.leading * c, self.zeros, self.poles)

    # --- evaluation ---------------------------------------------------

    def local(self, zeta, center: complex = 0j) -> np.ndarray:
        """q(center + zeta), with divisor offsets taken relative to ``center``.

        Differences to nearby poles are formed from exact offsets, which keeps
        full relative accuracy inside tight pole clusters.
        """
        zeta = np.asarray(zeta, dtype=complex)
        out = np.full(zeta.shape, self.leading, dtype=complex)
        for z, m in self.zeros:
            out *= (zeta - (z - center)) ** m
        for p, n in self.poles:
            out /= (zeta - (p - center)) ** n
        return out

    def __call__(self, z) -> np.ndarray:
        return self.local(z, 0j)

    def chart(self, omega, center: complex = 0j) -> np.ndarray:
        """Density in the chart at infinity: q(center + 1/omega) / omega**4."""
        omega = np.asarray(omega, dtype=complex)
        out = np.full(omega.shape, self.leading, dtype=complex)
        for z, m in self.zeros:
            out *= (1 - (z - center) * omega) ** m
        for p, n in self.poles:
            out /= (1 - (p - center) * omega) ** n
        return out * omega ** self.degree_at_infinity

    def residues(self) -> np.ndarray:
        """Residues of q(z) at its finite poles (all poles must be simple)."""
        if any(n != 1 for _, n in self.poles):
            raise ValueError("residues need simple poles")
        pts = self.pole_points
        res = np.empty(len(pts), dtype=complex)
        for j, p in enumerate(pts):
            val = self.leading
            for z, m in self.zeros:
                val *= (p - z) ** m
            for l, r in enumerate(pts):
                if l != j:
                    val /= p - r
            res[j] = val
        return res

    # --- serialization ------------------------------------------------

    def to_json(self) -> dict:
        def pts(items):
            return [{"z": [z.real, z.imag], "mult": m} for z, m in items]

        return {
            "leading": [self.leading.real, self.leading.imag],
            "zeros": pts(self.zeros),
            "poles": pts(self.poles),
        }

    @classmethod
    def from_json(cls, data: dict) -> "RationalQD":
        def cplx(v):
            if isinstance(v, (list, tuple)):
                return complex(v[0], v[1] if len(v) > 1 else 0.0)
            return complex(v)

        def pts(items):
            return tuple((cplx(e["z"]), int(e.get("mult", 1))) for e in items)

        return cls(cplx(data["leading"]), pts(data.get("zeros", [])), pts(data.get("poles", [])))


def eval_density(q: RationalQD, z: complex) -> complex:
    z = complex(z)
    for p, _ in q.poles:
        if z == p:
            raise EvalAtPole(f"{z} is a pole")
    return complex(q.local(np.array(z)))


def degree_at_infinity(q: RationalQD) -> int:
    return q.degree_at_infinity


def affine_pullback(q: RationalQD, M: AffineMap) -> RationalQD:
    """(M^* q)(z) = a^2 q(a z + b)."""
    inv = M.inverse()
    nz = sum(m for _, m in q.zeros)
    npl = sum(n for _, n in q.poles)
    leading = q.leading * M.a ** (2 + nz - npl)
    zeros = tuple((inv(z), m) for z, m in q.zeros)
    poles = tuple((inv(p), n) for p, n in q.poles)
    return RationalQD(leading, zeros, poles)


def affine_pushforward(q: RationalQD, M: AffineMap) -> RationalQD:
    return affine_pullback(q, M.inverse())


def detect_cos_symmetric_pairs(poles: Sequence[complex], tol: float = 1e-9) -> list[tuple[int, complex]]:
    """Pairs of poles placed symmetrically about a critical point k*pi of cosine.

    Each pole is used at most once; candidate pairs are taken greedily by
    increasing mismatch, ties broken by list order.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    pts = [complex(p) for p in poles]
    candidates = []
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            s = pts[i] + pts[j]
            k = round(s.real / (2 * math.pi))
            gap = abs(s - 2 * k * math.pi)
            z0 = pts[i] - k * math.pi
            if gap < tol and abs(z0) > tol:
                candidates.append((gap, i, j, k, z0))
    candidates.sort(key=lambda c: (c[0], c[1], c[2]))
    used: set[int] = set()
    pairs = []
    for gap, i, j, k, z0 in candidates:
        if i in used or j in used:
            continue
        used.update((i, j))
        pairs.append((i, k, z0))
    pairs.sort()
    return [(k, z0) for _, k, z0 in pairs]
