"""Thick and thin limit models, the S_n maps, concentration annuli and the mass condition."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy.cluster.hierarchy import linkage

from .errors import BadRadii, DegenerateAtCritical, Inconclusive, NonIntegrable, TooFewPoles
from .qd_core import IDENTITY_TOL, AffineMap, RationalQD, affine_pullback
from .quadrature import QuadratureConfig, integrate_density, mass_on_region, shell_masses
from .regions import Disk, Plane

__all__ = [
    "ThickScaling",
    "ThinModel",
    "ConcentrationResult",
    "MassConditionResult",
    "detect_thick_scaling",
    "DifferenceDensity",
    "limit_model_distance",
    "thick_sequence",
    "hat_scaling",
    "s_n_eval",
    "s_n_sup_deviation",
    "thin_image_annulus",
    "choose_inner_radius",
    "find_concentration_annulus",
    "mass_condition_check",
    "modulus_bound",
]


@dataclass(frozen=True)
class ThickScaling:
    M: AffineMap

    @property
    def a(self) -> complex:
        return self.M.a

    @property
    def b(self) -> complex:
        return self.M.b


@dataclass(frozen=True)
class ThinModel:
    center: complex
    r: float
    R: float
    c: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        object.__setattr__(self, "c", complex(self.c))
        if not 0 < self.r < self.R:
            raise BadRadii(f"thin model needs 0 < r < R, got r={self.r}, R={self.R}")

    @property
    def modulus(self) -> float:
        return math.log(self.R / self.r) / (2 * math.pi)


@dataclass(frozen=True)
class ConcentrationResult:
    center: complex
    inner_radius: float
    outer_radius: float
    modulus: float
    poles_inside: tuple[complex, ...]


@dataclass(frozen=True)
class MassConditionResult:
    holds: bool
    witness: Optional[tuple[int, int]]
    margin: float

    def __bool__(self) -> bool:
        return self.holds


def _anchored_mean(pts: np.ndarray) -> complex:
    return complex(pts[0] + np.mean(pts - pts[0]))


# ---------------------------------------------------------------------------
# thick case


def detect_thick_scaling(q: RationalQD) -> ThickScaling:
    """M(z) = a z + b from the tightest pair of finite poles.

    b is the lexicographically smaller pole of the pair (both are equally
    near the pair centroid) and a = neighbour - b, so M(0) and M(1) are the
    two poles.
    """
    pts = [complex(p) for p in q.pole_points]
    if len(pts) < 2:
        raise TooFewPoles("scaling detection needs at least two finite poles")
    best = None
    for i in range(len(pts)):
        for j in range(i + 1, len(pts)):
            lo, hi = sorted((pts[i], pts[j]), key=lambda z: (z.real, z.imag))
            key = (abs(pts[i] - pts[j]), lo.real, lo.imag, hi.real, hi.imag)
            if best is None or key < best[0]:
                best = (key, lo, hi)
    _, b, nb = best
    return ThickScaling(AffineMap(nb - b, b))


class DifferenceDensity:
    """Pointwise difference of two rational densities."""

    def __init__(self, f: RationalQD, g: RationalQD):
        self.f, self.g = f, g
        merged: list[tuple[complex, int]] = []
        for p, n in f.poles + g.poles:
            for k, (u, m) in enumerate(merged):
                if abs(u - p) <= IDENTITY_TOL:
                    merged[k] = (u, max(m, n))
                    break
            else:
                merged.append((p, n))
        self.finite_poles = tuple(merged)
        self.order_at_infinity = min(f.order_at_infinity, g.order_at_infinity)

    def local(self, zeta, center=0j):
        return self.f.local(zeta, center) - self.g.local(zeta, center)

    def chart(self, omega, center=0j):
        return self.f.chart(omega, center) - self.g.chart(omega, center)


def limit_model_distance(q_n: RationalQD, M: AffineMap, q_model: RationalQD,
                         cfg: QuadratureConfig | None = None) -> float:
    """||M^* q_n - q_model|| over the plane."""
    cfg = cfg or QuadratureConfig()
    pulled = affine_pullback(q_n, M)
    for q in (pulled, q_model):
        if not q.is_sphere_integrable:
            raise NonIntegrable("limit-model distance needs sphere-integrable differentials")
    # cancellation noise is absolute, so the floor follows the masses
    scale = mass_on_region(pulled, Plane(), cfg).value + mass_on_region(q_model, Plane(), cfg).value
    cfg = replace(cfg, abs_floor=max(cfg.abs_floor, 1e-9 * scale))
    return integrate_density(DifferenceDensity(pulled, q_model), Plane(), cfg).value


def thick_sequence(n: int, kappa: complex = 1.0, t: float = 256.0) -> tuple[RationalQD, RationalQD]:
    """(q_n, q_model) with M_n(z) = 2^-n z + 1 and M_n^* q_n -> q_model.

    q_model = kappa dz^2 / (z (z - 1) (z - 3)); q_n adds a zero at 1 - t and a
    pole at 1 + t, so M_n^* q_n = q_model (t + e z) / (t - e z) with e = 2^-n.
    """
    e = 2.0 ** (-n)
    q_model = RationalQD.from_points(kappa, [], [0, 1, 3])
    q_n = RationalQD.from_points(-kappa * e, [1 - t], [1, 1 + e, 1 + 3 * e, 1 + t])
    return q_n, q_model


# ---------------------------------------------------------------------------
# scalings near a non-critical base point


def _check_noncritical(b: complex) -> None:
    b = complex(b)
    k = round(b.real / math.pi)
    if abs(b - k * math.pi) <= IDENTITY_TOL:
        raise DegenerateAtCritical(f"b = {b} is a critical point of cosine")


def hat_scaling(a: complex, b: complex) -> AffineMap:
    """z -> -a sin(b) z + cos(b), the linearisation of cos(a z + b) at 0."""
    _check_noncritical(b)
    b = complex(b)
    return AffineMap(-complex(a) * np.sin(b), np.cos(b))


def s_n_eval(a: complex, b: complex, z) -> np.ndarray | complex:
    """(cos(a z + b) - cos b) / (-a sin b), evaluated without cancellation."""
    _check_noncritical(b)
    a, b = complex(a), complex(b)
    if a == 0:
        raise ValueError("a must be nonzero")
    z = np.asarray(z, dtype=complex)
    half = a * z / 2
    out = 2 * np.sin(b + half) * np.sin(half) / (a * np.sin(b))
    return complex(out) if out.ndim == 0 else out


def s_n_sup_deviation(a: complex, b: complex, R: float, samples: int = 1024) -> float:
    """max |S(z) - z| over |z| = R."""
    z = R * np.exp(2j * np.pi * np.arange(samples) / samples)
    return float(np.max(np.abs(s_n_eval(a, b, z) - z)))


def thin_image_annulus(r: float, R_star: float, b: complex) -> ThinModel:
    _check_noncritical(b)
    if not 0 < r < R_star:
        raise BadRadii(f"need 0 < r < R*, got r={r}, R*={R_star}")
    s = abs(np.sin(complex(b)))
    return ThinModel(complex(np.cos(complex(b))), s * r, s * R_star)


def choose_inner_radius(q: RationalQD, model: ThinModel, delta: float, cfg: QuadratureConfig | None = None,
                        per_decade: int = 64) -> float:
    """Smallest grid radius R* with mass(A(r, R*)) >= (1 - delta) mass(A(r, R))."""
    if not 0 < delta <= 1:
        raise ValueError("delta must lie in (0, 1]")
    r, R = model.r, model.R
    n = max(1, math.ceil(per_decade * math.log10(R / r)))
    grid = r * (R / r) ** (np.arange(1, n + 1) / n)
    grid[-1] = R
    shells, _ = shell_masses(q, model.center, grid, cfg, r_inner=r)
    cum = np.cumsum(shells)
    need = (1 - delta) * cum[-1]
    idx = int(np.argmax(cum >= need * (1 - 1e-12)))
    return float(grid[idx])


def find_concentration_annulus(q: RationalQD, M_required: float,
                               outer_limit: float = 1e6) -> Optional[ConcentrationResult]:
    """First single-linkage pole cluster surrounded by a pole-free annulus of modulus >= M_required.

    Clusters are visited in merge order. The inner radius is 1.5 times the
    cluster radius; the outer radius stops at the nearest other pole, or at
    ``outer_limit`` (the boundary of the chart at infinity) if none remain.
    """
    if not M_required > 0:
        raise ValueError("M_required must be positive")
    pts = q.pole_points
    if len(pts) < 2:
        raise TooFewPoles("concentration search needs at least two finite poles")
    Z = linkage(np.stack([pts.real, pts.imag], 1), method="single")
    members: dict[int, list[int]] = {i: [i] for i in range(len(pts))}
    for step, (i, j, _, _) in enumerate(Z):
        idx = members[int(i)] + members[int(j)]
        members[len(pts) + step] = idx
        inside = pts[sorted(idx)]
        center = _anchored_mean(inside)
        inner = 1.5 * float(np.max(np.abs(inside - center)))
        rest = np.delete(pts, idx)
        outer = float(np.min(np.abs(rest - center))) if len(rest) else outer_limit
        if inner <= 0 or outer <= inner:
            continue
        modulus = math.log(outer / inner) / (2 * math.pi)
        if modulus >= M_required:
            return ConcentrationResult(center, inner, outer, modulus, tuple(complex(p) for p in inside))
    return None


# ---------------------------------------------------------------------------
# mass condition


def _winding(poly: np.ndarray, w: complex) -> float:
    d = poly - w
    turn = np.angle(np.roll(d, -1) / d)
    return float(np.sum(turn) / (2 * math.pi))


def _dist_to_polygon(poly: np.ndarray, w: complex) -> float:
    a = poly
    b = np.roll(poly, -1)
    ab = b - a
    t = np.clip(((w - a) * np.conj(ab)).real / np.maximum(np.abs(ab) ** 2, 1e-300), 0, 1)
    return float(np.min(np.abs(a + t * ab - w)))


def mass_condition_check(D: Disk, lambdas: Sequence[complex], k_window: Optional[int] = None,
                         samples: int = 1024, refinements: int = 2) -> MassConditionResult:
    """Certify k pi not in C_{lam_s} o ... o C_{lam_1}(D) for every k and 0 <= s <= m.

    Stage images are tracked through their boundary curves. For a point w
    farther than the sampling margin from the sampled boundary polygon, the
    polygon's winding number about w counts the preimages of w in D. The
    margin is L r dtheta, with L a product of |lam_i| cosh(|Im|) bounds over
    the boxes enclosing the earlier images. Points inside the margin trigger
    a 4x refinement; if that never resolves them, Inconclusive is raised.
    """
    lambdas = [complex(l) for l in lambdas]
    if any(l == 0 for l in lambdas):
        raise ValueError("lambdas must be nonzero")
    c, r = D.center, D.radius

    # stage 0 is exact
    k0, k1 = math.floor((c.real - r) / math.pi), math.ceil((c.real + r) / math.pi)
    for k in range(k0, k1 + 1):
        if abs(k * math.pi - c) <= r:
            return MassConditionResult(False, (0, k), 0.0)

    n = samples
    for attempt in range(refinements + 1):
        theta = 2 * np.pi * np.arange(n) / n
        curve = c + r * np.exp(1j * theta)
        L = 1.0
        box_y = abs(c.imag) + r
        margin = 0.0
        ambiguous = False
        for s, lam in enumerate(lambdas, start=1):
            L *= abs(lam) * math.cosh(box_y)
            with np.errstate(over="ignore", invalid="ignore"):
                curve = lam * np.cos(curve)
            margin = L * r * (2 * math.pi / n)
            if not np.all(np.isfinite(curve)) or not math.isfinite(margin):
                raise Inconclusive(f"stage {s} image overflows double precision")
            box_y = float(np.max(np.abs(curve.imag))) + margin
            reach = float(np.max(np.abs(curve.real))) + margin
            kw = k_window if k_window is not None else math.ceil(reach / math.pi) + 1
            for k in range(-kw, kw + 1):
                w = k * math.pi
                if abs(w) > reach:
                    continue
                if _dist_to_polygon(curve, w) <= margin:
                    ambiguous = True
                    continue
                if abs(_winding(curve, w)) >= 0.5:
                    return MassConditionResult(False, (s, k), margin)
        if not ambiguous:
            return MassConditionResult(True, None, margin)
        n *= 4
    raise Inconclusive("a critical point stays within the sampling margin of an image boundary")


def modulus_bound(k: int, d0: float) -> float:
    """pi / ln(3 + 2 sqrt 2) * k * e^(k d0)."""
    if int(k) != k or k < 1:
        raise ValueError("k must be a positive integer")
    if d0 < 0:
        raise ValueError("d0 must be nonnegative")
    return math.pi / math.log(3 + 2 * math.sqrt(2)) * k * math.exp(k * d0)
