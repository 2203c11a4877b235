"""Push-forwards of quadratic differentials under cosine and low-degree polynomials.

The fibre of w = cos z is {+-z + 2 pi k}, and every point of it has the same
sin^2 = 1 - w^2. Changing variables to the fundamental half-strip
0 <= Re z <= pi therefore gives

    ||cos_* q|| = integral over the strip of |sum_k q(z + 2 pi k) + q(-z + 2 pi k)| dA(z)

with no singular 1/(1 - w^2) weight. For a sphere-integrable q (simple finite
poles, at least cubic decay) the lattice sum has the closed form

    sum_k q(z + 2 pi k) = sum_j (c_j / 2) cot((z - p_j) / 2),

c_j being the residues; it decays like exp(-|Im z|), which gives an explicit
tail bound for cutting the strip at height Y. The w-plane integral of the
push-forward density is kept as an independent cross-check.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional, Sequence, Union

import numpy as np
from numpy.polynomial import Polynomial

from ._cubature import Patch
from .errors import CriticalValue, NonIntegrable, PoleImage, TailTooLarge, ZeroMass
from .qd_core import IDENTITY_TOL, RationalQD
from .quadrature import (
    MassResult,
    QuadratureConfig,
    _run,
    integrate_density,
    mass_on_region,
    tight_cluster_center,
)
from .regions import Plane, Region

__all__ = [
    "CosineMap",
    "TruncationPolicy",
    "Preimages",
    "DensityValue",
    "EfficiencyResult",
    "LatticeSum",
    "cos_preimages",
    "decay_constant",
    "cos_pushforward_density",
    "periodized_pushforward_density",
    "CosPushforwardDensity",
    "strip_tail_bound",
    "cos_pushforward_mass",
    "efficiency",
    "efficiency_ratio",
    "restricted_cos_pushforward_mass",
    "poly_pushforward_density",
    "semiconjugacy_residual",
    "quadratic_model_pushforward",
    "Q2",
    "Q3",
]

TWO_PI = 2 * math.pi
Q2 = Polynomial([-1, 0, 2])
Q3 = Polynomial([0, -3, 0, 4])


@dataclass(frozen=True)
class CosineMap:
    """z -> lam * cos z."""

    lam: complex = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", complex(self.lam))
        if self.lam == 0:
            raise ValueError("lambda must be nonzero")

    def __call__(self, z):
        return self.lam * np.cos(z)

    def pushforward_density(self, q: RationalQD, w):
        """Density of (C_lam)_* q, i.e. cos_* q transported by z -> lam z."""
        return periodized_pushforward_density(q, np.asarray(w) / self.lam) / self.lam**2


@dataclass(frozen=True)
class TruncationPolicy:
    """Truncation of lattice sums and of the strip height.

    ``K`` caps the preimage index of explicit sums; ``Y`` fixes the strip
    height (None picks the smallest height whose analytic tail bound meets
    ``tail_tol``). Strip tails are measured relative to the computed mass,
    so the policy is invariant under rescaling q.
    """

    K: int = 64
    Y: Optional[float] = None
    tail_tol: float = 1e-6

    def __post_init__(self):
        if self.K < 0:
            raise ValueError("K must be nonnegative")
        if self.Y is not None and not self.Y > 0:
            raise ValueError("Y must be positive")
        if not self.tail_tol > 0:
            raise ValueError("tail_tol must be positive")


class Preimages(NamedTuple):
    points: tuple[complex, ...]
    degenerate: bool


class DensityValue(NamedTuple):
    value: complex
    tail_bound: float
    K: int


@dataclass(frozen=True)
class EfficiencyResult:
    mass: MassResult
    pushforward: MassResult

    @property
    def ratio(self) -> float:
        return self.pushforward.value / self.mass.value

    @property
    def error_estimate(self) -> float:
        m, p = self.mass, self.pushforward
        return (p.error_estimate + self.ratio * m.error_estimate) / m.value


# ---------------------------------------------------------------------------
# pointwise push-forward


def cos_preimages(w: complex, K: int) -> Preimages:
    if K < 0:
        raise ValueError("K must be nonnegative")
    w = complex(w)
    a = cmath.acos(w)
    degenerate = abs(w - 1) <= IDENTITY_TOL or abs(w + 1) <= IDENTITY_TOL
    pts: list[complex] = []
    for k in range(-K, K + 1):
        for cand in (TWO_PI * k + a, TWO_PI * k - a):
            if degenerate and any(abs(cand - p) <= 1e-9 for p in pts):
                continue
            pts.append(cand)
    if degenerate:
        pts.sort(key=lambda z: (z.real, z.imag))
    return Preimages(tuple(pts), degenerate)


def decay_constant(q: RationalQD) -> tuple[float, float]:
    """(C, R) with |q(z)| <= C / |z|^3 whenever |z| >= R."""
    if q.degree_at_infinity < -1:
        raise NonIntegrable("density decays slower than |z|^-3")
    scale = max([1.0] + [abs(z) for z, _ in q.zeros] + [abs(p) for p, _ in q.poles])
    R = 2 * scale
    C = abs(q.leading)
    for z, m in q.zeros:
        C *= (1 + abs(z) / R) ** m
    for p, n in q.poles:
        C /= (1 - abs(p) / R) ** n
    nz = sum(m for _, m in q.zeros)
    npl = sum(n for _, n in q.poles)
    return C * R ** (nz - npl + 3), R


def _lattice_tail(C: float, R: float, K: int) -> float:
    # both signs, all |k| > K; preimages satisfy |2 pi k +- a| >= pi (2|k| - 1)
    first = math.pi * (2 * K + 1)
    if first < R:
        return math.inf
    return 4 * C * (first**-3 + 1 / (4 * math.pi**3 * (2 * K + 1) ** 2))


def cos_pushforward_density(q: RationalQD, w: complex, policy: TruncationPolicy | None = None) -> DensityValue:
    """Truncated sum (1/(1-w^2)) sum_{|k|<=K} q(2 pi k +- arccos w).

    K is the smallest index up to ``policy.K`` whose tail bound is below
    ``policy.tail_tol``.
    """
    policy = policy or TruncationPolicy()
    w = complex(w)
    if abs(w - 1) <= IDENTITY_TOL or abs(w + 1) <= IDENTITY_TOL:
        raise CriticalValue(f"w = {w} is a critical value of cosine")
    C, R = decay_constant(q)
    weight = abs(1 - w * w)
    K = None
    for k in range(policy.K + 1):
        if _lattice_tail(C, R, k) / weight <= policy.tail_tol:
            K = k
            break
    if K is None:
        raise TailTooLarge(
            f"tail bound {_lattice_tail(C, R, policy.K) / weight:.3g} exceeds {policy.tail_tol:.3g} at K={policy.K}"
        )
    pts = np.array(cos_preimages(w, K).points)
    for p, _ in q.poles:
        if np.any(np.abs(pts - p) <= IDENTITY_TOL):
            raise PoleImage(f"a preimage of {w} is the pole {p}")
    total = complex(np.sum(q(pts)))
    return DensityValue(total / (1 - w * w), _lattice_tail(C, R, K) / weight, K)


class LatticeSum:
    """Exact sum over k in Z of q(z + 2 pi k) and the symmetrised fibre sum.

    ``anchor`` is the point about which strip coordinates are taken; offsets
    of poles near the anchor are formed exactly, so clusters far below the
    anchor's magnitude stay resolved.
    """

    def __init__(self, q: RationalQD, anchor: complex = 0j, sign: int = 1):
        if not q.is_sphere_integrable:
            raise NonIntegrable("lattice sums need simple poles and cubic decay")
        self.q = q
        self.poles = q.pole_points
        self.res = q.residues()
        self.sign = sign
        c_pre = complex(anchor)

        def red(x):
            return x - TWO_PI * np.round(x.real / TWO_PI)

        self.alpha = red(self.poles - sign * c_pre)
        self.beta = red(self.poles + sign * c_pre)

    @classmethod
    def for_strip(cls, q: RationalQD) -> tuple["LatticeSum", complex]:
        """Lattice sum anchored at the strip image of the tightest pole cluster."""
        pts = q.pole_points
        c_pre = tight_cluster_center(pts) if len(pts) else 0j
        x = c_pre.real % TWO_PI
        if x <= math.pi:
            sign, k = 1, -math.floor(c_pre.real / TWO_PI)
        else:
            sign, k = -1, math.ceil(c_pre.real / TWO_PI)
        c0 = sign * c_pre + TWO_PI * k
        return cls(q, c_pre, sign), complex(c0)

    @staticmethod
    def _cot(x):
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1 / np.tan(x)

    def fibre(self, zeta):
        """sum over the cosine fibre of the anchor point + zeta."""
        zeta = np.asarray(zeta, dtype=complex)
        out = np.zeros(zeta.shape, dtype=complex)
        for c, a, b in zip(self.res, self.alpha, self.beta):
            out += (c / 2) * (self._cot((zeta - a) / 2) + self._cot((-zeta - b) / 2))
        return out

    def periodic(self, z):
        """sum_k q(z + 2 pi k) in plain coordinates (anchor must be 0)."""
        z = np.asarray(z, dtype=complex)
        out = np.zeros(z.shape, dtype=complex)
        for c, p in zip(self.res, self.poles):
            out += (c / 2) * self._cot((z - p) / 2)
        return out

    def fibre_poles(self, x0, x1, y0, y1) -> np.ndarray:
        """Poles of the fibre sum inside a rectangle of anchor coordinates."""
        pts = []
        for base in list(self.alpha) + list(-self.beta):
            lo = math.floor((x0 - base.real) / TWO_PI) - 1
            hi = math.ceil((x1 - base.real) / TWO_PI) + 1
            for m in range(lo, hi + 1):
                z = base + TWO_PI * m
                if x0 - 1e-12 <= z.real <= x1 + 1e-12 and y0 <= z.imag <= y1:
                    pts.append((z.real, z.imag))
        return np.array(pts, dtype=float).reshape(-1, 2)


def periodized_pushforward_density(q: RationalQD, w):
    """Exact cos_* q density (the full sum over Z) at w."""
    lat = LatticeSum(q)
    w = np.asarray(w, dtype=complex)
    if np.any((np.abs(w - 1) <= IDENTITY_TOL) | (np.abs(w + 1) <= IDENTITY_TOL)):
        raise CriticalValue("w = +-1 is a critical value of cosine")
    a = np.arccos(w)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = lat.fibre(a) / (1 - w * w)
    if not np.all(np.isfinite(out)):
        raise PoleImage("a preimage of w is a pole")
    return out


class CosPushforwardDensity:
    """cos_* q as a density on the w-plane, for the generic mass integrator."""

    order_at_infinity = -1

    def __init__(self, q: RationalQD):
        self.lat = LatticeSum(q)
        images = [1.0 + 0j, -1.0 + 0j]
        for p in q.pole_points:
            v = complex(np.cos(p))
            if all(abs(v - u) > IDENTITY_TOL for u in images):
                images.append(v)
        self.finite_poles = tuple((v, 1) for v in images)

    def local(self, zeta, center=0j):
        w = center + np.asarray(zeta, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            return self.lat.fibre(np.arccos(w)) / (1 - w * w)

    def chart(self, omega, center=0j):
        omega = np.asarray(omega, dtype=complex)
        with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
            w = center + 1 / omega
            g = self.lat.fibre(np.arccos(w))
            return g / (omega**2 * (omega**2 - (1 + center * omega) ** 2))


# ---------------------------------------------------------------------------
# masses


def _tail_constants(q: RationalQD) -> tuple[float, float]:
    pts = q.pole_points
    c = tight_cluster_center(pts)
    delta = pts - c
    D = float(np.sum(np.abs(q.residues()) * np.abs(delta)))
    h = abs(c.imag) + float(np.max(np.abs(delta.imag)))
    return D, h


def strip_tail_bound(q: RationalQD, Y: float) -> float:
    """Bound on the strip integral over |Im z| > Y.

    Since the residues sum to zero, for |Im z| > h the lattice sum is
    -i sum_m e^{imz} sum_j c_j (e^{-im p_j} - e^{-im c}) up to conjugation,
    which is at most D x / (1 - x)^2 with x = e^{-(|Im z| - h)} and
    D = sum |c_j| |p_j - c|; cancelling dipoles keep D small.
    """
    if not q.is_sphere_integrable:
        raise NonIntegrable("tail bound needs a sphere-integrable differential")
    D, h = _tail_constants(q)
    if Y <= h:
        return math.inf
    x = math.exp(-(Y - h))
    return 4 * math.pi * D * x / (1 - x) ** 2


def _height_for(q: RationalQD, target: float) -> float:
    _, h = _tail_constants(q)
    Y = h + 1.0
    while strip_tail_bound(q, Y) > target:
        Y += 0.5
    return Y


def _strip_patch(integrand, x0, x1, y0, y1, singular) -> Patch:
    vcells = max(2, int(math.ceil((y1 - y0) / (math.pi / 2))))
    return Patch(x0, x1, y0, y1, integrand, vcells=vcells, ucells=2, singular=singular)


def cos_pushforward_mass(q: RationalQD, cfg: QuadratureConfig | None = None,
                         policy: TruncationPolicy | None = None, method: str = "strip") -> MassResult:
    """||cos_* q|| by the fundamental-strip route or, with method="wplane", the w-plane route."""
    cfg = cfg or QuadratureConfig()
    policy = policy or TruncationPolicy()
    if not q.is_sphere_integrable:
        raise NonIntegrable("push-forward mass needs a sphere-integrable differential")
    if method == "wplane":
        return integrate_density(CosPushforwardDensity(q), Plane(), cfg)
    if method != "strip":
        raise ValueError(f"unknown method {method!r}")
    lat, c0 = LatticeSum.for_strip(q)

    def f(u, v):
        return np.abs(lat.fibre(u + 1j * v))

    def integrate(Y):
        x0, x1 = -c0.real, math.pi - c0.real
        y0, y1 = -Y - c0.imag, Y - c0.imag
        patch = _strip_patch(f, x0, x1, y0, y1, lat.fibre_poles(x0, x1, y0, y1))
        return _run([patch], cfg)

    if policy.Y is not None:
        Y = policy.Y
    else:
        Y = _height_for(q, policy.tail_tol * _tail_constants(q)[0])
    res = integrate(Y)
    tail = strip_tail_bound(q, Y)
    if tail > policy.tail_tol * res.value:
        if policy.Y is not None:
            raise TailTooLarge(f"strip tail bound {tail:.3g} exceeds {policy.tail_tol:.3g} of the mass at Y={Y}")
        Y = _height_for(q, policy.tail_tol * res.value)
        res = integrate(Y)
        tail = strip_tail_bound(q, Y)
    return MassResult(res.value, res.error + tail, res.cells_evaluated)


def efficiency(q: RationalQD, cfg: QuadratureConfig | None = None,
               policy: TruncationPolicy | None = None) -> EfficiencyResult:
    cfg = cfg or QuadratureConfig()
    mass = mass_on_region(q, Plane(), cfg)
    if mass.value <= cfg.abs_floor:
        raise ZeroMass("differential has (numerically) zero mass")
    return EfficiencyResult(mass, cos_pushforward_mass(q, cfg, policy))


def efficiency_ratio(q: RationalQD, cfg: QuadratureConfig | None = None,
                     policy: TruncationPolicy | None = None) -> float:
    """||cos_* q|| / ||q||."""
    return efficiency(q, cfg, policy).ratio


def restricted_cos_pushforward_mass(q: RationalQD, region: Region, cfg: QuadratureConfig | None = None,
                                    policy: TruncationPolicy | None = None) -> MassResult:
    """||cos_*(q restricted to region)|| for a bounded region.

    Only fibre points lying in the region enter the strip integrand, so the
    integrand jumps along translates of the region boundary; the adaptive
    rule refines along those curves.
    """
    cfg = cfg or QuadratureConfig()
    if not region.bounded:
        raise ValueError("restricted push-forward needs a bounded region")
    for p, n in q.poles:
        if n >= 2 and bool(region.contains(np.array(p))):
            raise NonIntegrable(f"pole of order {n} at {p} lies in the region")
    xmin, xmax, ymin, ymax = region.bbox()
    if xmax < xmin or ymax < ymin:
        return MassResult(0.0, 0.0, 0)
    Y = max(abs(ymin), abs(ymax))
    if Y == 0:
        return MassResult(0.0, 0.0, 0)
    ks = range(math.floor(xmin / TWO_PI) - 1, math.ceil(xmax / TWO_PI) + 2)
    branches = [(s, k) for s in (1, -1) for k in ks]

    def f(u, v):
        z = u + 1j * v
        acc = np.zeros(z.shape, dtype=complex)
        for s, k in branches:
            zp = s * z + TWO_PI * k
            inside = region.contains(zp)
            if inside.any():
                with np.errstate(divide="ignore", invalid="ignore"):
                    acc += np.where(inside, q(zp), 0)
        return np.abs(acc)

    sing = []
    for p, _ in q.poles:
        if bool(region.contains(np.array(p))):
            for s, k in branches:
                z = s * (p - TWO_PI * k)
                if -1e-12 <= z.real <= math.pi + 1e-12 and abs(z.imag) <= Y:
                    sing.append((z.real, z.imag))
    patch = _strip_patch(f, 0.0, math.pi, -Y, Y, np.array(sing, dtype=float).reshape(-1, 2))
    res = _run([patch], cfg)
    return MassResult(res.value, res.error, res.cells_evaluated)


# ---------------------------------------------------------------------------
# polynomial push-forwards

DensityArg = Union[RationalQD, Callable[[complex], complex]]


def _as_poly(Q) -> Polynomial:
    if isinstance(Q, Polynomial):
        return Q
    return Polynomial(np.asarray(Q, dtype=complex))


def _density_at(q: DensityArg, z: complex) -> complex:
    if isinstance(q, RationalQD):
        for p, _ in q.poles:
            if abs(z - p) <= IDENTITY_TOL:
                raise PoleImage(f"preimage {z} is a pole")
        return complex(q(np.array(z)))
    return complex(q(z))


def poly_pushforward_density(Q, q: DensityArg, w: complex) -> complex:
    """sum over Q(z) = w of q(z) / Q'(z)^2, for deg Q in {1, 2, 3}.

    ``Q`` holds coefficients lowest degree first (or is a numpy Polynomial);
    ``q`` is a RationalQD or any callable density.
    """
    Q = _as_poly(Q).trim()
    if not 1 <= Q.degree() <= 3:
        raise ValueError("polynomial degree must be 1, 2 or 3")
    w = complex(w)
    roots = (Q - w).roots()
    dQ = Q.deriv()
    scale = max(1.0, float(np.max(np.abs(Q.coef))))
    total = 0j
    for z in roots:
        d = complex(dQ(z))
        if abs(d) <= 1e-10 * scale * max(1.0, abs(z)) ** max(Q.degree() - 1, 0):
            raise CriticalValue(f"{w} is a critical value of the polynomial")
        total += _density_at(q, complex(z)) / d**2
    return total


def semiconjugacy_residual(a: int, z_samples: Sequence[complex], Q=None) -> float:
    """max |cos(a z) - Q(cos z)| / max(1, e^{a |Im z|}) over the samples."""
    if Q is None:
        if a == 2:
            Q = Q2
        elif a == 3:
            Q = Q3
        else:
            raise ValueError("a must be 2 or 3 unless Q is given")
    Q = _as_poly(Q)
    z = np.asarray(z_samples, dtype=complex)
    if z.size == 0:
        return 0.0
    diff = np.abs(np.cos(a * z) - Q(np.cos(z)))
    scale = np.maximum(1.0, np.exp(a * np.abs(z.imag)))
    return float(np.max(diff / scale))


def quadratic_model_pushforward(q: DensityArg, w: complex) -> complex:
    """Push-forward by g(z) = 1 - z^2/2: (q(s) + q(-s)) / (2 - 2w), s = sqrt(2 - 2w)."""
    w = complex(w)
    if abs(w - 1) <= IDENTITY_TOL:
        raise CriticalValue("w = 1 is the critical value of g")
    s = cmath.sqrt(2 - 2 * w)
    return (_density_at(q, s) + _density_at(q, -s)) / (2 - 2 * w)
