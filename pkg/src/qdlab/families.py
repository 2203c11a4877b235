"""Candidate cos-efficient families and efficiency sweeps.

Two constructions are provided. The cos-symmetric family places simple
poles at +-a, +-b and 1 with a quadratic numerator; as a, b shrink, the
poles pair up about the critical point 0 of cosine. The polygon family
stacks a four-pole cluster inside nested annuli of growing modulus.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Optional, Sequence

import numpy as np

from .errors import PoleCollision, QDLabError
from .pushforward import TruncationPolicy, cos_pushforward_mass
from .qd_core import IDENTITY_TOL, RationalQD
from .quadrature import QuadratureConfig, mass_on_region
from .regions import Disk, Plane

__all__ = [
    "Example42Params",
    "Example41Params",
    "example42_build",
    "example41_build",
    "normalize_mass",
    "Family",
    "SweepRow",
    "SWEEP_HEADER",
    "efficiency_sweep",
    "sweep_to_csv",
    "geometric_family",
    "control_family",
    "polygon_family",
]


@dataclass(frozen=True)
class Example42Params:
    a: float
    b: float
    p_coeffs: tuple[complex, complex, complex] = (1, 0, 1)  # lowest degree first
    target_mass: float = 4.0

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.p_coeffs)
        if len(coeffs) != 3:
            raise ValueError("p needs exactly three coefficients")
        object.__setattr__(self, "p_coeffs", coeffs)
        if coeffs[2] == 0:
            raise ValueError("p must have degree exactly 2")
        if not self.a > 0:
            raise ValueError("a must be positive")
        if abs(self.a - self.b) <= IDENTITY_TOL or abs(self.b - 1) <= IDENTITY_TOL or abs(self.a - 1) <= IDENTITY_TOL:
            raise PoleCollision("poles +-a, +-b and 1 must be distinct")
        if not self.b > self.a:
            raise ValueError("need 0 < a < b")
        if not self.target_mass > 0:
            raise ValueError("target_mass must be positive")


@dataclass(frozen=True)
class Example41Params:
    n: int
    cluster_center: complex = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("n must be an integer >= 2")
        object.__setattr__(self, "cluster_center", complex(self.cluster_center))

    # log-radii stay exact for any n; the radii themselves underflow near n = 11
    @property
    def log_R1(self) -> float:
        return -2 * math.pi * self.n**2

    @property
    def log_R2(self) -> float:
        return -2 * math.pi * self.n * (self.n - 1)

    @property
    def log_R3(self) -> float:
        return -2 * math.pi * self.n

    @property
    def R1(self) -> float:
        return math.exp(self.log_R1)

    @property
    def R2(self) -> float:
        return math.exp(self.log_R2)

    @property
    def R3(self) -> float:
        return math.exp(self.log_R3)


def normalize_mass(q: RationalQD, target: float, cfg: QuadratureConfig | None = None) -> RationalQD:
    mass = mass_on_region(q, Plane(), cfg or QuadratureConfig()).value
    return q.scaled(target / mass)


def example42_build(params: Example42Params, cfg: QuadratureConfig | None = None) -> RationalQD:
    c0, c1, c2 = params.p_coeffs
    zeros = np.polynomial.polynomial.polyroots([c0, c1, c2])
    a, b = params.a, params.b
    q = RationalQD(
        c2,
        tuple((complex(z), 1) for z in zeros),
        ((a, 1), (-a, 1), (b, 1), (-b, 1), (1.0, 1)),
    )
    return normalize_mass(q, params.target_mass, cfg)


def example41_build(params: Example41Params, cfg: QuadratureConfig | None = None) -> RationalQD:
    """Poles at 0, c +- R1/2, c +- R2 and infinity; zeros at c +- i R3.

    The cluster must be resolvable in double precision around c; finer
    members raise PoleCollision rather than silently merging poles.
    """
    c = params.cluster_center
    R1, R2, R3 = params.R1, params.R2, params.R3
    scale = max(abs(c), 1.0)
    if R1 / 2 <= 64 * np.finfo(float).eps * scale or R1 <= 2 * IDENTITY_TOL:
        raise PoleCollision(f"cluster spacing e^({params.log_R1:.4g}) is below double resolution at {c}")
    if abs(c) <= R3:
        raise PoleCollision("cluster center too close to the pole at 0")
    poles = ((0j, 1), (c + R1 / 2, 1), (c - R1 / 2, 1), (c + R2, 1), (c - R2, 1))
    zeros = ((c + 1j * R3, 1), (c - 1j * R3, 1))
    return normalize_mass(RationalQD(1.0, zeros, poles), 4.0, cfg)


# ---------------------------------------------------------------------------
# sweeps

SWEEP_HEADER = ("index", "mass", "pushforward_mass", "ratio", "concentration_fraction", "error_estimate")


@dataclass(frozen=True)
class Family:
    """Indexed family: build(n) returns a member, disk(n) its concentration disk."""

    name: str
    build: Callable[[int], RationalQD]
    disk: Callable[[int], Optional[Disk]] = field(default=lambda n: None)


@dataclass(frozen=True)
class SweepRow:
    index: int
    mass: float = math.nan
    pushforward_mass: float = math.nan
    ratio: float = math.nan
    concentration_fraction: float = math.nan
    error_estimate: float = math.nan
    error: Optional[str] = None

    @property
    def ok(self) -> bool:
        return self.error is None


def _row(family: Family, n: int, cfg: QuadratureConfig, policy: TruncationPolicy) -> SweepRow:
    try:
        q = family.build(n)
        mass = mass_on_region(q, Plane(), cfg)
        push = cos_pushforward_mass(q, cfg, policy)
        ratio = push.value / mass.value
        err = (push.error_estimate + ratio * mass.error_estimate) / mass.value
        disk = family.disk(n)
        frac = math.nan
        if disk is not None:
            frac = mass_on_region(q, disk, cfg).value / mass.value
        return SweepRow(n, mass.value, push.value, ratio, frac, err)
    except QDLabError as exc:
        return SweepRow(n, error=f"{type(exc).__name__}: {exc}")


def efficiency_sweep(family: Family, indices: Iterable[int], cfg: QuadratureConfig | None = None,
                     policy: TruncationPolicy | None = None) -> list[SweepRow]:
    """One row per index, in index order; failing members become error rows."""
    cfg = cfg or QuadratureConfig()
    policy = policy or TruncationPolicy()
    return [_row(family, int(n), cfg, policy) for n in sorted(indices)]


def sweep_to_csv(rows: Sequence[SweepRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(SWEEP_HEADER)
    for r in rows:
        if r.ok:
            writer.writerow([r.index] + [f"{getattr(r, k):#.10g}" for k in SWEEP_HEADER[1:]])
        else:
            writer.writerow([r.index] + ["nan"] * 5)
    return buf.getvalue()


def geometric_family(p_coeffs=(1, 0, 1), ratio: float = 3.0, base: float = 2.0,
                     cfg: QuadratureConfig | None = None) -> Family:
    """a = base^-n, b = ratio * a."""

    def build(n):
        a = base ** (-n)
        return example42_build(Example42Params(a, ratio * a, p_coeffs), cfg)

    return Family("ex42-geometric", build, lambda n: Disk(0, 10 * base ** (-n)))


def control_family(a: float = 0.5, ratio: float = 3.0, p_coeffs=(1, 0, 1),
                   cfg: QuadratureConfig | None = None) -> Family:
    """Bounded-scale control: the same member at every index."""

    def build(n):
        return example42_build(Example42Params(a, ratio * a, p_coeffs), cfg)

    return Family("ex42-control", build, lambda n: Disk(0, 10 * a))


def polygon_family(cluster_center: complex = 1.0, cfg: QuadratureConfig | None = None) -> Family:
    def build(n):
        return example41_build(Example41Params(n, cluster_center), cfg)

    def disk(n):
        return Disk(cluster_center, Example41Params(n, cluster_center).R3)

    return Family("ex41", build, disk)
