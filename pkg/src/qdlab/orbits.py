"""Orbit portraits of postsingularly finite cosine maps.

Both critical values of z -> lam cos z share one forward orbit. The
preperiod counts steps from a critical point, so the critical value x1 is
already one step along; y1 is the other critical value and infinity the
asymptotic value.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import BadPeriod, NotStrictlyPreperiodic, OddCount, TooSmall

__all__ = [
    "OrbitPortrait",
    "validate_portrait",
    "teich_dimension",
    "postsingular_labels",
    "orbit_diagram",
    "Verdict",
    "Feasibility",
    "counting_feasibility",
]


@dataclass(frozen=True)
class OrbitPortrait:
    preperiod: int
    period: int

    @property
    def postsingular_size(self) -> int:
        return self.preperiod + self.period + 1


def validate_portrait(preperiod: int, period: int) -> OrbitPortrait:
    if int(preperiod) != preperiod or preperiod < 2:
        raise NotStrictlyPreperiodic(f"preperiod must be an integer >= 2, got {preperiod}")
    if int(period) != period or period < 1:
        raise BadPeriod(f"period must be an integer >= 1, got {period}")
    return OrbitPortrait(int(preperiod), int(period))


def teich_dimension(p: OrbitPortrait) -> int:
    if p.postsingular_size <= 3:
        raise TooSmall("Teichmueller space is trivial for |P_f| <= 3")
    return p.postsingular_size - 3


def postsingular_labels(p: OrbitPortrait) -> list[str]:
    """x1 .. x_{pre+per-1} along the orbit, then y1 and infinity."""
    n = p.preperiod + p.period - 1
    return [f"x{i}" for i in range(1, n + 1)] + ["y1", "inf"]


def orbit_diagram(p: OrbitPortrait) -> str:
    n = p.preperiod + p.period - 1
    xs = [f"x{i}" for i in range(1, n + 1)]
    entry = xs[p.preperiod - 1]  # first periodic point
    chain = " -> ".join(["c"] + xs) + f" -> {entry}"
    return chain + "\ny1 -> x2"


class Verdict(str, Enum):
    INFEASIBLE = "Infeasible"
    INDETERMINATE = "Indeterminate"


@dataclass(frozen=True)
class Feasibility:
    verdict: Verdict
    reason: str = ""

    @property
    def infeasible(self) -> bool:
        return self.verdict is Verdict.INFEASIBLE


def counting_feasibility(sym_poles_in_disk: int, crit_values_inside: int) -> Feasibility:
    """Decision table for cos-symmetric pole counts inside a concentration disk."""
    if sym_poles_in_disk < 0:
        raise ValueError("pole count must be nonnegative")
    if crit_values_inside not in (0, 1, 2):
        raise ValueError("crit_values_inside must be 0, 1 or 2")
    if sym_poles_in_disk % 2:
        raise OddCount("cos-symmetric poles come in pairs")
    if sym_poles_in_disk >= 6:
        return Feasibility(Verdict.INFEASIBLE, "at least six cos-symmetric poles")
    if sym_poles_in_disk >= 4 and crit_values_inside == 0:
        return Feasibility(Verdict.INFEASIBLE, "four non-critical-value points of P_f map to two points of P_f")
    if sym_poles_in_disk >= 4 and crit_values_inside == 1:
        return Feasibility(Verdict.INFEASIBLE, "three non-critical-value points of P_f map to two points of P_f")
    return Feasibility(Verdict.INDETERMINATE)
