"""Globally adaptive tensor-Gauss cubature over rectangular parameter patches.

Each patch is a rectangle [u0, u1] x [v0, v1] in some parameter space with
a nonnegative integrand. Cells that contain a listed singular point (an
integrable 1/distance singularity) are integrated by splitting them into
four triangles with apex at the singular point and applying a collapsed
(Duffy) product rule; the collapse Jacobian cancels the singularity.

The error indicator of a cell is |Q(cell) - sum Q(children)|. Every round
the cells carrying more than the average share of the remaining error
budget are split in four. Contributions are summed with ``math.fsum``, so
the result does not depend on evaluation or thread order.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import NoConvergence

Integrand = Callable[[np.ndarray, np.ndarray], np.ndarray]

_CHUNK = 1 << 16


@lru_cache(maxsize=None)
def gauss01(order: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return (x + 1) / 2, w / 2


def worker_count() -> int:
    try:
        return max(1, int(os.environ.get("QDLAB_THREADS", "1")))
    except ValueError:
        return 1


def _evaluate(f: Integrand, U: np.ndarray, V: np.ndarray) -> np.ndarray:
    flat_u = U.ravel()
    flat_v = V.ravel()
    n = flat_u.size
    workers = worker_count()
    if workers == 1 or n <= _CHUNK:
        out = np.asarray(f(flat_u, flat_v), dtype=float)
    else:
        # workers fill disjoint slices of a preallocated table
        out = np.empty(n, dtype=float)
        bounds = list(range(0, n, _CHUNK)) + [n]

        def job(i):
            lo, hi = bounds[i], bounds[i + 1]
            out[lo:hi] = f(flat_u[lo:hi], flat_v[lo:hi])

        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(job, range(len(bounds) - 1)))
    return out.reshape(U.shape)


@dataclass
class Patch:
    u0: float
    u1: float
    v0: float
    v1: float
    integrand: Integrand
    ubreaks: Sequence[float] = ()
    vcells: int = 8
    ucells: int = 1
    singular: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    polar: bool = False  # v is an angle; its physical length scales with u

    def initial_cells(self) -> np.ndarray:
        # breaks closer than rounding noise would leave slivers of zero width
        gap = 1e-9 * (self.u1 - self.u0)
        us = [self.u0]
        for b in sorted(b for b in self.ubreaks if self.u0 + gap < b < self.u1 - gap):
            if b - us[-1] > gap:
                us.append(b)
        us.append(self.u1)
        if self.ucells > 1:
            fine = []
            for a, b in zip(us[:-1], us[1:]):
                fine.extend(np.linspace(a, b, self.ucells + 1)[:-1])
            us = fine + [us[-1]]
        vs = np.linspace(self.v0, self.v1, self.vcells + 1)
        cells = [(a, b, c, d) for a, b in zip(us[:-1], us[1:]) for c, d in zip(vs[:-1], vs[1:])]
        return np.array(cells, dtype=float).reshape(-1, 4)


@dataclass
class CubatureResult:
    value: float
    error: float
    cells_evaluated: int
    patch_index: np.ndarray
    cells: np.ndarray
    values: np.ndarray


def _split(cells: np.ndarray) -> np.ndarray:
    u0, u1, v0, v1 = cells.T
    um = (u0 + u1) / 2
    vm = (v0 + v1) / 2
    kids = np.stack(
        [
            np.stack([u0, um, v0, vm], 1),
            np.stack([um, u1, v0, vm], 1),
            np.stack([u0, um, vm, v1], 1),
            np.stack([um, u1, vm, v1], 1),
        ],
        1,
    )
    return kids.reshape(-1, 4)


def _bisect(cells: np.ndarray, axis: int) -> np.ndarray:
    """Halve cells along u (axis 0) or v (axis 2)."""
    lo, hi = cells[:, axis], cells[:, axis + 1]
    mid = (lo + hi) / 2
    a, b = cells.copy(), cells.copy()
    a[:, axis + 1] = mid
    b[:, axis] = mid
    return np.stack([a, b], 1).reshape(-1, 4)


class AdaptiveCubature:
    def __init__(
        self,
        patches: Sequence[Patch],
        rel_tol: float,
        abs_floor: float,
        max_depth: int,
        order: int = 8,
        max_evals: int = 40_000_000,
    ):
        self.patches = list(patches)
        self.rel_tol = rel_tol
        self.abs_floor = abs_floor
        self.max_depth = max_depth
        self.x, self.w = gauss01(order)
        self.max_evals = max_evals
        self.evals = 0
        self.rules = 0

    # -- rules ---------------------------------------------------------

    def _rule(self, pidx: int, cells: np.ndarray) -> np.ndarray:
        patch = self.patches[pidx]
        n_cells = len(cells)
        out = np.zeros(n_cells)
        if n_cells == 0:
            return out
        self.rules += n_cells
        S = np.asarray(patch.singular, dtype=float).reshape(-1, 2)
        apex = np.full(n_cells, -1)
        if len(S):
            u0, u1, v0, v1 = (cells[:, i : i + 1] for i in range(4))
            tu = 1e-12 * (np.abs(u0) + np.abs(u1) + (u1 - u0))
            tv = 1e-12 * (np.abs(v0) + np.abs(v1) + (v1 - v0))
            su, sv = S[None, :, 0], S[None, :, 1]
            inside = (su >= u0 - tu) & (su <= u1 + tu) & (sv >= v0 - tv) & (sv <= v1 + tv)
            has = inside.any(1)
            apex[has] = inside[has].argmax(1)
        reg = apex < 0
        if reg.any():
            out[reg] = self._regular(patch, cells[reg])
        if (~reg).any():
            out[~reg] = self._collapsed(patch, cells[~reg], S[apex[~reg]])
        return out

    def _regular(self, patch: Patch, cells: np.ndarray) -> np.ndarray:
        x, w = self.x, self.w
        u0, u1, v0, v1 = cells.T
        du, dv = u1 - u0, v1 - v0
        U = u0[:, None, None] + du[:, None, None] * x[None, :, None]
        V = v0[:, None, None] + dv[:, None, None] * x[None, None, :]
        U, V = np.broadcast_arrays(U, V)
        self.evals += U.size
        F = _evaluate(patch.integrand, U, V)
        W = np.outer(w, w)
        return (F * W[None]).sum((1, 2)) * du * dv

    def _collapsed(self, patch: Patch, cells: np.ndarray, apex: np.ndarray) -> np.ndarray:
        x, w = self.x, self.w
        u0, u1, v0, v1 = cells.T
        corners = np.stack(
            [np.stack([u0, v0], 1), np.stack([u1, v0], 1), np.stack([u1, v1], 1), np.stack([u0, v1], 1)], 1
        )
        total = np.zeros(len(cells))
        s = x[:, None]
        t = x[None, :]
        W = np.outer(w, w) * s
        for k in range(4):
            A = corners[:, k]
            B = corners[:, (k + 1) % 4]
            ea = A - apex
            eb = B - apex
            det = np.abs(ea[:, 0] * eb[:, 1] - ea[:, 1] * eb[:, 0])
            live = det > 0
            if not live.any():
                continue
            P, ea_l, eab = apex[live], ea[live], (B - A)[live]
            U = P[:, 0, None, None] + s[None] * (ea_l[:, 0, None, None] + t[None] * eab[:, 0, None, None])
            V = P[:, 1, None, None] + s[None] * (ea_l[:, 1, None, None] + t[None] * eab[:, 1, None, None])
            self.evals += U.size
            F = _evaluate(patch.integrand, U, V)
            total[live] += (F * W[None]).sum((1, 2)) * det[live]
        return total

    def _separate(self, pidx: np.ndarray, cells: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """Pre-split initial cells around singular points.

        A cell may hold at most one singular point, and a cell holding one
        is bisected until its sides are within a factor 2 of each other in
        physical length. The collapsed rule is self-similar under four-way
        splits, so a thin apex cell would keep the same relative error at
        every level while the error indicator saw none of it.
        """
        for _ in range(80):
            split_u = np.zeros(len(cells), dtype=bool)
            split_v = np.zeros(len(cells), dtype=bool)
            for p in np.unique(pidx):
                patch = self.patches[p]
                S = np.unique(np.asarray(patch.singular, dtype=float).reshape(-1, 2), axis=0)
                if len(S) == 0:
                    continue
                sel = np.nonzero(pidx == p)[0]
                u0, u1, v0, v1 = (cells[sel, i : i + 1] for i in range(4))
                inside = (S[None, :, 0] >= u0) & (S[None, :, 0] <= u1) & (S[None, :, 1] >= v0) & (S[None, :, 1] <= v1)
                count = inside.sum(1)
                du = (u1 - u0)[:, 0]
                dv = (v1 - v0)[:, 0]
                if patch.polar:
                    dv = dv * np.where(count > 0, S[inside.argmax(1), 0], 1.0)
                lone = count == 1
                crowded = count >= 2
                split_u[sel] = crowded | (lone & (du > 2 * dv))
                split_v[sel] = crowded | (lone & (dv > 2 * du))
            if not (split_u.any() or split_v.any()):
                break
            both = split_u & split_v
            only_u = split_u & ~split_v
            only_v = split_v & ~split_u
            keep = ~(split_u | split_v)
            pidx = np.concatenate(
                [pidx[keep], np.repeat(pidx[both], 4), np.repeat(pidx[only_u], 2), np.repeat(pidx[only_v], 2)]
            )
            cells = np.concatenate(
                [cells[keep], _split(cells[both]), _bisect(cells[only_u], 0), _bisect(cells[only_v], 2)]
            )
        return pidx, cells

    def _apply(self, pidx: np.ndarray, cells: np.ndarray) -> np.ndarray:
        out = np.empty(len(cells))
        for p in np.unique(pidx):
            sel = pidx == p
            out[sel] = self._rule(int(p), cells[sel])
        return out

    # -- driver --------------------------------------------------------

    def run(self) -> CubatureResult:
        init = [(i, p.initial_cells()) for i, p in enumerate(self.patches)]
        if not init:
            return CubatureResult(0.0, 0.0, 0, np.zeros(0, int), np.zeros((0, 4)), np.zeros(0))
        pidx = np.concatenate([np.full(len(c), i) for i, c in init]).astype(int)
        cells = np.concatenate([c for _, c in init])
        pidx, cells = self._separate(pidx, cells)
        depth = np.zeros(len(cells), dtype=int)
        if len(cells) == 0:
            return CubatureResult(0.0, 0.0, 0, pidx, cells, np.zeros(0))
        coarse = self._apply(pidx, cells)
        kids = self._apply(np.repeat(pidx, 4), _split(cells)).reshape(-1, 4)

        while True:
            fine = kids.sum(1)
            err = np.abs(fine - coarse)
            total = math.fsum(fine)
            err_total = math.fsum(err)
            target = max(self.rel_tol * abs(total), self.abs_floor)
            if err_total <= target:
                break
            candidates = err > target / len(err)
            splittable = candidates & (depth < self.max_depth)
            if not splittable.any() or self.evals > self.max_evals:
                raise NoConvergence(
                    f"error estimate {err_total:.3g} above target {target:.3g} "
                    f"after {self.rules} cell rules (depth or evaluation budget exhausted)"
                )
            keep = ~splittable
            new_cells = _split(cells[splittable])
            new_pidx = np.repeat(pidx[splittable], 4)
            new_coarse = kids[splittable].ravel()
            new_kids = self._apply(np.repeat(new_pidx, 4), _split(new_cells)).reshape(-1, 4)
            pidx = np.concatenate([pidx[keep], new_pidx])
            cells = np.concatenate([cells[keep], new_cells])
            depth = np.concatenate([depth[keep], np.repeat(depth[splittable] + 1, 4)])
            coarse = np.concatenate([coarse[keep], new_coarse])
            kids = np.concatenate([kids[keep], new_kids])

        return CubatureResult(
            value=total,
            error=err_total,
            cells_evaluated=self.rules,
            patch_index=pidx,
            cells=cells,
            values=fine,
        )
