"""Covering heavy points through the 3-D uncapacitated cuboid cover problem.

A heavy point ``(x, y)`` with rounded demand ``d'`` becomes ``(x, y, d')``; a
residual rectangle with rounded capacity ``c'`` becomes the cuboid
``[0, xmax] x [ylo, yhi] x [0, c']``. Covering in 3-D is then the same as
covering in 2-D with a rectangle of class at least the point's class.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import CoverProblem, InfeasibleCoverError
from .reduction import Cover
from .rounding import ResidualClassified


@dataclass(frozen=True)
class R3uPoint:
    x: int
    y: int
    z: int
    source: int = -1  # index of the R2C point


@dataclass(frozen=True)
class Cuboid:
    id: str
    xmax: int
    ylo: int
    yhi: int
    zmax: int
    weight: int

    def covers(self, p: R3uPoint) -> bool:
        return p.x <= self.xmax and self.ylo <= p.y <= self.yhi and p.z <= self.zmax


@dataclass
class R3uInstance:
    points: Sequence[R3uPoint]
    cuboids: Sequence[Cuboid]
    frac: dict  # cuboid id -> x'

    def incidence(self) -> np.ndarray:
        if not self.points or not self.cuboids:
            return np.zeros((len(self.points), len(self.cuboids)), dtype=bool)
        P = np.array([(p.x, p.y, p.z) for p in self.points])
        C = np.array([(c.xmax, c.ylo, c.yhi, c.zmax) for c in self.cuboids])
        return (
            (P[:, None, 0] <= C[None, :, 0])
            & (C[None, :, 1] <= P[:, None, 1])
            & (P[:, None, 1] <= C[None, :, 2])
            & (P[:, None, 2] <= C[None, :, 3])
        )

    def covering_problem(self) -> CoverProblem:
        return CoverProblem(
            [c.id for c in self.cuboids],
            np.array([c.weight for c in self.cuboids], dtype=np.int64),
            self.incidence().astype(np.int64),
            np.ones(len(self.points), dtype=np.int64),
        )

    def fractional_value(self) -> float:
        return sum(c.weight * self.frac.get(c.id, 0.0) for c in self.cuboids)

    def rect(self, cid: str) -> Cuboid:
        return next(c for c in self.cuboids if c.id == cid)


def build_r3u(rc: ResidualClassified) -> R3uInstance:
    r2c = rc.r2c
    points = [
        R3uPoint(r2c.points[i].x, r2c.points[i].y, rc.demand[i], i) for i in rc.heavy
    ]
    cuboids = []
    frac = {}
    for j, r in enumerate(r2c.rects):
        if j in rc.picked:
            continue
        cuboids.append(Cuboid(r.id, r.xmax, r.ylo, r.yhi, rc.capacity[j], r.weight))
        frac[r.id] = rc.scaled[j]
    return R3uInstance(points, cuboids, frac)


def lp_greedy_cover(r3u: R3uInstance) -> Cover:
    """Weighted greedy set cover: repeatedly take the cheapest cuboid per new point.

    Ties go to the lower weight, then the smaller id. The result weighs at most
    ``H_m`` times any fractional cover, in particular the attached ``x'``.
    """
    inc = r3u.incidence()
    uncovered = np.ones(len(r3u.points), dtype=bool)
    if len(r3u.points) and not inc.any(axis=1).all():
        bad = int(np.flatnonzero(~inc.any(axis=1))[0])
        raise InfeasibleCoverError(f"point {r3u.points[bad]} lies in no cuboid")
    chosen = []
    while uncovered.any():
        gains = inc[uncovered].sum(axis=0)
        best, key = None, None
        for j, c in enumerate(r3u.cuboids):
            if gains[j] == 0:
                continue
            k = (Fraction(c.weight, int(gains[j])), c.weight, c.id)
            if key is None or k < key:
                best, key = j, k
        chosen.append(r3u.cuboids[best].id)
        uncovered &= ~inc[:, best]
    return Cover.of(chosen, "heavy")


def greedy_bound(m: int) -> float:
    return math.log(m) + 1 if m else 0.0


def envelope(rects) -> tuple[np.ndarray, np.ndarray]:
    """Split the y-axis at rectangle endpoints and return the union's reach per piece.

    Returns ``(ys, reach)`` where piece ``i`` is ``(ys[i], ys[i+1])`` and
    ``reach[i]`` is the largest ``x`` over rectangles spanning it (``-inf``
    where nothing does).
    """
    ys = np.unique([v for _, lo, hi in rects for v in (lo, hi)])
    reach = np.full(max(len(ys) - 1, 0), -np.inf)
    for x, lo, hi in rects:
        a, b = np.searchsorted(ys, lo), np.searchsorted(ys, hi)
        np.maximum(reach[a:b], x, out=reach[a:b])
    return ys, reach


def union_complexity_2d(rects) -> int:
    """Count the maximal vertical boundary faces of a union of ``[0, x] x [lo, hi]``.

    Sweeping ``y`` and following the rightmost reach of the union, a face is a
    maximal run of consecutive pieces sharing the same finite reach. ``rects``
    holds ``(x, lo, hi)`` triples; degenerate ones are ignored.
    """
    rects = [(x, lo, hi) for x, lo, hi in rects if lo < hi and x > 0]
    if not rects:
        return 0
    _, reach = envelope(rects)
    starts = np.isfinite(reach)
    starts[1:] &= reach[1:] != reach[:-1]
    return int(starts.sum())


def union_complexity_3d(cuboids) -> int:
    """Sum of 2-D face counts over the slices between consecutive distinct heights.

    ``cuboids`` holds ``(x, lo, hi, z)`` tuples.
    """
    heights = sorted({z for *_, z in cuboids})
    return sum(
        union_complexity_2d([(x, lo, hi) for x, lo, hi, z in cuboids if z >= h])
        for h in heights
    )
