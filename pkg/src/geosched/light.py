"""Covering light points: one multi-cover instance per rectangle class.

For class ``l`` every light point asks for ``floor(sum of x' over class-l
coverers)`` distinct class-``l`` rectangles. Each instance is solved by
demand capping, then harmonic rounds of a local-ratio set cover.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from .exact import CoverProblem, InfeasibleCoverError
from .reduction import Cover, R2cRect
from .rounding import BETA, ResidualClassified

DEMAND_CAP_CONSTANT = 8
MAX_TRIALS = 20
FLOOR_TOL = 1e-9


class RoundingError(AssertionError):
    """A step that the analysis guarantees has failed."""


@dataclass(frozen=True)
class R2mPoint:
    id: str
    x: int
    y: int
    demand: int


@dataclass
class R2mInstance:
    points: Sequence[R2mPoint]
    rects: Sequence[R2cRect]
    frac: dict = field(default_factory=dict)  # rect id -> fractional value
    level: Optional[int] = None

    def __post_init__(self):
        self._index = {r.id: j for j, r in enumerate(self.rects)}

    def rect(self, rid: str) -> R2cRect:
        return self.rects[self._index[rid]]

    def incidence(self) -> np.ndarray:
        if not self.points or not self.rects:
            return np.zeros((len(self.points), len(self.rects)), dtype=bool)
        xs = np.array([p.x for p in self.points])[:, None]
        ys = np.array([p.y for p in self.points])[:, None]
        xm = np.array([r.xmax for r in self.rects])[None, :]
        lo = np.array([r.ylo for r in self.rects])[None, :]
        hi = np.array([r.yhi for r in self.rects])[None, :]
        return (xs <= xm) & (lo <= ys) & (ys <= hi)

    def covering_problem(self) -> CoverProblem:
        return CoverProblem(
            [r.id for r in self.rects],
            np.array([r.weight for r in self.rects]),
            self.incidence().astype(np.int64),
            np.array([p.demand for p in self.points], dtype=np.int64),
        )

    def frac_vector(self) -> np.ndarray:
        return np.array([self.frac.get(r.id, 0.0) for r in self.rects], dtype=float)

    def fractional_cost(self) -> float:
        return float(sum(r.weight * self.frac.get(r.id, 0.0) for r in self.rects))

    @property
    def max_demand(self) -> int:
        return max((p.demand for p in self.points), default=0)

    def restrict(self, points, rect_ids, scale: float = 1.0) -> "R2mInstance":
        keep = set(rect_ids)
        rects = [r for r in self.rects if r.id in keep]
        frac = {r.id: self.frac.get(r.id, 0.0) * scale for r in rects}
        return R2mInstance(list(points), rects, frac, self.level)


def build_r2m(rc: ResidualClassified, level: int) -> R2mInstance:
    r2c = rc.r2c
    rect_idx = [j for j in rc.scaled if rc.rect_class(j) == level]
    points = []
    for i in rc.light:
        mass = sum(rc.scaled[j] for j in rc.residual_coverers(i) if rc.rect_class(j) == level)
        demand = math.floor(mass + FLOOR_TOL)
        if demand >= 1:
            p = r2c.points[i]
            points.append(R2mPoint(p.id, p.x, p.y, demand))
    rects = [r2c.rects[j] for j in sorted(rect_idx)]
    frac = {r2c.rects[j].id: rc.scaled[j] for j in rect_idx}
    return R2mInstance(points, rects, frac, level)


def cap_demands(r2m: R2mInstance, rng, c: float = DEMAND_CAP_CONSTANT, max_trials: int = MAX_TRIALS):
    """Pick each set with probability ``min(1, 2x)`` until high demands are met.

    Elements whose demand reaches ``c ln m`` must be fully covered by the picks;
    otherwise the sample is redrawn. Returns ``(picked ids, residual instance,
    trials used)``.
    """
    rng = np.random.default_rng(rng)
    m = len(r2m.points)
    if m == 0:
        return frozenset(), r2m.restrict([], [r.id for r in r2m.rects]), 0
    threshold = c * math.log(m)
    inc = r2m.incidence()
    demand = np.array([p.demand for p in r2m.points])
    prob = np.minimum(1.0, 2 * r2m.frac_vector())
    must = demand >= threshold
    for trial in range(1, max_trials + 1):
        pick = rng.random(len(r2m.rects)) < prob
        got = inc.astype(np.int64) @ pick.astype(np.int64)
        if np.all(got[must] >= demand[must]):
            break
    else:
        raise RoundingError(f"demand capping failed {max_trials} times")
    residual = demand - got
    points = [
        R2mPoint(p.id, p.x, p.y, int(r)) for p, r in zip(r2m.points, residual) if r > 0
    ]
    picked = frozenset(r.id for r, k in zip(r2m.rects, pick) if k)
    rest = [r.id for r in r2m.rects if r.id not in picked]
    return picked, r2m.restrict(points, rest), trial


def local_ratio_cover(r2m: R2mInstance, duals: Optional[list] = None) -> Cover:
    """Local-ratio cover of unit-demand points by y-anchored rectangles.

    Repeatedly takes the rightmost uncovered point, charges the cheapest
    residual weight of its coverers to all of them, and tentatively takes every
    set whose residual weight drops to zero. On the way back each level's sets
    are deleted in reverse pick order while the level's points stay covered,
    leaving at most two coverers of each charged point. The charges, appended
    to ``duals`` when given, form a feasible dual, so the cover weighs at most
    twice the fractional optimum.
    """
    inc = r2m.incidence()
    need = [i for i, p in enumerate(r2m.points) if p.demand > 0]
    if any(r2m.points[i].demand > 1 for i in need):
        raise ValueError("local-ratio cover expects unit demands")
    for i in need:
        if not inc[i].any():
            raise InfeasibleCoverError(f"point {r2m.points[i].id} has no covering rectangle")
    w = [r.weight for r in r2m.rects]
    taken = np.zeros(len(r2m.rects), dtype=bool)
    uncovered = set(need)
    levels = []
    rightmost = lambda i: (r2m.points[i].x, r2m.points[i].y, r2m.points[i].id)
    while uncovered:
        p = max(uncovered, key=rightmost)
        cov = [j for j in np.flatnonzero(inc[p]) if not taken[j]]
        z = min(w[j] for j in cov)
        for j in cov:
            w[j] -= z
        if duals is not None:
            duals.append(z)
        grab = [j for j in range(len(w)) if not taken[j] and w[j] <= 0]
        levels.append((frozenset(uncovered), grab))
        taken[grab] = True
        uncovered -= set(np.flatnonzero(inc[:, grab].any(axis=1)).tolist())

    chosen = np.zeros(len(r2m.rects), dtype=bool)
    for pts, grab in reversed(levels):
        chosen[grab] = True
        rows = inc[sorted(pts)]
        for j in reversed(grab):
            chosen[j] = False
            if not rows[:, chosen].any(axis=1).all():
                chosen[j] = True
    return Cover.of([r2m.rects[j].id for j in np.flatnonzero(chosen)], "light")


@dataclass
class RoundsAudit:
    costs: list = field(default_factory=list)  # rounder weight per round
    sizes: list = field(default_factory=list)  # |P_r| per round


def multi_cover_rounds(
    r2m: R2mInstance,
    rounder: Callable[[R2mInstance], Cover] = local_ratio_cover,
    audit: Optional[RoundsAudit] = None,
) -> Cover:
    """Multi-cover by ``d`` set-cover rounds.

    Round ``r`` serves the points whose outstanding demand is exactly
    ``d - r + 1``, handing the rounder ``x / (d - r + 1)`` on the sets not yet
    chosen. With an ``alpha``-approximate rounder the total weight stays within
    ``alpha * H_d * cost(x)``.
    """
    inc = r2m.incidence()
    left = np.array([p.demand for p in r2m.points], dtype=np.int64)
    x = r2m.frac_vector()
    chosen = np.zeros(len(r2m.rects), dtype=bool)
    d = r2m.max_demand
    for r in range(1, d + 1):
        level = d - r + 1
        target = np.flatnonzero(left == level)
        if len(target) == 0:
            continue
        y = x / level
        reach = inc[target][:, ~chosen] @ y[~chosen]
        if np.any(reach < 1 - 1e-6):
            raise RoundingError(f"round {r}: scaled solution covers a point only {reach.min():.4f}")
        sub = r2m.restrict(
            [R2mPoint(r2m.points[i].id, r2m.points[i].x, r2m.points[i].y, 1) for i in target],
            [rect.id for rect, c in zip(r2m.rects, chosen) if not c],
            1.0 / level,
        )
        got = rounder(sub)
        idx = [r2m._index[rid] for rid in got.ids]
        chosen[idx] = True
        left = np.maximum(0, np.array([p.demand for p in r2m.points]) - inc[:, chosen].sum(axis=1))
        if audit is not None:
            audit.costs.append(sum(r2m.rects[j].weight for j in idx))
            audit.sizes.append(len(target))
    if np.any(left > 0):
        raise RoundingError("multi-cover rounds left demand unmet")
    return Cover.of([r2m.rects[j].id for j in np.flatnonzero(chosen)], "light")


def harmonic(d: int) -> float:
    return float(sum(Fraction(1, k) for k in range(1, d + 1)))


@dataclass
class ClassAudit:
    level: int
    points: int
    max_demand: int
    fractional_cost: float
    capped_weight: int
    capped_trials: int
    round_costs: list
    weight: int


def solve_r2m(r2m: R2mInstance, seed) -> tuple[Cover, ClassAudit]:
    picked, rest, trials = cap_demands(r2m, seed)
    audit = RoundsAudit()
    rounds = multi_cover_rounds(rest, local_ratio_cover, audit)
    cover = Cover.of(picked | rounds.ids, f"light:{r2m.level}")
    info = ClassAudit(
        level=r2m.level,
        points=len(r2m.points),
        max_demand=r2m.max_demand,
        fractional_cost=r2m.fractional_cost(),
        capped_weight=sum(r2m.rect(i).weight for i in picked),
        capped_trials=trials,
        round_costs=audit.costs,
        weight=sum(r2m.rect(i).weight for i in cover.ids),
    )
    return cover, info


def merge_light_covers(rc: ResidualClassified, covers: Sequence[Cover]) -> Cover:
    merged = Cover()
    for c in covers:
        merged = merged.union(c)
    idx = {rc.r2c.rects[j].id: j for j in range(len(rc.r2c.rects))}
    chosen = {idx[i] for i in merged.ids}
    for i in rc.light:
        got = sum(rc.capacity[j] for j in rc.residual_coverers(i) if j in chosen)
        if got < rc.demand[i]:
            raise RoundingError(
                f"light point {rc.r2c.points[i].id} gets {got} < rounded demand {rc.demand[i]}"
            )
    return merged


def cover_light(rc: ResidualClassified, seed: int = 0, jobs: int = 1) -> tuple[Cover, list]:
    if rc.beta > BETA:
        raise ValueError(f"beta {rc.beta} exceeds 1/12; light coverage is not guaranteed")
    levels = sorted({rc.rect_class(j) for j in rc.scaled})
    instances = [build_r2m(rc, lv) for lv in levels]
    seeds = [np.random.SeedSequence([seed, lv]) for lv in levels]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            results = list(pool.map(solve_r2m, instances, seeds))
    else:
        results = [solve_r2m(b, s) for b, s in zip(instances, seeds)]
    merged = merge_light_covers(rc, [c for c, _ in results])
    return merged, [a for _, a in results]
