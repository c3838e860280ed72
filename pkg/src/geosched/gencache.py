"""Identical release times: the generalized caching (interval cover) special case."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .exact import CoverProblem
from .gsp import GspInstance, class_intervals
from .reduction import breakpoints


@dataclass(frozen=True)
class CacheInterval:
    id: str
    start: int
    end: int
    size: int
    weight: int

    def __contains__(self, t: int) -> bool:
        return self.start <= t <= self.end


@dataclass
class CachingInstance:
    demands: dict  # time -> demand
    intervals: Sequence[CacheInterval]

    def times(self) -> list[int]:
        return sorted(self.demands)

    def covering_problem(self) -> CoverProblem:
        ts = self.times()
        return CoverProblem(
            [iv.id for iv in self.intervals],
            np.array([iv.weight for iv in self.intervals], dtype=np.int64),
            np.array([[iv.size if t in iv else 0 for iv in self.intervals] for t in ts], dtype=np.int64),
            np.array([self.demands[t] for t in ts], dtype=np.int64),
        )

    def deficits(self, chosen) -> dict:
        return {
            t: d - sum(iv.size for iv in chosen if t in iv) for t, d in self.demands.items()
        }

    def infeasible_at(self):
        full = self.deficits(self.intervals)
        return next((t for t in sorted(full) if full[t] > 0), None)


@dataclass
class CacheSolution:
    ids: frozenset
    weight: int
    dual: Fraction  # value of the dual built while raising
    raises: list = field(default_factory=list)


def from_identical_release(instance: GspInstance) -> CachingInstance:
    """Collapse a common-release instance onto the timeline of elapsed slots.

    Time ``t`` stands for finishing by slot ``r + t``; its demand ``D - t`` is
    the work that must still be pending then. Interval spans are shifted the
    same way, so a class interval ``[a, b]`` becomes ``[a - r - 1, b - r - 1]``.
    """
    releases = {j.release for j in instance.jobs}
    if len(releases) != 1:
        raise ValueError("release times are not identical")
    (r,) = releases
    total = sum(j.size for j in instance.jobs)
    demands = {t - r: max(0, total - (t - r)) for t in breakpoints(instance) if t >= r}
    intervals = []
    for job in sorted(instance.jobs, key=lambda j: j.id):
        for k, (lo, hi) in sorted(class_intervals(instance, job.id).items()):
            intervals.append(CacheInterval(f"{job.id}:{k}", lo - r - 1, hi - r - 1, job.size, 2**k - 1))
    return CachingInstance(demands, intervals)


def primal_dual_cache(inst: CachingInstance) -> CacheSolution:
    """Knapsack-cover primal-dual with reverse delete.

    While some time is short, the time with the largest deficit (leftmost on
    ties) raises the dual of its knapsack-cover inequality relative to the
    chosen set until an interval covering it becomes tight; that interval is
    chosen. Capacities are truncated to the deficit in the reduced-cost
    bookkeeping. Reverse delete then drops every interval that is no longer
    needed. Any minimal augmentation puts at most twice the deficit on each
    side of the raised time, so the weight is at most four times the dual.
    """
    bad = inst.infeasible_at()
    if bad is not None:
        raise ValueError(f"demand at time {bad} exceeds every interval's capacity")
    reduced = {iv.id: Fraction(iv.weight) for iv in inst.intervals}
    chosen: list[CacheInterval] = []
    dual = Fraction(0)
    raises = []
    while True:
        short = {t: v for t, v in inst.deficits(chosen).items() if v > 0}
        if not short:
            break
        t = min(short, key=lambda s: (-short[s], s))
        delta = short[t]
        cand = [iv for iv in inst.intervals if t in iv and iv not in chosen]
        step = min(reduced[iv.id] / min(iv.size, delta) for iv in cand)
        for iv in cand:
            reduced[iv.id] -= step * min(iv.size, delta)
        dual += step * delta
        raises.append((t, delta, step))
        chosen.append(next(iv for iv in cand if reduced[iv.id] == 0))
    for iv in reversed(list(chosen)):
        rest = [c for c in chosen if c is not iv]
        if all(v <= 0 for v in inst.deficits(rest).values()):
            chosen = rest
    return CacheSolution(
        frozenset(iv.id for iv in chosen), sum(iv.weight for iv in chosen), dual, raises
    )
