"""Reduction from scheduling to capacitated cover by y-anchored rectangles.

Each job ``j`` and nonempty class ``k`` yields a rectangle ``[0, r_j] x I_k^j``
with capacity ``p_j`` and weight ``2^k - 1``. Each window ``[t1, t2]`` over the
breakpoint set yields a point at ``(t1, t2 + 1)`` whose demand is the work
released inside the window that cannot fit into its ``t2 - t1`` slots.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional

import numpy as np

from .exact import CoverProblem
from .gsp import (
    GspInstance,
    Schedule,
    check_schedule,
    class_intervals,
    class_of_time,
    cumulative_cost,
    edf_schedule,
)


class ReductionError(AssertionError):
    """A guarantee of the reduction failed; this is a bug, never an input problem."""


@dataclass(frozen=True)
class R2cPoint:
    x: int
    y: int
    demand: int
    window: tuple[int, int] = (0, 0)

    @property
    def id(self) -> str:
        return f"{self.x},{self.y}"


@dataclass(frozen=True)
class R2cRect:
    id: str
    xmax: int
    ylo: int
    yhi: int
    capacity: int
    weight: int
    job: Optional[str] = None
    k: Optional[int] = None

    def covers(self, x, y) -> bool:
        return x <= self.xmax and self.ylo <= y <= self.yhi


@dataclass(frozen=True)
class R2cInstance:
    points: tuple[R2cPoint, ...]
    rects: tuple[R2cRect, ...]

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        object.__setattr__(self, "rects", tuple(self.rects))
        ids = [r.id for r in self.rects]
        if len(set(ids)) != len(ids):
            raise ValueError("rectangle ids must be unique")
        object.__setattr__(self, "_index", {r.id: i for i, r in enumerate(self.rects)})

    @property
    def m(self) -> int:
        return len(self.points)

    def rect(self, rid: str) -> R2cRect:
        return self.rects[self._index[rid]]

    def index(self, rid: str) -> int:
        return self._index[rid]

    def incidence(self) -> np.ndarray:
        """Boolean matrix, ``[i, j]`` true when rectangle ``j`` covers point ``i``."""
        cached = self.__dict__.get("_incidence")
        if cached is None:
            xs = np.array([p.x for p in self.points], dtype=np.int64)[:, None]
            ys = np.array([p.y for p in self.points], dtype=np.int64)[:, None]
            xm = np.array([r.xmax for r in self.rects], dtype=np.int64)[None, :]
            lo = np.array([r.ylo for r in self.rects], dtype=np.int64)[None, :]
            hi = np.array([r.yhi for r in self.rects], dtype=np.int64)[None, :]
            cached = (xs <= xm) & (lo <= ys) & (ys <= hi)
            cached = cached.reshape(len(self.points), len(self.rects))
            object.__setattr__(self, "_incidence", cached)
        return cached

    def coverers(self, i: int) -> list[int]:
        return np.flatnonzero(self.incidence()[i]).tolist()

    def covering_problem(self):
        cap = np.array([r.capacity for r in self.rects], dtype=np.int64)
        return CoverProblem(
            [r.id for r in self.rects],
            np.array([r.weight for r in self.rects], dtype=np.int64),
            self.incidence().astype(np.int64) * cap[None, :],
            np.array([p.demand for p in self.points], dtype=np.int64),
        )


@dataclass(frozen=True)
class Cover:
    """A set of chosen rectangle ids, with the stage that chose each one."""

    ids: frozenset = frozenset()
    origin: dict = field(default_factory=dict, compare=False)

    @classmethod
    def of(cls, ids: Iterable[str], stage: str = "") -> "Cover":
        ids = frozenset(ids)
        return cls(ids, {i: stage for i in ids})

    def union(self, other: "Cover") -> "Cover":
        origin = dict(other.origin)
        origin.update(self.origin)
        return Cover(self.ids | other.ids, origin)

    def weight(self, inst) -> int:
        return sum(inst.rect(i).weight for i in self.ids)

    def __len__(self):
        return len(self.ids)

    def __contains__(self, rid):
        return rid in self.ids


@dataclass
class CoverReport:
    feasible: bool
    weight: int
    slack: list[int]
    witness: Optional[R2cPoint] = None
    unknown: list[str] = field(default_factory=list)


def breakpoints(instance: GspInstance) -> list[int]:
    ts = {j.release for j in instance.jobs}
    for job in instance.jobs:
        for lo, hi in class_intervals(instance, job.id).values():
            ts.update((lo, hi, lo + 1, hi + 1))
    return sorted(t for t in ts if 1 <= t <= instance.horizon)


def reduce_to_r2c(instance: GspInstance) -> R2cInstance:
    ts = breakpoints(instance)
    points = []
    for a, t1 in enumerate(ts):
        for t2 in ts[a:]:
            released = sum(j.size for j in instance.jobs if t1 <= j.release <= t2)
            demand = released - (t2 - t1)
            if demand > 0:
                points.append(R2cPoint(t1, t2 + 1, demand, (t1, t2)))
    points.sort(key=lambda p: (p.x, p.y))
    rects = []
    for job in sorted(instance.jobs, key=lambda j: j.id):
        for k, (lo, hi) in sorted(class_intervals(instance, job.id).items()):
            rects.append(
                R2cRect(f"{job.id}:{k}", job.release, lo, hi, job.size, 2**k - 1, job.id, k)
            )
    return R2cInstance(tuple(points), tuple(rects))


def verify_cover(r2c: R2cInstance, cover: Cover) -> CoverReport:
    unknown = sorted(i for i in cover.ids if i not in r2c._index)
    chosen = np.zeros(len(r2c.rects), dtype=np.int64)
    for rid in cover.ids:
        if rid in r2c._index:
            chosen[r2c.index(rid)] = 1
    cap = np.array([r.capacity for r in r2c.rects], dtype=np.int64)
    supplied = r2c.incidence().astype(np.int64) @ (cap * chosen) if r2c.points else []
    slack = [int(s) - p.demand for s, p in zip(supplied, r2c.points)]
    witness = next((p for p, s in zip(r2c.points, slack) if s < 0), None)
    weight = sum(r2c.rect(i).weight for i in cover.ids if i in r2c._index)
    return CoverReport(witness is None and not unknown, weight, slack, witness, unknown)


def cover_from_schedule(instance: GspInstance, schedule: Schedule) -> Cover:
    """Pick every nonempty class up to the one each job finishes in."""
    check_schedule(instance, schedule)
    done = schedule.completions
    ids = []
    for job in instance.jobs:
        top = class_of_time(instance, job.id, done[job.id])
        ids.extend(f"{job.id}:{k}" for k in class_intervals(instance, job.id) if k <= top)
    return Cover.of(ids, "schedule")


def deadlines_from_cover(
    instance: GspInstance, r2c: R2cInstance, cover: Cover
) -> dict[str, int]:
    top: dict[str, int] = {}
    for rid in cover.ids:
        rect = r2c.rect(rid)
        if rect.job is not None:
            top[rect.job] = max(top.get(rect.job, -1), rect.k)
    deadlines = {}
    for job in instance.jobs:
        if job.id in top:
            deadlines[job.id] = class_intervals(instance, job.id)[top[job.id]][1]
        else:
            deadlines[job.id] = instance.horizon
    return deadlines


def schedule_from_cover(instance: GspInstance, r2c: R2cInstance, cover: Cover) -> Schedule:
    """EDF schedule against deadlines read off the highest chosen class per job.

    The cover must be feasible; an EDF failure then means the reduction itself
    is unsound and surfaces as :class:`~geosched.gsp.DeadlineInfeasibleError`.
    """
    report = verify_cover(r2c, cover)
    if not report.feasible:
        raise ValueError(f"cover is infeasible at point {report.witness}")
    deadlines = deadlines_from_cover(instance, r2c, cover)
    chosen_jobs = {r2c.rect(i).job for i in cover.ids}
    for job in instance.jobs:
        if job.id not in chosen_jobs and cumulative_cost(instance, job.id, instance.horizon):
            raise ReductionError(f"feasible cover leaves costly job {job.id} unforced")
    return edf_schedule(instance, deadlines)
