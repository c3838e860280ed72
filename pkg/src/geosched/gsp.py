"""Preemptive single-machine scheduling with monotone completion costs.

Time is discrete: slot ``t`` is the unit interval ``(t-1, t]``. A job released
at ``r`` may run in any slot ``t >= r + 1`` and completes at the index of its
last slot, so finishing job ``j`` at ``t`` costs ``sum(w_j(s) for s in
r+1..t)``.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from typing import Mapping, Optional, Union


class InvalidInstanceError(ValueError):
    """Raised when an instance or weight function violates its invariants."""


class InfeasibleScheduleError(ValueError):
    """Raised for a schedule that breaks a slot invariant."""


class DeadlineInfeasibleError(ValueError):
    """No preemptive schedule meets the deadlines.

    ``witness`` is a slot window ``(s, t)`` such that the jobs released at or
    after ``s`` with deadline at most ``t`` need more than ``t - s`` slots.
    """

    def __init__(self, witness: tuple[int, int], demand: int):
        self.witness = witness
        self.demand = demand
        s, t = witness
        super().__init__(
            f"Hall condition fails on [{s}, {t}]: {demand} units due in {t - s} slots"
        )


@dataclass(frozen=True)
class Constant:
    w: int
    kind = "constant"

    def __post_init__(self):
        if self.w < 1:
            raise InvalidInstanceError(f"constant weight must be positive, got {self.w}")

    def increment(self, release: int, t: int) -> int:
        return self.w

    def cumulative(self, release: int, t: int) -> int:
        return self.w * (t - release)


@dataclass(frozen=True)
class DeadlineStep:
    """Zero until the deadline ``d``, then ``w`` per slot (weighted tardiness)."""

    d: int
    w: int
    kind = "deadline"

    def __post_init__(self):
        if self.w < 1:
            raise InvalidInstanceError(f"tardiness weight must be positive, got {self.w}")

    def increment(self, release: int, t: int) -> int:
        return self.w if t > self.d else 0

    def cumulative(self, release: int, t: int) -> int:
        return self.w * max(0, t - max(self.d, release))


@dataclass(frozen=True)
class SquaredFlow:
    kind = "squared_flow"

    def increment(self, release: int, t: int) -> int:
        return 2 * (t - release) - 1

    def cumulative(self, release: int, t: int) -> int:
        return (t - release) ** 2


@dataclass(frozen=True)
class Table:
    """Step function of per-slot increments.

    ``steps`` holds ``(time, value)`` breakpoints; the increment at slot ``s``
    is the value of the last breakpoint with ``time <= s`` (0 before the first).
    """

    steps: tuple[tuple[int, int], ...]
    kind = "table"

    def __post_init__(self):
        steps = tuple((int(t), int(v)) for t, v in sorted(self.steps))
        times = [t for t, _ in steps]
        if len(set(times)) != len(times):
            raise InvalidInstanceError("table breakpoints must have distinct times")
        if any(v < 0 for _, v in steps):
            raise InvalidInstanceError("table increments must be nonnegative")
        object.__setattr__(self, "steps", steps)

    def increment(self, release: int, t: int) -> int:
        i = bisect.bisect_right([s for s, _ in self.steps], t) - 1
        return self.steps[i][1] if i >= 0 else 0

    def cumulative(self, release: int, t: int) -> int:
        total = 0
        lo = release + 1
        for i, (start, value) in enumerate(self.steps):
            end = self.steps[i + 1][0] - 1 if i + 1 < len(self.steps) else t
            a, b = max(lo, start), min(t, end)
            if a <= b:
                total += value * (b - a + 1)
        return total


WeightFunction = Union[Constant, DeadlineStep, SquaredFlow, Table]


@dataclass(frozen=True)
class Job:
    id: str
    release: int
    size: int
    weight: WeightFunction

    def __post_init__(self):
        if self.release < 1:
            raise InvalidInstanceError(f"job {self.id}: release must be >= 1")
        if self.size < 1:
            raise InvalidInstanceError(f"job {self.id}: size must be >= 1")


@dataclass(frozen=True)
class GspInstance:
    jobs: tuple[Job, ...]
    horizon: int = 0

    def __post_init__(self):
        jobs = tuple(self.jobs)
        object.__setattr__(self, "jobs", jobs)
        if not jobs:
            raise InvalidInstanceError("instance needs at least one job")
        ids = [j.id for j in jobs]
        if len(set(ids)) != len(ids):
            raise InvalidInstanceError("job ids must be unique")
        floor = max(j.release for j in jobs) + sum(j.size for j in jobs)
        if self.horizon == 0:
            object.__setattr__(self, "horizon", floor)
        elif self.horizon < floor:
            raise InvalidInstanceError(f"horizon {self.horizon} below {floor}")
        object.__setattr__(self, "_by_id", {j.id: j for j in jobs})

    @property
    def n(self) -> int:
        return len(self.jobs)

    @property
    def max_size(self) -> int:
        return max(j.size for j in self.jobs)

    def job(self, job_id: str) -> Job:
        try:
            return self._by_id[job_id]
        except KeyError:
            raise KeyError(f"unknown job {job_id!r}") from None


@dataclass(frozen=True)
class Schedule:
    """Assignment of slots to job ids; slots absent from the map are idle."""

    slots: Mapping[int, str] = field(default_factory=dict)

    @property
    def completions(self) -> dict[str, int]:
        done: dict[str, int] = {}
        for t, j in self.slots.items():
            done[j] = max(done.get(j, 0), t)
        return done

    def slots_of(self, job_id: str) -> list[int]:
        return sorted(t for t, j in self.slots.items() if j == job_id)


def cumulative_cost(instance: GspInstance, job_id: str, t: int) -> int:
    job = instance.job(job_id)
    if t < job.release:
        raise ValueError(f"time {t} precedes release {job.release} of job {job_id}")
    return job.weight.cumulative(job.release, t)


def _first_time_at_least(instance: GspInstance, job: Job, cost: int) -> int:
    """Smallest t in (r_j, T_H] with cumulative cost >= ``cost`` (T_H + 1 if none)."""
    lo, hi = job.release + 1, instance.horizon + 1
    while lo < hi:
        mid = (lo + hi) // 2
        if job.weight.cumulative(job.release, mid) >= cost:
            hi = mid
        else:
            lo = mid + 1
    return lo


def class_interval(instance: GspInstance, job_id: str, k: int) -> Optional[tuple[int, int]]:
    """Closed slot interval where finishing ``job_id`` costs in ``[2^(k-1), 2^k - 1]``.

    Class 0 collects the zero-cost completion times. Returns ``None`` when the
    class is empty within ``(r_j, T_H]``.
    """
    if k < 0:
        raise ValueError("class index must be nonnegative")
    job = instance.job(job_id)
    if k == 0:
        lo, hi = job.release + 1, _first_time_at_least(instance, job, 1) - 1
    else:
        lo = _first_time_at_least(instance, job, 2 ** (k - 1))
        hi = _first_time_at_least(instance, job, 2**k) - 1
    if lo > hi:
        return None
    return lo, hi


def class_of_time(instance: GspInstance, job_id: str, t: int) -> int:
    cost = cumulative_cost(instance, job_id, t)
    return cost.bit_length()


def class_intervals(instance: GspInstance, job_id: str) -> dict[int, tuple[int, int]]:
    """All nonempty class intervals of a job, keyed by class."""
    top = class_of_time(instance, job_id, instance.horizon)
    out = {}
    for k in range(top + 1):
        iv = class_interval(instance, job_id, k)
        if iv is not None:
            out[k] = iv
    return out


def check_schedule(instance: GspInstance, schedule: Schedule) -> None:
    """Raise :class:`InfeasibleScheduleError` naming the first violated rule."""
    counts = {j.id: 0 for j in instance.jobs}
    for t in sorted(schedule.slots):
        j = schedule.slots[t]
        if j not in counts:
            raise InfeasibleScheduleError(f"slot {t} runs unknown job {j!r}")
        if not 1 <= t <= instance.horizon:
            raise InfeasibleScheduleError(f"slot {t} outside [1, {instance.horizon}]")
        if t < instance.job(j).release + 1:
            raise InfeasibleScheduleError(f"job {j} runs in slot {t} before its release")
        counts[j] += 1
    for job in instance.jobs:
        if counts[job.id] != job.size:
            raise InfeasibleScheduleError(
                f"job {job.id} gets {counts[job.id]} slots, needs {job.size}"
            )


def schedule_cost(instance: GspInstance, schedule: Schedule) -> int:
    check_schedule(instance, schedule)
    done = schedule.completions
    return sum(cumulative_cost(instance, j.id, done[j.id]) for j in instance.jobs)


def hall_witness(
    instance: GspInstance, deadlines: Mapping[str, int]
) -> Optional[tuple[tuple[int, int], int]]:
    """Return ``((s, t), demand)`` for an overloaded window, or ``None``.

    Windows range over ``s`` in release times and ``t`` in deadlines, which is
    enough for the Hall condition of preemptive unit-slot scheduling.
    """
    releases = sorted({j.release for j in instance.jobs})
    ends = sorted({deadlines[j.id] for j in instance.jobs})
    for s in releases:
        for t in ends:
            if t < s:
                continue
            due = sum(
                j.size for j in instance.jobs if j.release >= s and deadlines[j.id] <= t
            )
            if due > t - s:
                return (s, t), due
    return None


def edf_schedule(instance: GspInstance, deadlines: Mapping[str, int]) -> Schedule:
    """Earliest-deadline-first schedule; raises with a Hall witness if infeasible."""
    for job in instance.jobs:
        if deadlines[job.id] < job.release + job.size:
            raise DeadlineInfeasibleError((job.release, deadlines[job.id]), job.size)
    remaining = {j.id: j.size for j in instance.jobs}
    slots: dict[int, str] = {}
    last = max(deadlines[j.id] for j in instance.jobs)
    t = min(j.release for j in instance.jobs)
    while any(remaining.values()) and t < last:
        t += 1
        ready = [
            j for j in instance.jobs if remaining[j.id] and j.release <= t - 1
        ]
        if not ready:
            continue
        pick = min(ready, key=lambda j: (deadlines[j.id], j.id))
        if deadlines[pick.id] < t:
            break
        slots[t] = pick.id
        remaining[pick.id] -= 1
    late = any(remaining.values()) or any(
        slots_t > deadlines[j] for slots_t, j in slots.items()
    )
    if late:
        found = hall_witness(instance, deadlines)
        # EDF is optimal for this problem, so a miss always has a witness.
        assert found is not None, "EDF missed a deadline without a Hall violation"
        raise DeadlineInfeasibleError(*found)
    return Schedule(slots)
