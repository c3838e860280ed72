"""Exact oracles and end-to-end audits of the solver's guarantees."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional

from .exact import MAX_SETS, OracleCapError, exact_cover_bb
from .gsp import GspInstance, Schedule, cumulative_cost
from .pipeline import solve
from .rounding import BETA

MAX_BRUTE_JOBS = 3
MAX_BRUTE_HORIZON = 14
TOL = 1e-6


class AuditError(AssertionError):
    def __init__(self, stage: str, detail: str):
        self.stage = stage
        super().__init__(f"[{stage}] {detail}")


def brute_force_gsp(instance: GspInstance) -> tuple[int, Schedule]:
    """Optimal schedule by dynamic programming over (slot, remaining work)."""
    if instance.n > MAX_BRUTE_JOBS or instance.horizon > MAX_BRUTE_HORIZON:
        raise OracleCapError(
            f"brute force limited to n <= {MAX_BRUTE_JOBS}, horizon <= {MAX_BRUTE_HORIZON}"
        )
    jobs = instance.jobs
    horizon = instance.horizon

    @lru_cache(maxsize=None)
    def best(t: int, rem: tuple) -> tuple[float, Optional[int]]:
        if not any(rem):
            return 0, None
        if t == horizon:
            return float("inf"), None
        slot = t + 1
        options = [(best(slot, rem)[0], -1)]
        for j, job in enumerate(jobs):
            if rem[j] and job.release <= t:
                nxt = rem[:j] + (rem[j] - 1,) + rem[j + 1 :]
                here = cumulative_cost(instance, job.id, slot) if nxt[j] == 0 else 0
                options.append((here + best(slot, nxt)[0], j))
        return min(options)

    start = tuple(j.size for j in jobs)
    value, _ = best(0, start)
    if value == float("inf"):
        raise AssertionError("no schedule fits the horizon")
    slots = {}
    t, rem = 0, start
    while any(rem):
        _, j = best(t, rem)
        t += 1
        if j >= 0:
            slots[t] = jobs[j].id
            rem = rem[:j] + (rem[j] - 1,) + rem[j + 1 :]
    return int(value), Schedule(slots)


def describe(instance: GspInstance) -> dict:
    kinds = sorted({j.weight.kind for j in instance.jobs})
    return {
        "n": instance.n,
        "max_size": instance.max_size,
        "horizon": instance.horizon,
        "weights": "+".join(kinds),
    }


@dataclass
class RatioReport:
    instance: dict
    seed: int
    points: int
    rects: int
    lp_value: float
    picked_weight: int
    heavy_points: int
    light_points: int
    cover_weight: int
    schedule_cost: int
    opt_gsp: Optional[int] = None
    opt_r2c: Optional[int] = None
    per_seed: dict = field(default_factory=dict)
    ratios: dict = field(default_factory=dict)
    wall: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio(a, b) -> Optional[float]:
    if b is None or a is None:
        return None
    if b == 0:
        return 1.0 if a == 0 else float("inf")
    return a / b


def _check(cond: bool, stage: str, detail: str):
    if not cond:
        raise AuditError(stage, detail)


def audit_pipeline(
    instance: GspInstance,
    seeds: Iterable[int] = (0,),
    beta=BETA,
    heavy_solver: str = "greedy",
    oracles: bool = True,
) -> RatioReport:
    """Run the pipeline once per seed and check every stage's guarantee.

    Oracles run only where their size caps allow. The report describes the
    cheapest run; ``per_seed`` lists every run's schedule cost.
    """
    beta = Fraction(beta).limit_denominator(10**9)
    runs = {}
    for seed in seeds:
        res = solve(instance, beta, seed, heavy_solver)
        rc = res.rc
        _check(res.schedule_cost <= res.cover_weight, "schedule",
               f"cost {res.schedule_cost} > cover weight {res.cover_weight}")
        _check(rc.picked_weight() <= float(1 / beta) * res.lp.objective + TOL, "preprocess",
               f"threshold set weighs {rc.picked_weight()} > {float(1 / beta)} x LP {res.lp.objective}")
        bound = float(1 / (4 * beta))
        for i, d in rc.demand.items():
            _check(rc.rounded_mass(i) >= bound * d - TOL, "preprocess",
                   f"point {rc.r2c.points[i].id}: rounded mass {rc.rounded_mass(i)} < {bound * d}")
        runs[seed] = res

    best_seed = min(runs, key=lambda s: (runs[s].schedule_cost, s))
    res = runs[best_seed]
    wall = dict(res.timings)

    opt_gsp = opt_r2c = None
    if oracles:
        t0 = time.perf_counter()
        try:
            opt_gsp = brute_force_gsp(instance)[0]
        except OracleCapError:
            pass
        if len(res.r2c.rects) <= MAX_SETS:
            opt_r2c = exact_cover_bb(res.r2c).weight
        wall["oracles"] = time.perf_counter() - t0

    lp = res.lp.objective
    if opt_r2c is not None:
        _check(lp <= opt_r2c + TOL, "kc-lp", f"LP {lp} exceeds integral optimum {opt_r2c}")
        _check(res.cover_weight >= opt_r2c, "oracle", "cover beats the exact optimum")
    if opt_gsp is not None:
        _check(min(r.schedule_cost for r in runs.values()) >= opt_gsp, "oracle",
               "schedule beats the brute-force optimum")
    if opt_gsp is not None and opt_r2c is not None:
        _check(opt_gsp <= opt_r2c <= 4 * opt_gsp, "reduction",
               f"sandwich fails: OPT_GSP {opt_gsp}, OPT_R2C {opt_r2c}")

    ratios = {
        "schedule/opt_gsp": _ratio(res.schedule_cost, opt_gsp),
        "cover/lp": _ratio(res.cover_weight, lp),
        "cover/opt_r2c": _ratio(res.cover_weight, opt_r2c),
        "opt_r2c/opt_gsp": _ratio(opt_r2c, opt_gsp),
        "schedule/cover": _ratio(res.schedule_cost, res.cover_weight),
    }
    return RatioReport(
        instance=describe(instance),
        seed=best_seed,
        points=res.r2c.m,
        rects=len(res.r2c.rects),
        lp_value=lp,
        picked_weight=res.rc.picked_weight(),
        heavy_points=len(res.rc.heavy),
        light_points=len(res.rc.light),
        cover_weight=res.cover_weight,
        schedule_cost=res.schedule_cost,
        opt_gsp=opt_gsp,
        opt_r2c=opt_r2c,
        per_seed={str(s): r.schedule_cost for s, r in runs.items()},
        ratios=ratios,
        wall=wall,
    )
