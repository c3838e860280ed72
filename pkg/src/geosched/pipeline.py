"""End-to-end solver: reduce, solve the KC-LP, round, cover, reconstruct."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from fractions import Fraction

from .exact import exact_cover_bb
from .gsp import GspInstance, Schedule, schedule_cost
from .heavy import build_r3u, lp_greedy_cover
from .kclp import EPS_LP, FracSolution, solve_kc_lp
from .light import cover_light
from .reduction import Cover, R2cInstance, reduce_to_r2c, schedule_from_cover, verify_cover
from .rounding import BETA, ResidualClassified, preprocess


class PipelineError(AssertionError):
    def __init__(self, stage: str, detail: str):
        self.stage = stage
        super().__init__(f"[{stage}] {detail}")


@dataclass
class PipelineResult:
    instance: GspInstance
    r2c: R2cInstance
    lp: FracSolution
    rc: ResidualClassified
    heavy: Cover
    light: Cover
    cover: Cover
    cover_weight: int
    schedule: Schedule
    schedule_cost: int
    class_audits: list = field(default_factory=list)
    timings: dict = field(default_factory=dict)


def solve_r2c(r2c: R2cInstance, beta=BETA, seed: int = 0, heavy_solver: str = "greedy", jobs: int = 1):
    """Round the KC-LP of ``r2c`` into an integral cover.

    Returns ``(cover, lp, rc, heavy, light, class_audits, timings)``.
    """
    timings = {}
    t0 = time.perf_counter()
    lp = solve_kc_lp(r2c, beta, EPS_LP)
    timings["lp"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    rc = preprocess(r2c, lp, beta)
    picked = Cover.of((r2c.rects[j].id for j in rc.picked), "threshold")
    timings["preprocess"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    r3u = build_r3u(rc)
    if heavy_solver == "greedy":
        heavy = lp_greedy_cover(r3u)
    elif heavy_solver == "exact":
        heavy = Cover.of(exact_cover_bb(r3u).ids, "heavy")
    else:
        raise ValueError(f"unknown heavy solver {heavy_solver!r}")
    timings["heavy"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    light, audits = cover_light(rc, seed, jobs)
    timings["light"] = time.perf_counter() - t0

    cover = picked.union(heavy).union(light)
    report = verify_cover(r2c, cover)
    if not report.feasible:
        raise PipelineError("verify", f"cover misses point {report.witness}")
    return cover, lp, rc, heavy, light, audits, timings


def solve(instance: GspInstance, beta=BETA, seed: int = 0, heavy_solver: str = "greedy", jobs: int = 1) -> PipelineResult:
    beta = Fraction(beta).limit_denominator(10**9)
    t0 = time.perf_counter()
    r2c = reduce_to_r2c(instance)
    reduce_time = time.perf_counter() - t0
    cover, lp, rc, heavy, light, audits, timings = solve_r2c(r2c, beta, seed, heavy_solver, jobs)
    timings = {"reduce": reduce_time, **timings}
    t0 = time.perf_counter()
    schedule = schedule_from_cover(instance, r2c, cover)
    cost = schedule_cost(instance, schedule)
    timings["schedule"] = time.perf_counter() - t0
    weight = cover.weight(r2c)
    if cost > weight:
        raise PipelineError("schedule", f"schedule cost {cost} exceeds cover weight {weight}")
    return PipelineResult(
        instance, r2c, lp, rc, heavy, light, cover, weight, schedule, cost, audits, timings
    )
