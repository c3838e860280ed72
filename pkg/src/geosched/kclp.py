"""Covering LP strengthened with knapsack-cover cuts, solved by cutting planes.

Separation only looks at the threshold set ``S_p = {r covers p : x_r >= beta}``
for each point; those are the only cuts the rounding step relies on.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .lp import LpInfeasibleError, solve_covering_lp
from .reduction import R2cInstance

log = logging.getLogger(__name__)

EPS_LP = 1e-7


class CuttingPlaneError(RuntimeError):
    def __init__(self, pool_size: int, max_violation: float, msg: str = "iteration cap exceeded"):
        self.pool_size = pool_size
        self.max_violation = max_violation
        super().__init__(f"{msg} (pool {pool_size}, max violation {max_violation:.3g})")


@dataclass(frozen=True)
class KcConstraint:
    point: int
    chosen: frozenset  # rectangle indices committed in S
    coefficients: dict  # rectangle index -> min(c_r, rhs)
    rhs: int

    def lhs(self, x: np.ndarray) -> float:
        return float(sum(c * x[j] for j, c in self.coefficients.items()))


@dataclass
class FracSolution:
    ids: list
    x: np.ndarray
    objective: float
    pool: list = field(default_factory=list, repr=False)
    history: list = field(default_factory=list)

    def value(self, rid: str) -> float:
        return float(min(1.0, max(0.0, self.x[self.ids.index(rid)])))

    def as_dict(self) -> dict:
        return {rid: float(min(1.0, max(0.0, v))) for rid, v in zip(self.ids, self.x)}


def kc_constraint(r2c: R2cInstance, i: int, chosen) -> KcConstraint:
    caps = [r.capacity for r in r2c.rects]
    chosen = frozenset(chosen)
    rhs = r2c.points[i].demand - sum(caps[j] for j in chosen)
    coeffs = {j: min(caps[j], max(0, rhs)) for j in r2c.coverers(i) if j not in chosen}
    return KcConstraint(i, chosen, coeffs, rhs)


def threshold_set(r2c: R2cInstance, i: int, x: np.ndarray, beta: float) -> frozenset:
    return frozenset(j for j in r2c.coverers(i) if x[j] >= beta)


def solve_kc_lp(r2c: R2cInstance, beta=1 / 12, eps: float = EPS_LP, max_iter=None) -> FracSolution:
    beta = float(beta)
    if not 0 < beta < 1:
        raise ValueError(f"beta must lie in (0, 1), got {beta}")
    m, n = r2c.m, len(r2c.rects)
    w = np.array([r.weight for r in r2c.rects], dtype=float)
    inc = r2c.incidence()
    caps = np.array([r.capacity for r in r2c.rects], dtype=float)
    rows = [inc[i] * caps for i in range(m)]
    rhs = [float(p.demand) for p in r2c.points]
    if m and np.any(inc.astype(float) @ caps < rhs):
        raise LpInfeasibleError("instance is infeasible even with every rectangle")

    seen: set = set()
    pool: list[KcConstraint] = []
    history: list[float] = []
    cap = max_iter if max_iter is not None else 50 * max(m, 1)
    for _ in range(cap):
        try:
            lp = solve_covering_lp(w, np.array(rows).reshape(-1, n), rhs)
        except LpInfeasibleError as exc:
            raise AssertionError(f"covering LP infeasible despite all-ones solution: {exc}")
        history.append(lp.value)
        x = lp.x
        worst, added = 0.0, 0
        for i in range(m):
            cut = kc_constraint(r2c, i, threshold_set(r2c, i, x, beta))
            if cut.rhs <= 0:
                continue
            violation = cut.rhs - cut.lhs(x)
            if violation <= eps:
                continue
            worst = max(worst, violation)
            key = (i, cut.chosen)
            if key in seen:
                continue
            seen.add(key)
            pool.append(cut)
            row = np.zeros(n)
            for j, c in cut.coefficients.items():
                row[j] = c
            rows.append(row)
            rhs.append(float(cut.rhs))
            added += 1
        if worst == 0.0:
            log.debug("KC loop done after %d rounds, %d cuts", len(history), len(pool))
            return FracSolution([r.id for r in r2c.rects], x, lp.value, pool, history)
        if added == 0:
            raise CuttingPlaneError(len(pool), worst, "violated cuts already in pool")
    raise CuttingPlaneError(len(pool), worst)


@dataclass
class ResidualReport:
    slack: list  # per point; None where S_p already meets the demand
    min_slack: float

    def ok(self, tol: float = 1e-6) -> bool:
        return self.min_slack >= -tol


def check_kc_residual(r2c: R2cInstance, sol: FracSolution, beta=1 / 12) -> ResidualReport:
    x = np.clip(sol.x, 0.0, 1.0)
    slack = []
    for i in range(r2c.m):
        cut = kc_constraint(r2c, i, threshold_set(r2c, i, x, float(beta)))
        slack.append(None if cut.rhs <= 0 else cut.lhs(x) - cut.rhs)
    live = [s for s in slack if s is not None]
    return ResidualReport(slack, min(live) if live else 0.0)


def pool_to_json(r2c: R2cInstance, sol: FracSolution) -> dict:
    return {
        "objective": sol.objective,
        "history": sol.history,
        "solution": sol.as_dict(),
        "cuts": [
            {
                "point": r2c.points[c.point].id,
                "chosen": sorted(r2c.rects[j].id for j in c.chosen),
                "coefficients": {r2c.rects[j].id: v for j, v in sorted(c.coefficients.items())},
                "rhs": c.rhs,
            }
            for c in sol.pool
        ],
    }
