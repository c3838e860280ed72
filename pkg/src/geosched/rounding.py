"""Threshold picking, residual demands, scaling and power-of-two rounding.

After this step every surviving point is either *heavy* (covered to extent 1
by rectangles whose rounded capacity reaches its rounded demand) or *light*.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .kclp import FracSolution, check_kc_residual
from .reduction import R2cInstance

BETA = Fraction(1, 12)
TOL = 1e-6

HEAVY, LIGHT, SATISFIED = "heavy", "light", "satisfied"


def pow2_up(v: int) -> int:
    return 1 << (v - 1).bit_length()


def pow2_down(v: int) -> int:
    return 1 << (v.bit_length() - 1)


@dataclass
class ResidualClassified:
    r2c: R2cInstance
    beta: Fraction
    picked: frozenset  # rectangle indices with x_r >= beta
    residual: list  # per point, d_p - c(S_p)
    demand: dict  # surviving point -> d'_p
    capacity: list  # per rectangle, c'_r
    scaled: dict  # rectangle index outside S -> x_r / beta
    lp_value: float
    labels: list = field(default_factory=list)

    def point_class(self, i: int) -> int:
        return self.demand[i].bit_length() - 1

    def rect_class(self, j: int) -> int:
        return self.capacity[j].bit_length() - 1

    def residual_coverers(self, i: int) -> list[int]:
        return [j for j in self.r2c.coverers(i) if j not in self.picked]

    def picked_weight(self) -> int:
        return sum(self.r2c.rects[j].weight for j in self.picked)

    @property
    def heavy(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == HEAVY]

    @property
    def light(self) -> list[int]:
        return [i for i, lab in enumerate(self.labels) if lab == LIGHT]

    def rounded_mass(self, i: int) -> float:
        """Left side of the scaled, rounded knapsack-cover inequality at point ``i``."""
        d = self.demand[i]
        return sum(min(self.capacity[j], d) * self.scaled[j] for j in self.residual_coverers(i))


def preprocess(r2c: R2cInstance, sol: FracSolution, beta=BETA) -> ResidualClassified:
    beta = Fraction(beta).limit_denominator(10**9)
    report = check_kc_residual(r2c, sol, float(beta))
    if not report.ok():
        raise ValueError(f"solution violates a threshold cut by {-report.min_slack:.3g}")
    x = np.clip(sol.x, 0.0, 1.0)
    picked = frozenset(np.flatnonzero(x >= float(beta)).tolist())
    caps = [r.capacity for r in r2c.rects]
    residual = [
        p.demand - sum(caps[j] for j in r2c.coverers(i) if j in picked)
        for i, p in enumerate(r2c.points)
    ]
    scale = float(1 / beta)
    rc = ResidualClassified(
        r2c=r2c,
        beta=beta,
        picked=picked,
        residual=residual,
        demand={i: pow2_up(res) for i, res in enumerate(residual) if res > 0},
        capacity=[pow2_down(c) for c in caps],
        scaled={j: float(x[j]) * scale for j in range(len(caps)) if j not in picked},
        lp_value=sol.objective,
    )
    rc.labels = classify(rc)
    return rc


def classify(rc: ResidualClassified) -> list[str]:
    """Label each point heavy, light or satisfied.

    Light points are checked against the low-class mass bound
    ``sum c'_r x'_r >= ((1 - 4 beta) / (4 beta)) d'_p`` over ``c'_r <= d'_p``.
    """
    factor = float((1 - 4 * rc.beta) / (4 * rc.beta))
    labels = []
    for i in range(rc.r2c.m):
        if i not in rc.demand:
            labels.append(SATISFIED)
            continue
        d = rc.demand[i]
        cov = rc.residual_coverers(i)
        high = sum(rc.scaled[j] for j in cov if rc.capacity[j] >= d)
        if high >= 1 - 1e-9:
            labels.append(HEAVY)
            continue
        low = sum(rc.capacity[j] * rc.scaled[j] for j in cov if rc.capacity[j] <= d)
        assert low >= factor * d - TOL, f"light point {i}: low-class mass {low} < {factor * d}"
        labels.append(LIGHT)
    return labels
