"""Exact minimum-weight covering by LP-bounded branch and bound.

Works on any 0/1 covering program ``min w.x  s.t.  M x >= d`` and is meant as
a verification oracle for small instances only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .lp import LpInfeasibleError, solve_covering_lp

MAX_SETS = 24


class OracleCapError(ValueError):
    """The instance is larger than an exact oracle is allowed to handle."""


class InfeasibleCoverError(ValueError):
    pass


@dataclass
class CoverProblem:
    ids: Sequence[str]
    weights: np.ndarray
    matrix: np.ndarray  # elements x sets
    demands: np.ndarray

    def __post_init__(self):
        self.weights = np.asarray(self.weights)
        self.demands = np.asarray(self.demands)
        self.matrix = np.asarray(self.matrix).reshape(len(self.demands), len(self.ids))

    def feasible(self, chosen: np.ndarray) -> bool:
        return bool(np.all(self.matrix @ chosen >= self.demands))


@dataclass
class ExactResult:
    ids: frozenset
    weight: int
    nodes: int


def as_problem(instance) -> CoverProblem:
    if isinstance(instance, CoverProblem):
        return instance
    return instance.covering_problem()


def exact_cover_bb(instance, max_sets: int = MAX_SETS) -> ExactResult:
    prob = as_problem(instance)
    n = len(prob.ids)
    if n > max_sets:
        raise OracleCapError(f"{n} sets exceeds the exact-cover cap of {max_sets}")
    keep = prob.demands > 0
    M = prob.matrix[keep].astype(float)
    d = prob.demands[keep].astype(float)
    w = prob.weights.astype(float)
    if not np.all(M.sum(axis=1) >= d):
        raise InfeasibleCoverError("some element cannot be covered even by all sets")
    integral_weights = np.all(np.equal(np.mod(w, 1), 0))

    best_x = np.ones(n)
    best = float(w.sum())
    nodes = 0
    stack = [(np.zeros(n), np.ones(n))]
    while stack:
        lo, hi = stack.pop()
        nodes += 1
        try:
            lp = solve_covering_lp(w, M, d, lo, hi)
        except LpInfeasibleError:
            continue
        bound = math.ceil(lp.value - 1e-7) if integral_weights else lp.value - 1e-9
        if bound >= best:
            continue
        x = lp.x
        frac = np.abs(x - np.round(x))
        if frac.max() < 1e-7:
            cand = np.round(x)
            if np.all(M @ cand >= d):
                best, best_x = float(w @ cand), cand
                continue
        free = np.flatnonzero(lo != hi)
        if len(free) == 0:
            continue
        j = free[np.argmax(frac[free])] if frac[free].max() >= 1e-7 else free[0]
        zero_hi = hi.copy()
        zero_hi[j] = 0
        one_lo = lo.copy()
        one_lo[j] = 1
        stack.append((lo, zero_hi))
        stack.append((one_lo, hi))
    ids = frozenset(prob.ids[i] for i in np.flatnonzero(best_x > 0.5))
    weight = int(round(best)) if integral_weights else best
    return ExactResult(ids, weight, nodes)
