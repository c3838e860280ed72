"""Thin LP kernel: ``min w.x`` subject to ``A x >= b`` and box bounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy.optimize import linprog


class LpInfeasibleError(ValueError):
    pass


@dataclass
class LpResult:
    x: np.ndarray
    value: float


def solve_covering_lp(
    weights,
    A,
    b,
    lower: Optional[np.ndarray] = None,
    upper: Optional[np.ndarray] = None,
) -> LpResult:
    w = np.asarray(weights, dtype=float)
    n = len(w)
    lower = np.zeros(n) if lower is None else np.asarray(lower, dtype=float)
    upper = np.ones(n) if upper is None else np.asarray(upper, dtype=float)
    b = np.asarray(b, dtype=float)
    if n == 0:
        if np.any(b > 0):
            raise LpInfeasibleError("positive demand with no variables")
        return LpResult(np.zeros(0), 0.0)
    A = np.asarray(A, dtype=float).reshape(-1, n)
    res = linprog(
        w,
        A_ub=-A if len(b) else None,
        b_ub=-b if len(b) else None,
        bounds=list(zip(lower, upper)),
        method="highs",
    )
    if res.status == 2:
        raise LpInfeasibleError(res.message)
    if res.status != 0:
        raise RuntimeError(f"LP solver failed: {res.message}")
    x = np.clip(res.x, lower, upper)
    return LpResult(x, float(w @ x))
