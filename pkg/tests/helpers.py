"""Shared fixtures and random-instance builders for the test suite."""

from __future__ import annotations

import itertools

import numpy as np

from geosched.gsp import Constant, GspInstance, Job, Schedule, cumulative_cost
from geosched.kclp import FracSolution, check_kc_residual, kc_constraint, threshold_set
from geosched.light import R2mInstance, R2mPoint
from geosched.reduction import R2cInstance, R2cPoint, R2cRect


def desk1() -> GspInstance:
    return GspInstance((Job("a", 1, 2, Constant(1)), Job("b", 2, 1, Constant(2))))


def enumerate_schedules(inst: GspInstance):
    """Every feasible schedule, by trying each slot as idle or any job (no memo)."""
    ids = [j.id for j in inst.jobs]
    size = {j.id: j.size for j in inst.jobs}
    for combo in itertools.product([None] + ids, repeat=inst.horizon):
        counts = {j: 0 for j in ids}
        ok = True
        for t, j in enumerate(combo, start=1):
            if j is None:
                continue
            if t < inst.job(j).release + 1:
                ok = False
                break
            counts[j] += 1
        if ok and counts == size:
            yield Schedule({t: j for t, j in enumerate(combo, start=1) if j is not None})


def enumerated_opt(inst: GspInstance) -> int:
    best = None
    for s in enumerate_schedules(inst):
        c = sum(cumulative_cost(inst, j, t) for j, t in s.completions.items())
        best = c if best is None or c < best else best
    return best


def random_r2c(rng, n_points=12, n_rects=14, span=10, max_cap=16, max_w=20) -> R2cInstance:
    """Random feasible capacitated instance with y-anchored rectangles."""
    rects = []
    for j in range(n_rects):
        lo = int(rng.integers(1, span))
        hi = int(rng.integers(lo, span + 1))
        rects.append(
            R2cRect(
                f"r{j}",
                int(rng.integers(1, span + 1)),
                lo,
                hi,
                int(rng.integers(1, max_cap + 1)),
                int(rng.integers(0, max_w + 1)),
            )
        )
    seen = set()
    points = []
    for _ in range(n_points * 3):
        x, y = int(rng.integers(1, span + 1)), int(rng.integers(1, span + 1))
        if (x, y) in seen:
            continue
        total = sum(r.capacity for r in rects if r.covers(x, y))
        if total == 0:
            continue
        seen.add((x, y))
        points.append(R2cPoint(x, y, int(rng.integers(1, total + 1))))
        if len(points) == n_points:
            break
    points.sort(key=lambda p: (p.x, p.y))
    return R2cInstance(tuple(points), tuple(rects))


def kc_feasible_fraction(r2c: R2cInstance, beta: float, rng, small=0.8) -> FracSolution:
    """Random fractional solution that meets every threshold knapsack-cover cut.

    Most values start below ``beta``; violated cuts are repaired by scaling the
    sub-threshold coverers (kept below ``beta``) or, when that cannot suffice,
    promoting one coverer to ``beta``.
    """
    n = len(r2c.rects)
    cap = beta * (1 - 1e-6)
    x = np.where(rng.random(n) < small, rng.uniform(0, cap, n), rng.uniform(beta, 1, n))
    w = np.array([r.weight for r in r2c.rects], dtype=float)
    for _ in range(100 * (n + 1)):
        sol = FracSolution([r.id for r in r2c.rects], x, float(w @ x))
        report = check_kc_residual(r2c, sol, beta)
        bad = [i for i, s in enumerate(report.slack) if s is not None and s < 1e-9]
        if not bad:
            return sol
        i = bad[0]
        cut = kc_constraint(r2c, i, threshold_set(r2c, i, x, beta))
        cov = list(cut.coefficients)
        best = sum(cut.coefficients[j] * cap for j in cov)
        if best >= cut.rhs * (1 + 1e-6) + 1e-9:
            target = cut.rhs * (1 + 1e-6) + 1e-9
            for _ in range(60):
                lhs = cut.lhs(x)
                if lhs >= target:
                    break
                f = target / lhs if lhs > 0 else 2.0
                for j in cov:
                    x[j] = min(cap, max(x[j], 1e-3) * f)
        else:
            j = max(cov, key=lambda j: (cut.coefficients[j], -j))
            x[j] = beta
    raise RuntimeError("could not repair fractional solution")


def random_r2m(rng, n_points=10, n_rects=15, span=10, max_w=10, unit=False) -> R2mInstance:
    """Random multi-cover instance with a feasible fractional solution attached."""
    rects = []
    for j in range(n_rects):
        lo = int(rng.integers(1, span))
        hi = int(rng.integers(lo, span + 1))
        rects.append(R2cRect(f"s{j}", int(rng.integers(1, span + 1)), lo, hi, 1, int(rng.integers(0, max_w + 1))))
    frac = {r.id: float(rng.uniform(0, 1)) for r in rects}
    points = []
    seen = set()
    for k in range(n_points * 3):
        x, y = int(rng.integers(1, span + 1)), int(rng.integers(1, span + 1))
        if (x, y) in seen:
            continue
        cov = [r for r in rects if r.covers(x, y)]
        mass = sum(frac[r.id] for r in cov)
        demand = 1 if unit and cov else int(np.floor(mass))
        if demand < 1:
            continue
        seen.add((x, y))
        points.append(R2mPoint(f"p{k}", x, y, demand))
        if len(points) == n_points:
            break
    if unit:
        # unit demands: make the fractional solution feasible by scaling per point
        for p in points:
            cov = [r for r in rects if r.covers(p.x, p.y)]
            mass = sum(frac[r.id] for r in cov)
            if mass < 1:
                for r in cov:
                    frac[r.id] = min(1.0, frac[r.id] / mass * 1.000001)
    return R2mInstance(points, rects, frac)


def random_anchored(rng, k, span=1000):
    out = []
    for _ in range(k):
        lo, hi = sorted(rng.integers(0, span, 2).tolist())
        if lo == hi:
            hi += 1
        out.append((int(rng.integers(1, span)), lo, hi))
    return out


def fraction_first_r2c(rng, n_points=10, n_rects=60, span=4, caps=(1, 1, 2, 2, 3, 4, 8), max_w=20, beta=1 / 12, high=0.5, tail=0.15):
    """Instance built around a sub-threshold fractional solution.

    All ``x_r`` lie below ``beta``, so no rectangle is picked outright; each
    point's demand is drawn from the range where its knapsack-cover cut with
    ``S = {}`` still holds. Points are therefore all heavy or light; with
    probability ``high`` a point gets the largest admissible demand, which
    tends to make it light. Rectangles of capacity above 2 get at most
    ``tail * beta`` so that large demands rest on small capacities.
    """
    rects = []
    for j in range(n_rects):
        lo = int(rng.integers(1, span + 1))
        hi = int(rng.integers(lo, span + 1))
        rects.append(R2cRect(f"r{j}", int(rng.integers(1, span + 1)), lo, hi,
                             int(rng.choice(caps)), int(rng.integers(0, max_w + 1))))
    top_x = beta * (1 - 1e-6)
    x = np.array([rng.uniform(0.5, 1) * top_x if r.capacity <= 2 else rng.uniform(0, tail) * top_x for r in rects])
    points = []
    for px in range(1, span + 1):
        for py in range(1, span + 1):
            cov = [(r.capacity, x[j]) for j, r in enumerate(rects) if r.covers(px, py)]
            top = 0
            for d in range(1, sum(c for c, _ in cov) + 1):
                if sum(min(c, d) * v for c, v in cov) >= d * (1 + 1e-6):
                    top = d
            if top:
                d = top if rng.random() < high else int(rng.integers(1, top + 1))
                points.append(R2cPoint(px, py, d))
    order = rng.permutation(len(points))[:n_points]
    points = sorted((points[i] for i in order), key=lambda p: (p.x, p.y))
    r2c = R2cInstance(tuple(points), tuple(rects))
    w = np.array([r.weight for r in rects], dtype=float)
    return r2c, FracSolution([r.id for r in rects], x, float(w @ x))
