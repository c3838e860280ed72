"""Seeded random instance generators for the three objective families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .gsp import Constant, DeadlineStep, GspInstance, Job, SquaredFlow

FAMILIES = ("wflow", "flow2", "tardiness", "mixed")


@dataclass(frozen=True)
class GeneratorConfig:
    family: str = "wflow"
    n: int = 3
    max_size: int = 3
    max_release: int = 3
    weight_lo: int = 1
    weight_hi: int = 8
    seed: int = 0
    allow_degenerate: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"family must be one of {FAMILIES}, got {self.family!r}")
        for name in ("n", "max_size", "max_release", "weight_lo", "weight_hi"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.weight_lo > self.weight_hi:
            raise ValueError("weight_lo exceeds weight_hi")


def generate(cfg: GeneratorConfig) -> GspInstance:
    rng = np.random.default_rng(cfg.seed)
    sizes = rng.integers(1, cfg.max_size + 1, cfg.n)
    releases = rng.integers(1, cfg.max_release + 1, cfg.n)
    total = int(sizes.sum())
    jobs = []
    for i in range(cfg.n):
        family = cfg.family
        if family == "mixed":
            family = FAMILIES[int(rng.integers(0, 3))]
        w = int(rng.integers(cfg.weight_lo, cfg.weight_hi + 1))
        r = int(releases[i])
        if family == "wflow":
            weight = Constant(w)
        elif family == "flow2":
            weight = SquaredFlow()
        else:
            lo = 1 if cfg.allow_degenerate else r
            weight = DeadlineStep(int(rng.integers(lo, r + total + 1)), w)
        jobs.append(Job(f"j{i}", r, int(sizes[i]), weight))
    return GspInstance(tuple(jobs))
