"""Randomized verification suites for geometry and forcing.

These back the ``geom-verify`` and ``forcing-verify`` CLI commands and
the corresponding acceptance tests.  Every suite is seeded and returns
one :class:`CheckResult` per invariant, so callers can print pass/fail
counts or assert on them directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .geometry import Cell, Disc, intersect, intersect_oracle
from .kernels import ScalarKernel, TensorKernel
from .manufactured import (
    CaseId,
    as_vector_field,
    case_field,
    nonlocal_apply,
    nonlocal_apply_oracle,
)

__all__ = ["CheckResult", "forcing_suite", "geometry_suite"]


@dataclass
class CheckResult:
    name: str
    trials: int
    failures: int
    worst: float  # largest observed defect, in the units of the check

    @property
    def passed(self) -> bool:
        return self.failures == 0

    def __str__(self):
        status = "pass" if self.passed else "FAIL"
        return (
            f"[{status}] {self.name}: {self.trials - self.failures}/{self.trials} ok, "
            f"worst defect {self.worst:.3e}"
        )


def _tiling_case(rng):
    radius = rng.uniform(0.05, 0.5)
    h = radius / rng.uniform(1.2, 8.0)
    center = rng.uniform(-1.0, 1.0, size=2)
    offset = rng.uniform(0.0, h, size=2)
    return radius, h, center, offset


def geometry_suite(tiling_trials=200, oracle_trials=1000, seed=7, oracle_depth=6):
    """Randomized geometry invariants.

    * disc tiling additivity: patch areas over a covering grid of cells
      sum to the disc area (relative defect);
    * first-moment additivity: area-weighted centroids sum to the disc
      area times its center (relative defect);
    * quadtree oracle agreement: the analytic area differs from the
      quadtree estimate by at most the oracle's own error bound;
    * radius monotonicity: growing the disc never shrinks a patch.
    """
    rng = np.random.default_rng(seed)
    tile_fail = 0
    tile_worst = 0.0
    moment_fail = 0
    moment_worst = 0.0
    for _ in range(tiling_trials):
        radius, h, center, offset = _tiling_case(rng)
        disc = Disc(tuple(center), radius)
        i_lo = math.floor((center[0] - radius - offset[0]) / h) - 1
        i_hi = math.ceil((center[0] + radius - offset[0]) / h) + 1
        j_lo = math.floor((center[1] - radius - offset[1]) / h) - 1
        j_hi = math.ceil((center[1] + radius - offset[1]) / h) + 1
        area = 0.0
        moment = np.zeros(2)
        for i in range(i_lo, i_hi):
            for j in range(j_lo, j_hi):
                patch = intersect(disc, Cell((offset[0] + i * h, offset[1] + j * h), h))
                area += patch.area
                moment += patch.area * np.asarray(patch.centroid)
        disc_area = math.pi * radius * radius
        tile_defect = abs(area - disc_area) / disc_area
        moment_defect = float(np.max(np.abs(moment - disc_area * center)) / disc_area)
        tile_worst = max(tile_worst, tile_defect)
        moment_worst = max(moment_worst, moment_defect)
        tile_fail += tile_defect > 1e-10
        moment_fail += moment_defect > 1e-10

    oracle_fail = 0
    oracle_worst = 0.0
    for _ in range(oracle_trials):
        disc = Disc(tuple(rng.uniform(-0.5, 0.5, size=2)), rng.uniform(0.05, 0.6))
        cell = Cell(tuple(rng.uniform(-1.0, 1.0, size=2)), rng.uniform(0.02, 0.8))
        patch = intersect(disc, cell)
        est = intersect_oracle(disc, cell, oracle_depth)
        excess = abs(patch.area - est.area) - (est.area_bound + 1e-15)
        oracle_worst = max(oracle_worst, excess)
        oracle_fail += excess > 0.0

    mono_fail = 0
    mono_worst = 0.0
    for _ in range(tiling_trials):
        cell = Cell(tuple(rng.uniform(-0.5, 0.5, size=2)), rng.uniform(0.05, 0.5))
        center = tuple(rng.uniform(-0.7, 0.7, size=2))
        radii = np.sort(rng.uniform(0.02, 1.2, size=6))
        areas = [intersect(Disc(center, r), cell).area for r in radii]
        drop = max(a1 - a2 for a1, a2 in zip(areas, areas[1:]))
        mono_worst = max(mono_worst, drop)
        mono_fail += drop > 1e-15

    return [
        CheckResult("tiling additivity", tiling_trials, int(tile_fail), tile_worst),
        CheckResult("first-moment additivity", tiling_trials, int(moment_fail), moment_worst),
        CheckResult("quadtree oracle agreement", oracle_trials, int(oracle_fail), oracle_worst),
        CheckResult("radius monotonicity", tiling_trials, int(mono_fail), mono_worst),
    ]


def forcing_suite(points=100, seed=11, tol=1e-10, deltas=(0.03, 0.1, 0.4)):
    """Moment-based forcing against the adaptive polar-quadrature oracle.

    Every case is checked under both kernels (one-component cases are
    promoted to two identical components for the tensor kernel) for each
    horizon in ``deltas``.
    """
    rng = np.random.default_rng(seed)
    results = []
    for case in CaseId:
        base = case_field(case)
        for kind in ("scalar", "tensor"):
            field = base
            if kind == "tensor":
                field = as_vector_field(base)
            fails = 0
            worst = 0.0
            total = 0
            for delta in deltas:
                kernel = ScalarKernel(delta) if kind == "scalar" else TensorKernel(delta)
                pts = rng.uniform(0.0, 1.0, size=(points, 2))
                for x in pts:
                    a = np.atleast_1d(nonlocal_apply(field, kernel, x))
                    b = np.atleast_1d(nonlocal_apply_oracle(field, kernel, x, tol=tol * 0.01))
                    defect = float(np.max(np.abs(a - b)))
                    worst = max(worst, defect)
                    fails += defect > tol
                    total += 1
            results.append(
                CheckResult(f"forcing case {case.value} / {kind} kernel", total, int(fails), worst)
            )
    return results
