"""Convergence-study harness: regimes, observed orders, CSV tables.

Three refinement regimes are supported:

* ``FixedDelta``: horizon held fixed, mesh refined; orders are taken
  with respect to h (classic mesh convergence).
* ``FixedH``: mesh held fixed, horizon swept downward; orders are taken
  with respect to delta and come out negative (the error grows).
* ``FixedRatio``: delta = m * h with m fixed and h refined; orders are
  taken with respect to h and stagnate near zero (the scheme is not
  asymptotically compatible).

Each row is one full solve: grid, quadrature rule, exact forcing,
assembly, CG, max-norm error.  The harness has no randomized
components, so repeated runs produce bit-identical tables.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .assembly import DiscreteSystem, Solution, assemble, solve
from .errors import ConfigurationError, SolverError
from .grid import Grid, build_grid
from .kernels import ScalarKernel, TensorKernel
from .manufactured import CaseId, case_field, forcing_field, linf_error
from .quadrature import Scheme, build_patches

__all__ = [
    "FixedDelta",
    "FixedH",
    "FixedRatio",
    "Regime",
    "StudyRow",
    "StudyTable",
    "SingleRun",
    "order_between",
    "run_single",
    "run_study",
]

CSV_HEADER = ("h", "delta", "m", "error_inf", "order")


def _check_decreasing(name, values):
    values = tuple(float(v) for v in values)
    if len(values) < 1:
        raise ConfigurationError(f"{name} must not be empty")
    if any(b >= a for a, b in zip(values, values[1:])):
        raise ConfigurationError(f"{name} must be strictly decreasing, got {values}")
    return values


@dataclass(frozen=True)
class FixedDelta:
    delta: float
    h_list: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "h_list", _check_decreasing("h_list", self.h_list))

    def configurations(self):
        return [(h, self.delta) for h in self.h_list]

    swept = "h"


@dataclass(frozen=True)
class FixedH:
    h: float
    delta_list: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "delta_list", _check_decreasing("delta_list", self.delta_list))

    def configurations(self):
        return [(self.h, d) for d in self.delta_list]

    swept = "delta"


@dataclass(frozen=True)
class FixedRatio:
    m: float
    h_list: tuple[float, ...]

    def __post_init__(self):
        if not self.m > 1.0:
            raise ConfigurationError(f"horizon-to-mesh ratio must exceed 1, got {self.m}")
        object.__setattr__(self, "h_list", _check_decreasing("h_list", self.h_list))

    def configurations(self):
        return [(h, self.m * h) for h in self.h_list]

    swept = "h"


Regime = Union[FixedDelta, FixedH, FixedRatio]


def order_between(e1: float, e2: float, p1: float, p2: float) -> float:
    """Observed order log(e1/e2) / log(p1/p2) between two rows."""
    if e1 <= 0.0 or e2 <= 0.0:
        raise ValueError("errors must be positive to compute an observed order")
    if p1 <= 0.0 or p2 <= 0.0:
        raise ValueError("parameters must be positive to compute an observed order")
    if p1 == p2:
        raise ValueError("parameters must differ to compute an observed order")
    return math.log(e1 / e2) / math.log(p1 / p2)


@dataclass(frozen=True)
class StudyRow:
    h: float
    delta: float
    m: float
    error: float
    order: float | None  # absent on the first row of a table


@dataclass
class StudyTable:
    rows: list[StudyRow]
    kernel_kind: str
    scheme: Scheme
    case: CaseId
    kappa: float = 1.0

    @property
    def errors(self) -> list[float]:
        return [r.error for r in self.rows]

    @property
    def orders(self) -> list[float]:
        return [r.order for r in self.rows if r.order is not None]

    def write_csv(self, stream) -> None:
        writer = csv.writer(stream, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for r in self.rows:
            writer.writerow(
                [
                    f"{r.h:.5e}",
                    f"{r.delta:.5e}",
                    f"{r.m:.5e}",
                    f"{r.error:.5e}",
                    "" if r.order is None else f"{r.order:.5e}",
                ]
            )

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            self.write_csv(fh)

    def csv_text(self) -> str:
        buf = io.StringIO()
        self.write_csv(buf)
        return buf.getvalue()

    @classmethod
    def from_csv(cls, path_or_stream, kernel_kind="", scheme=Scheme.IPAAC, case=CaseId.CASE1, kappa=1.0):
        if hasattr(path_or_stream, "read"):
            reader = csv.reader(path_or_stream)
            rows = cls._parse(reader)
        else:
            with open(path_or_stream, newline="") as fh:
                rows = cls._parse(csv.reader(fh))
        return cls(rows=rows, kernel_kind=kernel_kind, scheme=scheme, case=case, kappa=kappa)

    @staticmethod
    def _parse(reader):
        header = next(reader)
        if tuple(header) != CSV_HEADER:
            raise ValueError(f"unexpected CSV header {header}")
        rows = []
        for rec in reader:
            if not rec:
                continue
            rows.append(
                StudyRow(
                    h=float(rec[0]),
                    delta=float(rec[1]),
                    m=float(rec[2]),
                    error=float(rec[3]),
                    order=None if rec[4] == "" else float(rec[4]),
                )
            )
        return rows


@dataclass
class SingleRun:
    """One configuration solved end to end."""

    grid: Grid
    system: DiscreteSystem
    solution: Solution
    error: float


def _make_kernel(kernel_kind: str, delta: float, kappa: float):
    if kernel_kind == "scalar":
        return ScalarKernel(delta)
    if kernel_kind == "tensor":
        return TensorKernel(delta, kappa)
    raise ConfigurationError(f"unknown kernel kind {kernel_kind!r}")


def run_single(
    h: float,
    delta: float,
    kernel_kind: str,
    case: CaseId,
    scheme: Scheme,
    kappa: float = 1.0,
    solver_tol: float = 1e-12,
    max_iter: int | None = None,
    constrained_at_quad_points: bool = False,
) -> SingleRun:
    """Solve one (h, delta) configuration and measure the max-norm error."""
    kernel = _make_kernel(kernel_kind, delta, kappa)
    field = case_field(case)
    if kernel_kind == "tensor" and field.ncomp != 2:
        raise ConfigurationError(f"case {case.value} is scalar; the tensor kernel needs 2 components")
    if kernel_kind == "scalar" and field.ncomp != 1:
        raise ConfigurationError(f"case {case.value} is vector-valued; use the tensor kernel")
    grid = build_grid(h, delta)
    patches = build_patches(grid, delta, scheme)
    forcing = forcing_field(field, kernel)(grid.positions[grid.interior_ids])
    system = assemble(
        grid,
        patches,
        kernel,
        field,
        np.asarray(forcing),
        constrained_at_quad_points=constrained_at_quad_points,
    )
    solution = solve(system, tol=solver_tol, max_iter=max_iter)
    return SingleRun(grid=grid, system=system, solution=solution, error=linf_error(solution, field, grid))


def run_study(
    regime: Regime,
    kernel_kind: str,
    case: CaseId,
    scheme: Scheme,
    kappa: float = 1.0,
    solver_tol: float = 1e-12,
    max_iter: int | None = None,
    constrained_at_quad_points: bool = False,
) -> StudyTable:
    """Run one solve per regime row and tabulate errors and orders."""
    configs = regime.configurations()
    rows: list[StudyRow] = []
    prev_error = None
    prev_param = None
    for h, delta in configs:
        try:
            single = run_single(
                h,
                delta,
                kernel_kind,
                case,
                scheme,
                kappa=kappa,
                solver_tol=solver_tol,
                max_iter=max_iter,
                constrained_at_quad_points=constrained_at_quad_points,
            )
        except SolverError as exc:
            raise SolverError(
                f"study row (h={h}, delta={delta}, case={case.value}, scheme={scheme.value}) "
                f"failed: {exc}",
                residual=exc.residual,
                iterations=exc.iterations,
            ) from exc
        param = h if regime.swept == "h" else delta
        order = None
        if prev_error is not None:
            order = order_between(prev_error, single.error, prev_param, param)
        rows.append(StudyRow(h=h, delta=delta, m=delta / h, error=single.error, order=order))
        prev_error, prev_param = single.error, param
    return StudyTable(rows=rows, kernel_kind=kernel_kind, scheme=scheme, case=case, kappa=kappa)
