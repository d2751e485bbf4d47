"""Meshfree one-point quadrature for steady-state bond-based peridynamics.

The package discretizes the nonlocal steady-state operator on the unit
square with a uniform cell-centered grid and a horizon-wide constrained
layer, offering three neighborhood quadrature rules (full-area,
partial-area with exact intersection weights, and the centroid-shifted
variant), exact polynomial manufactured forcing, a conjugate-gradient
solver, and a convergence-study harness with CSV/figure reporting.
"""

from .assembly import (
    DiscreteSystem,
    MatrixDiagnostics,
    Solution,
    assemble,
    discrete_operator_apply,
    matrix_diagnostics,
    solve,
)
from .errors import (
    ConfigurationError,
    IndefiniteOperatorError,
    OracleConvergenceError,
    SolverError,
)
from .geometry import Cell, Disc, Patch, PatchClass, intersect, intersect_oracle
from .grid import Grid, GridSpec, Node, NodeKind, build_grid, candidate_neighbors
from .kernels import ScalarKernel, TensorKernel, moment_table
from .manufactured import (
    CaseId,
    PolyField,
    as_vector_field,
    case_field,
    forcing_field,
    linf_error,
    nonlocal_apply,
    nonlocal_apply_oracle,
)
from .quadrature import (
    NeighborEntry,
    PatchList,
    PatchSummary,
    Scheme,
    build_patches,
    build_stencil,
    patch_summary,
)
from .study import (
    FixedDelta,
    FixedH,
    FixedRatio,
    StudyRow,
    StudyTable,
    order_between,
    run_single,
    run_study,
)

__version__ = "0.1.0"

__all__ = [
    "CaseId",
    "Cell",
    "ConfigurationError",
    "DiscreteSystem",
    "Disc",
    "FixedDelta",
    "FixedH",
    "FixedRatio",
    "Grid",
    "GridSpec",
    "IndefiniteOperatorError",
    "MatrixDiagnostics",
    "NeighborEntry",
    "Node",
    "NodeKind",
    "OracleConvergenceError",
    "Patch",
    "PatchClass",
    "PatchList",
    "PatchSummary",
    "PolyField",
    "ScalarKernel",
    "Scheme",
    "Solution",
    "SolverError",
    "StudyRow",
    "StudyTable",
    "TensorKernel",
    "as_vector_field",
    "assemble",
    "build_grid",
    "build_patches",
    "build_stencil",
    "candidate_neighbors",
    "case_field",
    "discrete_operator_apply",
    "forcing_field",
    "intersect",
    "intersect_oracle",
    "linf_error",
    "matrix_diagnostics",
    "moment_table",
    "nonlocal_apply",
    "nonlocal_apply_oracle",
    "order_between",
    "patch_summary",
    "run_single",
    "run_study",
    "solve",
]
