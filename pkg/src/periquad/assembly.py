"""Assembly and solution of the discrete constrained steady-state system.

For interior node i the discrete operator reads

    (L u)_i = sum_k C(q_k) A_k (u_i - u_{i+d_k}) ,

with the stencil offsets d_k, effective areas A_k and kernel evaluation
points q_k supplied by the quadrature rule.  Rows exist only for
interior nodes; couplings to constrained (fictitious-layer) nodes are
multiplied by the prescribed boundary values and moved to the
right-hand side.

Because the stencil is node-independent on a uniform grid, the operator
is "constant diagonal minus 2D convolution".  Matrix-vector products
are evaluated by convolving the interior field (zero-extended, which is
exactly the constrained-column elimination) with the stencil's coupling
kernel; an explicit sparse matrix is only materialized on demand.

Degrees of freedom are ordered node-major, row-major over the interior
lattice, with the two displacement components interleaved per node in
the tensor case.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.ndimage
import scipy.signal
import scipy.sparse

from .errors import ConfigurationError, IndefiniteOperatorError, SolverError
from .grid import Grid
from .kernels import ScalarKernel, TensorKernel
from .manufactured import PolyField
from .quadrature import PatchList

__all__ = [
    "DiscreteSystem",
    "MatrixDiagnostics",
    "Solution",
    "assemble",
    "discrete_operator_apply",
    "matrix_diagnostics",
    "solve",
]


def _coupling_kernels(patches: PatchList, kernel):
    """Dense convolution kernel(s) W[dy + R, dx + R] = C(q(d)) A(d).

    Returns (W, diag): for a scalar kernel W has shape (2R+1, 2R+1) and
    diag is a float; for a tensor kernel W has shape (2, 2, 2R+1, 2R+1)
    and diag is the 2x2 sum of all coupling blocks.
    """
    st = patches.stencil
    if len(st) == 0:
        raise ConfigurationError("empty quadrature stencil")
    reach = int(np.max(np.abs(st.offsets)))
    size = 2 * reach + 1
    rows = st.offsets[:, 1] + reach
    cols = st.offsets[:, 0] + reach
    if isinstance(kernel, ScalarKernel):
        vals = kernel.eval(st.quad_offsets) * st.weights
        w = np.zeros((size, size))
        w[rows, cols] = vals
        return w, float(vals.sum())
    if isinstance(kernel, TensorKernel):
        blocks = kernel.eval(st.quad_offsets) * st.weights[:, None, None]
        w = np.zeros((2, 2, size, size))
        for a in range(2):
            for b in range(2):
                w[a, b, rows, cols] = blocks[:, a, b]
        return w, blocks.sum(axis=0)
    raise TypeError(f"unsupported kernel type {type(kernel)!r}")


def _correlate(field2d: np.ndarray, w: np.ndarray, exact: bool) -> np.ndarray:
    # w is centrally symmetric, so correlation equals convolution and the
    # FFT path of scipy.signal.convolve may be used for large stencils.
    if exact:
        return scipy.ndimage.correlate(field2d, w, mode="constant", cval=0.0)
    return scipy.signal.convolve(field2d, w, mode="same", method="auto")


@dataclass
class Solution:
    """Solver output: per-interior-node values in grid interior order."""

    values: np.ndarray  # (N,) scalar or (N, 2) tensor
    residual: float
    iterations: int


@dataclass
class DiscreteSystem:
    """Constrained linear system over the interior degrees of freedom."""

    grid: Grid
    kernel: object
    ncomp: int
    coupling: np.ndarray  # convolution kernel(s), see _coupling_kernels
    diag: object  # float (scalar) or (2, 2) array (tensor)
    rhs: np.ndarray  # (n, n) or (n, n, 2)
    constrained_slack: np.ndarray = field(repr=False, default=None)  # (n, n), scalar only

    @property
    def n(self) -> int:
        return self.grid.spec.n

    @property
    def dof_count(self) -> int:
        return self.ncomp * self.n * self.n

    @property
    def interior_node_ids(self) -> np.ndarray:
        """Grid node index of each block row (row r <-> node ids[r])."""
        return self.grid.interior_ids

    @property
    def rhs_flat(self) -> np.ndarray:
        return self.rhs.reshape(-1)

    def apply(self, u: np.ndarray) -> np.ndarray:
        """Operator action on an interior field array (n, n[, 2])."""
        if self.ncomp == 1:
            return self.diag * u - _correlate(u, self.coupling, exact=False)
        out = np.empty_like(u)
        for a in range(2):
            acc = self.diag[a, 0] * u[..., 0] + self.diag[a, 1] * u[..., 1]
            acc -= _correlate(u[..., 0], self.coupling[a, 0], exact=False)
            acc -= _correlate(u[..., 1], self.coupling[a, 1], exact=False)
            out[..., a] = acc
        return out

    def matvec(self, x: np.ndarray) -> np.ndarray:
        shape = (self.n, self.n) if self.ncomp == 1 else (self.n, self.n, 2)
        return self.apply(x.reshape(shape)).reshape(-1)

    def diag_vector(self) -> np.ndarray:
        if self.ncomp == 1:
            return np.full(self.dof_count, self.diag)
        d = np.empty((self.n * self.n, 2))
        d[:, 0] = self.diag[0, 0]
        d[:, 1] = self.diag[1, 1]
        return d.reshape(-1)

    def to_sparse(self) -> scipy.sparse.csr_matrix:
        """Materialize the operator as an explicit sparse CSR matrix.

        Intended for diagnostics and small-system cross-checks; the
        solve path never needs it.
        """
        n = self.n
        reach = (self.coupling.shape[-1] - 1) // 2
        iy, ix = np.mgrid[0:n, 0:n]
        base = (iy * n + ix).ravel()
        rows_list = []
        cols_list = []
        data_list = []
        couplings = (
            {(0, 0): self.coupling}
            if self.ncomp == 1
            else {(a, b): self.coupling[a, b] for a in range(2) for b in range(2)}
        )
        for dy in range(-reach, reach + 1):
            for dx in range(-reach, reach + 1):
                ok = ((iy + dy >= 0) & (iy + dy < n) & (ix + dx >= 0) & (ix + dx < n)).ravel()
                if not ok.any():
                    continue
                src = base[ok]
                dst = ((iy + dy) * n + (ix + dx)).ravel()[ok]
                for (a, b), w in couplings.items():
                    val = w[dy + reach, dx + reach]
                    if val == 0.0:
                        continue
                    rows_list.append(self.ncomp * src + a)
                    cols_list.append(self.ncomp * dst + b)
                    data_list.append(np.full(len(src), -val))
        all_rows = np.arange(self.dof_count)
        rows_list.append(all_rows)
        cols_list.append(all_rows)
        data_list.append(self.diag_vector())
        mat = scipy.sparse.coo_matrix(
            (np.concatenate(data_list), (np.concatenate(rows_list), np.concatenate(cols_list))),
            shape=(self.dof_count, self.dof_count),
        )
        return mat.tocsr()


def _boundary_field_values(grid: Grid, boundary_data: PolyField, ncomp: int) -> np.ndarray:
    s = grid.side
    vals = np.zeros((s, s) if ncomp == 1 else (s, s, 2))
    constrained = ~grid.is_interior
    pts = grid.positions[constrained]
    vals.reshape(s * s, -1)[constrained] = np.asarray(boundary_data(pts)).reshape(len(pts), -1)
    return vals


def assemble(
    grid: Grid,
    patches: PatchList,
    kernel,
    boundary_data: PolyField,
    forcing: np.ndarray,
    constrained_at_quad_points: bool = False,
) -> DiscreteSystem:
    """Assemble the constrained system L u = b over interior nodes.

    ``forcing`` holds the body-force values at interior nodes, shape
    (N,) for the scalar kernel or (N, 2) for the tensor kernel, in grid
    interior order.  ``boundary_data`` supplies the prescribed values on
    the constrained layer; by default it is evaluated at the constrained
    node positions, with ``constrained_at_quad_points=True`` switching to
    the kernel evaluation points for sensitivity studies.
    """
    if patches.grid is not grid:
        raise ConfigurationError("patch list was built for a different grid")
    if abs(kernel.delta - grid.spec.delta) > 1e-12 * grid.spec.delta:
        raise ConfigurationError(
            f"kernel horizon {kernel.delta} does not match grid horizon {grid.spec.delta}"
        )
    ncomp = 1 if isinstance(kernel, ScalarKernel) else 2
    if boundary_data.ncomp != ncomp:
        raise ConfigurationError(
            f"boundary data has {boundary_data.ncomp} component(s), kernel needs {ncomp}"
        )
    n, lc = grid.spec.n, grid.spec.layer_cells
    forcing = np.asarray(forcing, dtype=float)
    expected = (n * n,) if ncomp == 1 else (n * n, 2)
    if forcing.shape != expected:
        raise ConfigurationError(f"forcing shape {forcing.shape}, expected {expected}")

    coupling, diag = _coupling_kernels(patches, kernel)

    interior = (slice(lc, lc + n), slice(lc, lc + n))
    if constrained_at_quad_points:
        bvals = _boundary_rhs_at_quad_points(grid, patches, kernel, boundary_data, ncomp)
    else:
        g_ext = _boundary_field_values(grid, boundary_data, ncomp)
        if ncomp == 1:
            bvals = _correlate(g_ext, coupling, exact=False)[interior]
        else:
            bvals = np.empty((grid.side, grid.side, 2))
            for a in range(2):
                bvals[..., a] = _correlate(g_ext[..., 0], coupling[a, 0], exact=False)
                bvals[..., a] += _correlate(g_ext[..., 1], coupling[a, 1], exact=False)
            bvals = bvals[interior]

    rhs = forcing.reshape((n, n) if ncomp == 1 else (n, n, 2)) + bvals

    slack = None
    if ncomp == 1:
        constrained = (~grid.is_interior).astype(float).reshape(grid.side, grid.side)
        slack = _correlate(constrained, coupling, exact=True)[interior]

    return DiscreteSystem(
        grid=grid,
        kernel=kernel,
        ncomp=ncomp,
        coupling=coupling,
        diag=diag,
        rhs=rhs,
        constrained_slack=slack,
    )


def _boundary_rhs_at_quad_points(grid, patches, kernel, boundary_data, ncomp):
    """Boundary coupling with the data sampled at kernel evaluation points.

    For a fixed stencil offset the evaluation point is the neighbor node
    position plus a constant shift, so the contribution is gathered one
    offset at a time.
    """
    n, lc, s = grid.spec.n, grid.spec.layer_cells, grid.side
    h = grid.spec.h
    pos_ext = grid.positions.reshape(s, s, 2)
    constrained_ext = (~grid.is_interior).reshape(s, s)
    st = patches.stencil
    if isinstance(kernel, ScalarKernel):
        couplings = kernel.eval(st.quad_offsets) * st.weights
    else:
        couplings = kernel.eval(st.quad_offsets) * st.weights[:, None, None]
    out = np.zeros((n, n) if ncomp == 1 else (n, n, 2))
    for k in range(len(st)):
        dx, dy = st.offsets[k]
        rows = slice(lc + dy, lc + dy + n)
        cols = slice(lc + dx, lc + dx + n)
        mask = constrained_ext[rows, cols]
        if not mask.any():
            continue
        shift = st.quad_offsets[k] - st.offsets[k] * h
        vals = boundary_data(pos_ext[rows, cols][mask] + shift)
        if ncomp == 1:
            out[mask] += couplings[k] * vals
        else:
            out[mask] += vals @ couplings[k].T
    return out


def discrete_operator_apply(grid: Grid, patches: PatchList, kernel, field_values) -> np.ndarray:
    """Unconstrained discrete operator applied to a nodal field.

    ``field_values`` is a PolyField (evaluated at node positions) or an
    array over all grid nodes.  Returns the operator values at interior
    nodes, shape (N,) or (N, 2).

    The sum is evaluated over centrally-symmetric bond pairs, grouping
    (u_i - u_{i+d}) with (u_i - u_{i-d}); the pair weights are bitwise
    equal by stencil construction, so this is an exact regrouping of the
    operator.  It avoids the large cancelling terms of the plain
    "diagonal minus convolution" form, which matters for truncation and
    constancy diagnostics at small horizons where the diagonal is huge.
    """
    ncomp = 1 if isinstance(kernel, ScalarKernel) else 2
    if isinstance(field_values, PolyField):
        field_values = field_values(grid.positions)
    vals = np.asarray(field_values)
    if vals.dtype.kind != "f":
        vals = vals.astype(float)  # floating inputs keep their precision
    n, lc, s = grid.spec.n, grid.spec.layer_cells, grid.side
    st = patches.stencil
    half = (st.offsets[:, 1] > 0) | ((st.offsets[:, 1] == 0) & (st.offsets[:, 0] > 0))
    offsets = st.offsets[half]

    def window(ext2d, dx, dy):
        return ext2d[lc + dy : lc + dy + n, lc + dx : lc + dx + n]

    if ncomp == 1:
        weights = (kernel.eval(st.quad_offsets) * st.weights)[half]
        ext = vals.reshape(s, s)
        center = window(ext, 0, 0)
        out = np.zeros((n, n), dtype=vals.dtype)
        for (dx, dy), w in zip(offsets, weights):
            out += w * ((center - window(ext, dx, dy)) + (center - window(ext, -dx, -dy)))
        return out.reshape(-1)

    blocks = (kernel.eval(st.quad_offsets) * st.weights[:, None, None])[half]
    ext = vals.reshape(s, s, 2)
    out = np.zeros((n, n, 2), dtype=vals.dtype)
    centers = [window(ext[..., b], 0, 0) for b in range(2)]
    for (dx, dy), blk in zip(offsets, blocks):
        for b in range(2):
            pair = (centers[b] - window(ext[..., b], dx, dy)) + (
                centers[b] - window(ext[..., b], -dx, -dy)
            )
            for a in range(2):
                out[..., a] += blk[a, b] * pair
    return out.reshape(-1, 2)


def solve(system: DiscreteSystem, tol: float = 1e-12, max_iter: int | None = None) -> Solution:
    """Diagonally preconditioned conjugate gradients.

    The operator is symmetric positive definite (Stieltjes structure in
    the scalar case); negative curvature therefore signals an assembly
    bug and raises :class:`IndefiniteOperatorError`.  The reported
    residual is recomputed from the returned iterate, not taken from
    the CG recurrence.
    """
    if not tol > 0.0:
        raise ValueError("solver tolerance must be positive")
    b = system.rhs_flat.copy()
    n_dof = system.dof_count
    if max_iter is None:
        max_iter = max(1000, 20 * n_dof)
    b_norm = np.linalg.norm(b)
    if b_norm == 0.0:
        return Solution(values=_as_values(np.zeros(n_dof), system), residual=0.0, iterations=0)

    inv_diag = 1.0 / system.diag_vector()
    x = np.zeros(n_dof)
    r = b.copy()
    z = inv_diag * r
    p = z.copy()
    rz = r @ z
    iterations = 0
    while iterations < max_iter:
        ap = system.matvec(p)
        pap = p @ ap
        if pap <= 0.0:
            raise IndefiniteOperatorError(
                f"negative curvature at iteration {iterations}: p^T A p = {pap}"
            )
        alpha = rz / pap
        x += alpha * p
        r -= alpha * ap
        iterations += 1
        if np.linalg.norm(r) <= tol * b_norm:
            true_r = b - system.matvec(x)
            if np.linalg.norm(true_r) <= tol * b_norm:
                break
            r = true_r  # recurrence drifted; restart from the true residual
            z = inv_diag * r
            p = z.copy()
            rz = r @ z
            continue
        z = inv_diag * r
        rz_new = r @ z
        p = z + (rz_new / rz) * p
        rz = rz_new
    else:
        final = np.linalg.norm(b - system.matvec(x)) / b_norm
        raise SolverError(
            f"CG did not converge in {max_iter} iterations (relative residual {final:.3e})",
            residual=final,
            iterations=max_iter,
        )

    residual = np.linalg.norm(b - system.matvec(x)) / b_norm
    return Solution(values=_as_values(x, system), residual=float(residual), iterations=iterations)


def _as_values(x: np.ndarray, system: DiscreteSystem) -> np.ndarray:
    if system.ncomp == 1:
        return x.copy()
    return x.reshape(-1, 2).copy()


@dataclass
class MatrixDiagnostics:
    """Structural report on a scalar-kernel system matrix."""

    rows: int
    offdiag_sign_violations: int
    diagonal_positive: bool
    weak_dominance_violations: int
    strict_dominance_violations: int
    boundary_band_rows: int
    symmetry_defect: float
    connected: bool
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def matrix_diagnostics(system: DiscreteSystem) -> MatrixDiagnostics:
    """Verify the M-matrix structure of an assembled scalar system.

    Works directly on the stencil representation: off-diagonal entries
    are the negated coupling kernel, every row shares the same diagonal,
    and a row's dominance slack equals its total coupling to constrained
    nodes.  Nothing is materialized, so the check runs on systems of any
    size.
    """
    if system.ncomp != 1:
        raise ConfigurationError("matrix diagnostics apply to scalar-kernel systems")
    violations = []
    w = system.coupling
    diag = system.diag

    sign_bad = int(np.count_nonzero(w < 0.0))
    if sign_bad:
        violations.append(f"{sign_bad} positive off-diagonal entries")
    diag_ok = diag > 0.0
    if not diag_ok:
        violations.append(f"non-positive diagonal {diag}")

    slack = system.constrained_slack
    tol = 1e-13 * diag
    weak_bad = int(np.count_nonzero(slack < -tol))
    if weak_bad:
        violations.append(f"{weak_bad} rows without weak diagonal dominance")

    # Rows whose stencil reaches a constrained node must be strictly
    # dominant: their slack is a sum of positive couplings.
    grid = system.grid
    n, lc, s = grid.spec.n, grid.spec.layer_cells, grid.side
    reach = (w.shape[0] - 1) // 2
    constrained = (~grid.is_interior).astype(float).reshape(s, s)
    structural = scipy.ndimage.correlate(
        constrained, (w > 0.0).astype(float), mode="constant", cval=0.0
    )[lc : lc + n, lc : lc + n]
    band = structural > 0.0
    band_rows = int(np.count_nonzero(band))
    strict_bad = int(np.count_nonzero(slack[band] <= tol))
    if strict_bad:
        violations.append(f"{strict_bad} boundary-band rows not strictly dominant")

    rot = w[::-1, ::-1]
    scale = np.max(np.abs(w)) or 1.0
    symmetry_defect = float(np.max(np.abs(w - rot)) / scale)
    if symmetry_defect > 1e-13:
        violations.append(f"symmetry defect {symmetry_defect:.3e}")

    # The four nearest-neighbor couplings are positive whenever the
    # horizon exceeds the mesh size, which makes the interior lattice
    # graph connected.
    c = reach
    connected = (
        w[c, c + 1] > 0.0 and w[c, c - 1] > 0.0 and w[c + 1, c] > 0.0 and w[c - 1, c] > 0.0
    )
    if not connected:
        connected = _connected_by_graph(system)
    if not connected:
        violations.append("coupling graph is not connected")

    return MatrixDiagnostics(
        rows=system.dof_count,
        offdiag_sign_violations=sign_bad,
        diagonal_positive=bool(diag_ok),
        weak_dominance_violations=weak_bad,
        strict_dominance_violations=strict_bad,
        boundary_band_rows=band_rows,
        symmetry_defect=symmetry_defect,
        connected=bool(connected),
        violations=violations,
    )


def _connected_by_graph(system: DiscreteSystem) -> bool:
    if system.dof_count > 40000:
        return False
    mat = system.to_sparse()
    mat.setdiag(0.0)
    mat.eliminate_zeros()
    ncomp, _ = scipy.sparse.csgraph.connected_components(mat, directed=False)
    return ncomp == 1
