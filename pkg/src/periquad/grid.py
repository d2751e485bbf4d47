"""Uniform cell-centered grid over the unit square plus a constrained layer.

The physical domain [0,1]^2 is tiled by n x n square cells of side h
(h must divide 1).  Around it sits a fictitious layer of
``ceil(delta/h)`` extra cell rings whose nodes carry Dirichlet volume
constraints; the layer is at least one horizon wide, so the interaction
disc of every interior node is completely covered by grid cells and
interior and near-boundary nodes can be treated uniformly.

Nodes sit at cell centers ((i + 1/2) h, (j + 1/2) h) for lattice
indices i, j in [-layer_cells, n + layer_cells), flattened row-major
(x fastest).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError

__all__ = ["Grid", "GridSpec", "Node", "NodeKind", "build_grid", "candidate_neighbors"]


class NodeKind(Enum):
    INTERIOR = "interior"
    CONSTRAINED = "constrained"


@dataclass(frozen=True)
class GridSpec:
    h: float
    delta: float
    n: int
    layer_cells: int


@dataclass(frozen=True)
class Node:
    index: int
    position: tuple[float, float]
    kind: NodeKind


class Grid:
    """Node layout; immutable after construction."""

    def __init__(self, spec: GridSpec):
        self.spec = spec
        n, lc = spec.n, spec.layer_cells
        self.side = n + 2 * lc
        lattice = np.arange(-lc, n + lc)
        ix, iy = np.meshgrid(lattice, lattice, indexing="xy")
        self._ix = ix.ravel()
        self._iy = iy.ravel()
        self.positions = np.column_stack(
            [(self._ix + 0.5) * spec.h, (self._iy + 0.5) * spec.h]
        )
        self.is_interior = (
            (self._ix >= 0) & (self._ix < n) & (self._iy >= 0) & (self._iy < n)
        )
        self.interior_ids = np.flatnonzero(self.is_interior)

    @property
    def num_nodes(self) -> int:
        return self.side * self.side

    @property
    def num_interior(self) -> int:
        return len(self.interior_ids)

    def lattice_coords(self, index: int) -> tuple[int, int]:
        return int(self._ix[index]), int(self._iy[index])

    def index_of(self, ix: int, iy: int) -> int:
        lc = self.spec.layer_cells
        if not (-lc <= ix < self.spec.n + lc and -lc <= iy < self.spec.n + lc):
            raise IndexError(f"lattice coords ({ix}, {iy}) outside grid")
        return (iy + lc) * self.side + (ix + lc)

    def node(self, index: int) -> Node:
        kind = NodeKind.INTERIOR if self.is_interior[index] else NodeKind.CONSTRAINED
        x, y = self.positions[index]
        return Node(index=index, position=(float(x), float(y)), kind=kind)

    def __repr__(self):
        s = self.spec
        return (
            f"Grid(h={s.h}, delta={s.delta}, n={s.n}, layer_cells={s.layer_cells}, "
            f"nodes={self.num_nodes}, interior={self.num_interior})"
        )


def build_grid(h: float, delta: float) -> Grid:
    """Validate (h, delta) and lay out the extended node lattice.

    Raises :class:`ConfigurationError` if h does not divide the unit
    interval (within 1e-9) or if delta <= h (the neighborhood graph
    could disconnect).
    """
    if not h > 0.0:
        raise ConfigurationError(f"mesh size must be positive, got h={h}")
    n = round(1.0 / h)
    if n < 1 or abs(n * h - 1.0) > 1e-9:
        raise ConfigurationError(f"1/h must be an integer, got h={h} (1/h={1.0 / h})")
    if not delta > h:
        raise ConfigurationError(
            f"horizon must exceed the mesh size, got delta={delta} <= h={h}"
        )
    # Tolerant ceil: delta/h = 4 must give 4 layer cells, not 5, when
    # the quotient lands at 4 + 1e-16 in floating point.
    layer_cells = math.ceil(delta / h - 1e-9)
    if layer_cells * h < delta * (1.0 - 1e-12):
        layer_cells += 1
    return Grid(GridSpec(h=h, delta=delta, n=n, layer_cells=layer_cells))


def candidate_neighbors(grid: Grid, index: int) -> np.ndarray:
    """Indices of all nodes whose cells could intersect the node's disc.

    Lattice range query: Chebyshev offsets up to layer_cells + 1 (a
    cell any farther lies strictly outside the horizon), clipped to the
    extended grid and excluding the node itself.
    """
    ix, iy = grid.lattice_coords(index)
    lc = grid.spec.layer_cells
    reach = lc + 1
    lo, hi = -lc, grid.spec.n + lc
    xs = np.arange(max(ix - reach, lo), min(ix + reach, hi - 1) + 1)
    ys = np.arange(max(iy - reach, lo), min(iy + reach, hi - 1) + 1)
    gx, gy = np.meshgrid(xs, ys, indexing="xy")
    flat = (gy.ravel() + lc) * grid.side + (gx.ravel() + lc)
    return flat[flat != index]
