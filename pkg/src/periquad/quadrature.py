"""Per-node neighborhood quadrature rules: FA, PA-AC and IPA-AC.

All three schemes approximate the neighborhood integral by a one-point
rule per neighbor cell,

    sum_j  C(y_j - x_i) (u_j - u_i) A_j,

and differ only in the effective area A_j and the kernel evaluation
point y_j:

* FA:      A_j = h^2 for every cell whose center lies within the
           horizon (boundary-inclusive), y_j = cell center.  Cells cut
           by the horizon are either fully counted or fully dropped.
* PA-AC:   A_j = exact intersection area (boundary-partial cells
           included), y_j = cell center.
* IPA-AC:  A_j = exact intersection area, y_j = centroid of the
           intersection patch.

On a uniform grid the local geometry is identical for every node, so
the rule is computed once as a stencil of lattice offsets and reused;
this also makes the centrally-symmetric pairing of weights exact in
floating point.  The self cell is always excluded: its displacement
difference vanishes and the tensor kernel is singular at zero offset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigurationError
from .geometry import Cell, Disc, PatchClass, intersect
from .grid import Grid

__all__ = [
    "NeighborEntry",
    "PatchList",
    "PatchSummary",
    "Scheme",
    "Stencil",
    "build_patches",
    "build_stencil",
    "patch_summary",
]


class Scheme(Enum):
    FA = "fa"
    PAAC = "pa-ac"
    IPAAC = "ipa-ac"


@dataclass(frozen=True)
class NeighborEntry:
    neighbor: int
    weight: float
    quad_point: tuple[float, float]


@dataclass(frozen=True)
class Stencil:
    """Node-independent quadrature rule in lattice offsets.

    ``quad_offsets`` are kernel evaluation points relative to the node;
    ``classes`` mirrors the geometric taxonomy of each offset's cell.
    """

    offsets: np.ndarray  # (K, 2) int
    weights: np.ndarray  # (K,)
    quad_offsets: np.ndarray  # (K, 2)
    classes: tuple[PatchClass, ...]

    def __len__(self):
        return len(self.weights)


def build_stencil(h: float, delta: float, scheme: Scheme) -> Stencil:
    """Quadrature stencil for cell size h and horizon delta.

    Covers every lattice offset whose cell can meet the disc
    (Chebyshev distance up to ceil(delta/h) + 1), keeping only offsets
    with a positive weight.  Each patch is computed once in the
    non-negative quadrant and mirrored to the other sign combinations,
    which makes the centrally-symmetric pairing of weights and
    evaluation points exact in floating point (cells symmetric about an
    axis get their evaluation point snapped onto it).
    """
    reach = math.ceil(delta / h - 1e-9) + 1
    disc = Disc((0.0, 0.0), delta)
    offsets = []
    weights = []
    qpoints = []
    classes = []
    for dy in range(0, reach + 1):
        for dx in range(0, reach + 1):
            if dx == 0 and dy == 0:
                continue
            if scheme is Scheme.FA:
                if (dx * dx + dy * dy) * h * h > delta * delta * (1.0 + 1e-12):
                    continue
                weight = h * h
                qpt = (dx * h, dy * h)
                cls = PatchClass.FULL  # whole cell counted
            else:
                patch = intersect(disc, Cell(((dx - 0.5) * h, (dy - 0.5) * h), h))
                if patch.patch_class is PatchClass.EXCLUDED:
                    continue
                weight = patch.area
                cls = patch.patch_class
                if scheme is Scheme.IPAAC and cls is not PatchClass.FULL:
                    qpt = (
                        0.0 if dx == 0 else patch.centroid[0],
                        0.0 if dy == 0 else patch.centroid[1],
                    )
                else:
                    qpt = (dx * h, dy * h)
            for sx in (1,) if dx == 0 else (1, -1):
                for sy in (1,) if dy == 0 else (1, -1):
                    offsets.append((sx * dx, sy * dy))
                    weights.append(weight)
                    qpoints.append((sx * qpt[0], sy * qpt[1]))
                    classes.append(cls)
    return Stencil(
        offsets=np.array(offsets, dtype=np.int64).reshape(-1, 2),
        weights=np.array(weights),
        quad_offsets=np.array(qpoints).reshape(-1, 2),
        classes=tuple(classes),
    )


class PatchList:
    """Neighborhood quadrature rule for every node of a grid."""

    def __init__(self, grid: Grid, scheme: Scheme, stencil: Stencil):
        self.grid = grid
        self.scheme = scheme
        self.stencil = stencil

    def _valid_mask(self, index: int) -> np.ndarray:
        ix, iy = self.grid.lattice_coords(index)
        lc = self.grid.spec.layer_cells
        hi = self.grid.spec.n + lc
        jx = ix + self.stencil.offsets[:, 0]
        jy = iy + self.stencil.offsets[:, 1]
        return (jx >= -lc) & (jx < hi) & (jy >= -lc) & (jy < hi)

    def neighbor_arrays(self, index: int):
        """(neighbor indices, weights, absolute quad points) for a node.

        Stencil offsets falling outside the extended grid are dropped;
        for interior nodes the layer guarantee makes every offset valid.
        """
        ix, iy = self.grid.lattice_coords(index)
        lc = self.grid.spec.layer_cells
        mask = self._valid_mask(index)
        off = self.stencil.offsets[mask]
        ids = (iy + off[:, 1] + lc) * self.grid.side + (ix + off[:, 0] + lc)
        qpts = self.grid.positions[index] + self.stencil.quad_offsets[mask]
        return ids, self.stencil.weights[mask], qpts

    def entries(self, index: int) -> list[NeighborEntry]:
        ids, weights, qpts = self.neighbor_arrays(index)
        return [
            NeighborEntry(int(j), float(w), (float(px), float(py)))
            for j, w, (px, py) in zip(ids, weights, qpts)
        ]

    def classes(self, index: int) -> list[PatchClass]:
        mask = self._valid_mask(index)
        return [c for c, ok in zip(self.stencil.classes, mask) if ok]


def build_patches(grid: Grid, delta: float, scheme: Scheme) -> PatchList:
    """Build the per-node quadrature rule for a grid and scheme."""
    if abs(delta - grid.spec.delta) > 1e-12 * grid.spec.delta:
        raise ConfigurationError(
            f"patch horizon {delta} does not match grid horizon {grid.spec.delta}"
        )
    stencil = build_stencil(grid.spec.h, grid.spec.delta, scheme)
    return PatchList(grid, scheme, stencil)


@dataclass(frozen=True)
class PatchSummary:
    full: int
    standard_partial: int
    boundary_partial: int
    total_weight: float

    @property
    def count(self) -> int:
        return self.full + self.standard_partial + self.boundary_partial


def patch_summary(patches: PatchList, index: int) -> PatchSummary:
    """Counts per patch class and total weight of a node's rule."""
    classes = patches.classes(index)
    _, weights, _ = patches.neighbor_arrays(index)
    return PatchSummary(
        full=sum(c is PatchClass.FULL for c in classes),
        standard_partial=sum(c is PatchClass.STANDARD_PARTIAL for c in classes),
        boundary_partial=sum(c is PatchClass.BOUNDARY_PARTIAL for c in classes),
        total_weight=float(weights.sum()),
    )
