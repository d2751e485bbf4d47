"""Tests for the extended uniform grid."""

import numpy as np
import pytest

from periquad.errors import ConfigurationError
from periquad.grid import NodeKind, build_grid, candidate_neighbors


class TestBuildGrid:
    def test_coarse_example(self):
        grid = build_grid(0.5, 0.6)
        assert grid.spec.n == 2
        assert grid.spec.layer_cells == 2
        assert grid.side == 6
        assert grid.num_nodes == 36
        assert grid.num_interior == 4
        interior = {tuple(np.round(p, 12)) for p in grid.positions[grid.interior_ids]}
        assert interior == {(0.25, 0.25), (0.75, 0.25), (0.25, 0.75), (0.75, 0.75)}

    def test_medium_example(self):
        grid = build_grid(0.1, 0.4)
        assert grid.spec.layer_cells == 4
        assert grid.side == 18
        assert grid.num_nodes == 18 * 18
        assert grid.num_interior == 100

    def test_fine_example(self):
        grid = build_grid(0.01, 0.03)
        assert grid.spec.layer_cells == 3
        assert grid.side == 106
        assert grid.num_nodes == 106 * 106

    def test_h_must_divide_unit_interval(self):
        with pytest.raises(ConfigurationError, match="1/h"):
            build_grid(0.3, 0.5)
        with pytest.raises(ConfigurationError, match="positive"):
            build_grid(-0.1, 0.5)

    def test_non_dyadic_mesh_accepted(self):
        grid = build_grid(1.0 / 3.0, 0.5)
        assert grid.spec.n == 3
        grid = build_grid(1.0 / 7.0, 0.2)
        assert grid.spec.n == 7

    def test_horizon_must_exceed_mesh(self):
        with pytest.raises(ConfigurationError, match="horizon"):
            build_grid(0.1, 0.1)
        with pytest.raises(ConfigurationError, match="horizon"):
            build_grid(0.1, 0.05)

    @pytest.mark.parametrize(
        "h,delta,expected_layer",
        [(0.1, 0.4, 4), (0.01, 0.09, 9), (0.2, 0.6, 3), (0.00625, 0.03125, 5), (0.01, 0.035, 4)],
    )
    def test_layer_rounding(self, h, delta, expected_layer):
        grid = build_grid(h, delta)
        assert grid.spec.layer_cells == expected_layer
        assert grid.spec.layer_cells * h >= delta * (1.0 - 1e-12)

    def test_node_kinds_follow_positions(self):
        grid = build_grid(0.25, 0.3)
        for i in range(grid.num_nodes):
            node = grid.node(i)
            inside = 0.0 < node.position[0] < 1.0 and 0.0 < node.position[1] < 1.0
            assert (node.kind is NodeKind.INTERIOR) == inside

    def test_positions_form_cell_centered_lattice(self):
        grid = build_grid(0.2, 0.5)
        lc = grid.spec.layer_cells
        scaled = grid.positions / 0.2 - 0.5
        assert np.allclose(scaled, np.round(scaled), atol=1e-12)
        assert grid.positions.min() == pytest.approx((-lc + 0.5) * 0.2)
        assert grid.positions.max() == pytest.approx(1.0 + (lc - 0.5) * 0.2)

    def test_cell_tiling_bookkeeping(self):
        grid = build_grid(0.1, 0.25)
        extent = 1.0 + 2 * grid.spec.layer_cells * 0.1
        assert grid.num_nodes * 0.1 * 0.1 == pytest.approx(extent * extent, rel=1e-12)

    def test_index_round_trip(self):
        grid = build_grid(0.2, 0.5)
        for i in (0, 17, grid.num_nodes - 1):
            ix, iy = grid.lattice_coords(i)
            assert grid.index_of(ix, iy) == i
        with pytest.raises(IndexError):
            grid.index_of(-grid.spec.layer_cells - 1, 0)


class TestCandidateNeighbors:
    def test_deep_interior_count(self):
        grid = build_grid(0.2, 0.4)  # layer_cells = 2, Chebyshev reach 3
        center = grid.index_of(2, 2)
        cands = candidate_neighbors(grid, center)
        assert len(cands) == (2 * 3 + 1) ** 2 - 1 == 48

    def test_central_symmetry_for_interior(self):
        grid = build_grid(0.1, 0.25)
        idx = grid.index_of(5, 4)
        pos = grid.positions[idx]
        offsets = {tuple(np.round(grid.positions[j] - pos, 12)) for j in candidate_neighbors(grid, idx)}
        assert offsets == {(-a, -b) for a, b in offsets}

    def test_neighborhood_covered_by_extended_grid(self):
        # Cells of candidate neighbors cover the interaction disc of
        # every interior node: the disc never pokes past the grid edge.
        for h, delta in ((0.1, 0.4), (0.05, 0.12)):
            grid = build_grid(h, delta)
            lo = -grid.spec.layer_cells * h
            hi = 1.0 + grid.spec.layer_cells * h
            pos = grid.positions[grid.interior_ids]
            assert np.min(pos) - delta >= lo - 1e-12
            assert np.max(pos) + delta <= hi + 1e-12

    def test_clipped_at_outer_rim(self):
        grid = build_grid(0.2, 0.4)
        corner = grid.index_of(-2, -2)  # outermost constrained node
        cands = candidate_neighbors(grid, corner)
        assert len(cands) == 4 * 4 - 1  # window clipped to the grid
