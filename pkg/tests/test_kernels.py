"""Tests for kernel evaluation, calibration constants and disc moments."""

import math

import numpy as np
import pytest
from scipy.integrate import quad

from periquad.kernels import MAX_MOMENT_DEGREE, ScalarKernel, TensorKernel, moment_table


def polar_moment(delta, radial_fn, p, q, extra=lambda t: 1.0):
    """Independent numeric disc moment: nested adaptive quadrature in polar form."""
    ang, _ = quad(
        lambda t: math.cos(t) ** p * math.sin(t) ** q * extra(t), 0.0, 2.0 * math.pi,
        limit=200,
    )
    rad, _ = quad(radial_fn, 0.0, delta, limit=200)
    return ang * rad


class TestScalarKernel:
    def test_validation(self):
        with pytest.raises(ValueError, match="positive"):
            ScalarKernel(0.0)

    @pytest.mark.parametrize("delta", [0.03, 0.1, 0.4, 1.7])
    def test_c1_calibration(self, delta):
        k = ScalarKernel(delta)
        assert k.c1 * math.pi * delta**4 / 20.0 == pytest.approx(1.0, rel=1e-15)

    def test_support_boundary_is_zero(self):
        k = ScalarKernel(0.7)
        assert k((0.7, 0.0)) == 0.0
        assert k((0.0, -0.7)) == 0.0

    def test_pointwise_value(self):
        k = ScalarKernel(1.0)
        assert k((0.5, 0.0)) == pytest.approx(10.0 / math.pi, rel=1e-15)

    def test_even_and_nonnegative(self):
        k = ScalarKernel(0.4)
        rng = np.random.default_rng(0)
        xi = rng.uniform(-0.6, 0.6, (200, 2))
        vals = k.eval(xi)
        assert np.all(vals >= 0.0)
        assert np.array_equal(vals, k.eval(-xi))

    def test_compact_support_exact(self):
        k = ScalarKernel(0.4)
        assert k((0.41, 0.0)) == 0.0
        assert k((0.3, 0.3)) == 0.0


class TestScalarMoments:
    def test_second_moment_is_one(self):
        for delta in (0.03, 0.1, 0.4, 2.0):
            k = ScalarKernel(delta)
            assert k.moment(2, 0) == pytest.approx(1.0, rel=1e-14)
            assert k.moment(0, 2) == pytest.approx(1.0, rel=1e-14)

    def test_fourth_moment_closed_form(self):
        for delta in (0.1, 0.4):
            k = ScalarKernel(delta)
            assert k.moment(4, 0) == pytest.approx(5.0 * delta**2 / 14.0, rel=1e-14)
            assert k.moment(0, 4) == pytest.approx(5.0 * delta**2 / 14.0, rel=1e-14)

    def test_odd_moments_exactly_zero(self):
        k = ScalarKernel(0.4)
        assert k.moment(1, 0) == 0.0
        assert k.moment(3, 2) == 0.0
        assert k.moment(0, 5) == 0.0

    def test_validation(self):
        k = ScalarKernel(0.4)
        with pytest.raises(ValueError, match="non-negative"):
            k.moment(-2, 0)
        with pytest.raises(ValueError, match="cap"):
            k.moment(8, 0)

    def test_against_numeric_quadrature(self):
        delta = 0.4
        k = ScalarKernel(delta)
        for (p, q), value in moment_table(k).items():
            numeric = polar_moment(
                delta,
                lambda r: k.c1 * (1.0 - r / delta) * r ** (p + q + 1),
                p,
                q,
            )
            assert value == pytest.approx(numeric, rel=1e-10, abs=1e-14)


class TestTensorKernel:
    def test_validation(self):
        with pytest.raises(ValueError, match="positive"):
            TensorKernel(0.0)
        with pytest.raises(ValueError, match="positive"):
            TensorKernel(0.4, kappa=-1.0)

    def test_c2_calibration(self):
        for delta in (0.1, 0.4):
            k = TensorKernel(delta, kappa=2.5)
            assert k.c2 * 5.0 * math.pi * delta**3 / (72.0 * 2.5) == pytest.approx(1.0, rel=1e-15)
            assert k.c2_3d == pytest.approx(18.0 * 2.5 / (math.pi * delta**4), rel=1e-15)

    def test_axis_aligned_bond(self):
        delta = 0.4
        k = TensorKernel(delta)
        mat = k((delta, 0.0))
        assert mat[0, 0] == pytest.approx(k.c2 / delta, rel=1e-14)
        assert mat[0, 1] == 0.0
        assert mat[1, 0] == 0.0
        assert mat[1, 1] == 0.0

    def test_trace_identity(self):
        k = TensorKernel(0.4)
        rng = np.random.default_rng(1)
        for _ in range(50):
            xi = rng.uniform(-0.28, 0.28, 2)
            r = math.hypot(*xi)
            if r == 0.0:
                continue
            mat = k(xi)
            assert np.trace(mat) == pytest.approx(k.c2 / r, rel=1e-13)

    def test_psd_rank_one(self):
        k = TensorKernel(0.4)
        rng = np.random.default_rng(2)
        xi = rng.uniform(-0.25, 0.25, (100, 2))
        mats = k.eval(xi)
        eigs = np.linalg.eigvalsh(mats)
        assert np.all(eigs[:, 0] >= -1e-12)
        assert np.all(eigs[:, 0] <= 1e-12 * np.maximum(eigs[:, 1], 1.0))  # rank <= 1

    def test_compact_support_and_evenness(self):
        k = TensorKernel(0.4)
        assert np.all(k((0.5, 0.5)) == 0.0)
        xi = np.array([0.1, -0.2])
        assert np.array_equal(k(xi), k(-xi))

    def test_zero_bond_raises(self):
        k = TensorKernel(0.4)
        with pytest.raises(ValueError, match="singular"):
            k((0.0, 0.0))


class TestTensorMoments:
    def test_index_validation(self):
        k = TensorKernel(0.4)
        with pytest.raises(ValueError, match="indices"):
            k.moment(0, 1, 0, 0)
        with pytest.raises(ValueError, match="cap"):
            k.moment(1, 1, 4, 2)

    def test_odd_parity_zero(self):
        k = TensorKernel(0.4)
        assert k.moment(1, 2, 0, 0) == 0.0
        assert k.moment(1, 1, 1, 0) == 0.0

    def test_linear_in_kappa(self):
        base = TensorKernel(0.4, kappa=1.0)
        double = TensorKernel(0.4, kappa=2.0)
        assert double.moment(1, 1, 2, 0) == pytest.approx(2.0 * base.moment(1, 1, 2, 0), rel=1e-15)

    def test_stability_constant_identity(self):
        # The second-moment contraction that a quadratic bowl excites
        # equals twice c2 * pi * delta^3 / 6 (which is 12 kappa / 5).
        for delta, kappa in ((0.1, 1.0), (0.4, 3.0)):
            k = TensorKernel(delta, kappa)
            row = sum(k.moment(1, b, 2, 0) + k.moment(1, b, 0, 2) for b in (1, 2))
            c_t1 = k.c2 * math.pi * delta**3 / 6.0
            assert row == pytest.approx(2.0 * c_t1, rel=1e-13)
            assert c_t1 == pytest.approx(12.0 * kappa / 5.0, rel=1e-13)

    def test_against_numeric_quadrature(self):
        delta = 0.3
        k = TensorKernel(delta, kappa=1.3)
        for (a, b, p, q), value in moment_table(k).items():
            e1 = p + (a == 1) + (b == 1)
            e2 = q + (a == 2) + (b == 2)
            numeric = polar_moment(delta, lambda r: k.c2 * r ** (p + q), e1, e2)
            assert value == pytest.approx(numeric, rel=1e-10, abs=1e-14)


class TestMomentTable:
    def test_scalar_table_keys(self):
        table = moment_table(ScalarKernel(0.4))
        assert all(p % 2 == 0 and q % 2 == 0 for p, q in table)
        assert all(p + q <= MAX_MOMENT_DEGREE for p, q in table)
        assert all(v > 0.0 for v in table.values())
        assert (2, 0) in table and (0, 6) in table

    def test_tensor_table_keys(self):
        table = moment_table(TensorKernel(0.4))
        assert all(v != 0.0 for v in table.values())
        for a, b, p, q in table:
            assert p + q + 2 <= MAX_MOMENT_DEGREE
            assert (p + (a == 1) + (b == 1)) % 2 == 0
            assert (q + (a == 2) + (b == 2)) % 2 == 0

    def test_unsupported_type(self):
        with pytest.raises(TypeError):
            moment_table(object())
