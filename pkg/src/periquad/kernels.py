"""Micromodulus kernels and their closed-form moments over the horizon disc.

Two bond-force weightings are supported:

* a scalar kernel ``c1 * (1 - |xi|/delta)`` with compact support on the
  horizon disc, normalized by ``c1 = 20 / (pi delta^4)`` so that its
  second moments satisfy ``M_20 = M_02 = 1``;
* a tensor kernel ``c2 * (xi ⊗ xi) / |xi|^3`` with the 2D calibration
  ``c2 = 72 kappa / (5 pi delta^3)`` (the 3D value ``18 kappa /
  (pi delta^4)`` is exposed for completeness but untested here).

Both kernels are even in ``xi``, so every disc moment with an odd
coordinate exponent vanishes identically.  The even moments factor into
a radial integral (elementary: the integrands are polynomials in the
radius) and an angular integral of ``cos^p sin^q``, evaluated with the
double-factorial formula.  These closed forms feed the exact
manufactured-solution forcing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ScalarKernel", "TensorKernel", "moment_table"]

# Moments are only tabulated up to this total degree of the integrand;
# quartic test fields need no more.
MAX_MOMENT_DEGREE = 6


def _double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


def _angular_integral(p: int, q: int) -> float:
    """Integral of cos^p(t) sin^q(t) over one period; 0 unless p, q even."""
    if p < 0 or q < 0 or p % 2 or q % 2:
        return 0.0
    return (
        2.0
        * math.pi
        * _double_factorial(p - 1)
        * _double_factorial(q - 1)
        / _double_factorial(p + q)
    )


@dataclass(frozen=True)
class ScalarKernel:
    """Radial, compactly supported micromodulus with linear decay."""

    delta: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError(f"horizon must be positive, got {self.delta}")

    @property
    def c1(self) -> float:
        return 20.0 / (math.pi * self.delta**4)

    def eval(self, xi) -> np.ndarray:
        """Kernel value(s) at bond offset(s) ``xi`` of shape (..., 2)."""
        xi = np.asarray(xi, dtype=float)
        r = np.hypot(xi[..., 0], xi[..., 1])
        return np.where(r <= self.delta, self.c1 * (1.0 - r / self.delta), 0.0)

    def __call__(self, xi) -> float:
        return float(self.eval(xi))

    def moment(self, p: int, q: int) -> float:
        """Disc moment ``∫ s(xi) xi_1^p xi_2^q dxi``; exactly 0 for odd p or q."""
        if p < 0 or q < 0:
            raise ValueError("moment exponents must be non-negative")
        if p % 2 or q % 2:
            return 0.0
        if p + q > MAX_MOMENT_DEGREE:
            raise ValueError(f"moment degree {p + q} beyond table cap {MAX_MOMENT_DEGREE}")
        radial = self.delta ** (p + q + 2) / ((p + q + 2) * (p + q + 3))
        return self.c1 * radial * _angular_integral(p, q)


@dataclass(frozen=True)
class TensorKernel:
    """Dyadic bond-direction kernel ``c2 (xi ⊗ xi) / |xi|^3``.

    ``kappa`` is the material scaling; solutions of the constrained
    steady-state problem are invariant under rescaling it, since both
    the operator and the forcing are linear in ``c2``.
    """

    delta: float
    kappa: float = 1.0

    def __post_init__(self):
        if not self.delta > 0.0:
            raise ValueError(f"horizon must be positive, got {self.delta}")
        if not self.kappa > 0.0:
            raise ValueError(f"kappa must be positive, got {self.kappa}")

    @property
    def c2(self) -> float:
        return 72.0 * self.kappa / (5.0 * math.pi * self.delta**3)

    @property
    def c2_3d(self) -> float:
        # 3D calibration branch, stored for completeness; nothing in the
        # 2D solver path uses it.
        return 18.0 * self.kappa / (math.pi * self.delta**4)

    def eval(self, xi) -> np.ndarray:
        """2x2 kernel matrices at bond offset(s) ``xi`` of shape (..., 2).

        Raises on a zero-length bond: the kernel is singular there and
        callers must exclude the self cell.
        """
        xi = np.asarray(xi, dtype=float)
        r = np.hypot(xi[..., 0], xi[..., 1])
        if np.any(r == 0.0):
            raise ValueError("tensor kernel is singular at a zero-length bond")
        scale = np.where(r <= self.delta, self.c2 / r**3, 0.0)
        out = np.empty(xi.shape[:-1] + (2, 2))
        out[..., 0, 0] = scale * xi[..., 0] * xi[..., 0]
        out[..., 0, 1] = scale * xi[..., 0] * xi[..., 1]
        out[..., 1, 0] = out[..., 0, 1]
        out[..., 1, 1] = scale * xi[..., 1] * xi[..., 1]
        return out

    def __call__(self, xi) -> np.ndarray:
        return self.eval(xi)

    def moment(self, a: int, b: int, p: int, q: int) -> float:
        """Disc moment ``∫ c2 xi_a xi_b xi_1^p xi_2^q / |xi|^3 dxi``.

        Indices a, b are 1-based components.  Zero whenever the total
        exponent of either coordinate in the numerator is odd.
        """
        if a not in (1, 2) or b not in (1, 2):
            raise ValueError("tensor indices must be 1 or 2")
        if p < 0 or q < 0:
            raise ValueError("moment exponents must be non-negative")
        e1 = p + (a == 1) + (b == 1)
        e2 = q + (a == 2) + (b == 2)
        if e1 % 2 or e2 % 2:
            return 0.0
        if p + q + 2 > MAX_MOMENT_DEGREE:
            raise ValueError(f"moment degree {p + q + 2} beyond table cap {MAX_MOMENT_DEGREE}")
        # |xi|^{-3} and the polar Jacobian leave a radial integrand r^{p+q}.
        radial = self.delta ** (p + q + 1) / (p + q + 1)
        return self.c2 * radial * _angular_integral(e1, e2)


def moment_table(kernel) -> dict:
    """All non-zero moments up to the degree cap, keyed by exponents.

    Scalar kernels map ``(p, q)`` to moments; tensor kernels map
    ``(a, b, p, q)``.
    """
    table = {}
    if isinstance(kernel, ScalarKernel):
        for p in range(0, MAX_MOMENT_DEGREE + 1, 2):
            for q in range(0, MAX_MOMENT_DEGREE - p + 1, 2):
                table[(p, q)] = kernel.moment(p, q)
    elif isinstance(kernel, TensorKernel):
        for a in (1, 2):
            for b in (1, 2):
                for p in range(0, MAX_MOMENT_DEGREE - 1):
                    for q in range(0, MAX_MOMENT_DEGREE - 1 - p):
                        m = kernel.moment(a, b, p, q)
                        if m != 0.0:
                            table[(a, b, p, q)] = m
    else:
        raise TypeError(f"unsupported kernel type {type(kernel)!r}")
    return table
