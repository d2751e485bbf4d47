"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A parameter combination violates a structural precondition
    (mesh does not tile the unit square, horizon not resolved, field
    degree beyond the moment table, ...)."""


class SolverError(RuntimeError):
    """The iterative solver failed to reach the requested residual."""

    def __init__(self, message, residual=None, iterations=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations


class IndefiniteOperatorError(RuntimeError):
    """Negative curvature encountered in CG: the assembled operator is
    not positive definite, which signals an assembly bug."""


class OracleConvergenceError(RuntimeError):
    """A numerical-quadrature oracle failed to converge within its
    refinement budget."""
