from __future__ import annotations
from dataclasses import dataclass, replace


@dataclass(frozen=True)
class Tolerance:
    """
    The numerical tolerances shared by every matrixcs module

    A single instance is threaded through all of the solvers, constructors, and
    checks so that a run can be reconfigured in one place.

    Attributes
    ----------
    atol: float
        The absolute slack allowed in every comparison
    rtol: float
        The relative slack, scaled by max(1, magnitude) of the compared quantity
    offdiag: float
        Jacobi stops once the off-diagonal Frobenius mass is below offdiag * ||H||_F
    rank: float
        Singular values below rank * sigma_max are treated as zero
    pd: float
        A matrix is positive definite if lambda_min > pd * lambda_max
    max_sweeps: int
        The maximum number of cyclic Jacobi sweeps
    max_root_iter: int
        The maximum number of Aberth-Ehrlich iterations
    root_step: float
        Aberth-Ehrlich stops once every root moves less than this (relative) amount
    """

    atol: float = 1e-12
    rtol: float = 1e-9
    offdiag: float = 1e-13
    rank: float = 1e-12
    pd: float = 1e-12
    max_sweeps: int = 100
    max_root_iter: int = 200
    root_step: float = 1e-12

    def __post_init__(self):
        if self.atol <= 0 or self.rtol <= 0:
            raise ValueError("Tolerances must be positive")

    def bound(self, scale: float = 0) -> float:
        """
        The slack allowed when comparing quantities of a given magnitude

        Parameters
        ----------
        scale: float, optional
            The magnitude of the compared quantities

        Returns
        -------
        float
            atol + rtol * max(1, |scale|)
        """
        return self.atol + self.rtol * max(1.0, abs(scale))

    def replace(self, **changes) -> Tolerance:
        """
        Create a copy of this Tolerance with some of its fields changed
        """
        return replace(self, **changes)


DEFAULT_TOL = Tolerance()
