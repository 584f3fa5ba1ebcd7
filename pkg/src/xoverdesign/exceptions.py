"""Exception hierarchy shared by all modules."""

import numpy as np


class XoverDesignError(Exception):
    """Base class for all package errors."""


class DesignError(XoverDesignError, ValueError):
    """Invalid sequence, design, or model specification input."""


class NumericalError(XoverDesignError, ArithmeticError):
    """A computation produced non-finite or out-of-domain values."""


class SingularInformationError(NumericalError):
    """The information matrix is singular or numerically ill-conditioned.

    Attributes
    ----------
    smallest_eigenvalue : float
        Smallest eigenvalue of the offending matrix.
    directions : ndarray, shape (m, r)
        Eigenvectors spanning the (numerically) deficient directions.
    condition : float
        Ratio of the largest to the smallest eigenvalue (``inf`` when the
        smallest eigenvalue is not positive).
    """

    def __init__(self, message, smallest_eigenvalue=np.nan, directions=None,
                 condition=np.inf):
        super().__init__(message)
        self.smallest_eigenvalue = smallest_eigenvalue
        self.directions = directions if directions is not None else np.empty((0, 0))
        self.condition = condition


class ConvergenceError(NumericalError):
    """An iterative solver failed to converge."""


class InfeasibleSupportError(XoverDesignError):
    """The equivalence system has no valid root on the assumed support.

    ``reason`` is ``"negative"`` when the root has a negative proportion and
    ``"off_support"`` when an excluded sequence violates the inequality side
    of the equivalence condition.
    """

    def __init__(self, message, reason, proportions=None):
        super().__init__(message)
        self.reason = reason
        self.proportions = proportions
