"""Working correlation matrices and a factor ``R`` with ``R.T @ R = C^{-1}``."""

from dataclasses import dataclass

import numpy as np

from .exceptions import DesignError, NumericalError

STRUCTURES = ("ar1", "compound_symmetry", "independence")
FACTOR_RESIDUAL_TOL = 1e-10


@dataclass(frozen=True)
class CorrelationSpec:
    structure: str = "ar1"
    alpha: float = 0.0

    def __post_init__(self):
        structure = str(self.structure).lower()
        if structure not in STRUCTURES:
            raise DesignError(
                f"unknown correlation structure {self.structure!r}; expected one of {STRUCTURES}")
        alpha = float(self.alpha)
        if not np.isfinite(alpha):
            raise DesignError("correlation alpha must be finite")
        object.__setattr__(self, "structure", structure)
        object.__setattr__(self, "alpha", alpha)

    def check(self, p):
        a = self.alpha
        if self.structure == "ar1" and not abs(a) < 1:
            raise DesignError(f"ar1 needs |alpha| < 1 (singular otherwise), got {a}")
        if self.structure == "compound_symmetry":
            lower = -1.0 / (p - 1) if p > 1 else -np.inf
            if not lower < a < 1:
                raise DesignError(
                    f"compound_symmetry needs {lower:.6g} < alpha < 1 for p={p}, got {a}")


@dataclass(frozen=True, eq=False)
class CorrelationFactor:
    c: np.ndarray
    r: np.ndarray


def build_correlation(spec, p):
    """The ``p x p`` working correlation matrix for ``spec``."""
    spec.check(p)
    if spec.structure == "independence":
        return np.eye(p)
    if spec.structure == "ar1":
        lag = np.abs(np.subtract.outer(np.arange(p), np.arange(p)))
        return spec.alpha ** lag
    c = np.full((p, p), spec.alpha)
    np.fill_diagonal(c, 1.0)
    return c


def factor_inverse(c):
    """Upper-triangular ``R`` with ``R.T @ R = inv(c)``.

    The inverse is formed explicitly (``p`` is a handful of periods) and its
    Cholesky factor transposed.
    """
    c = np.asarray(c, dtype=float)
    if c.ndim != 2 or c.shape[0] != c.shape[1]:
        raise DesignError(f"correlation matrix must be square, got shape {c.shape}")
    if not np.allclose(c, c.T, rtol=0, atol=1e-14):
        raise DesignError("correlation matrix must be symmetric")
    try:
        np.linalg.cholesky(c)
        c_inv = np.linalg.inv(c)
        c_inv = 0.5 * (c_inv + c_inv.T)
        lower = np.linalg.cholesky(c_inv)
    except np.linalg.LinAlgError as exc:
        raise NumericalError("correlation matrix is not positive definite") from exc
    r = lower.T
    resid = np.max(np.abs(r.T @ r @ c - np.eye(c.shape[0])))
    if resid >= FACTOR_RESIDUAL_TOL:
        raise NumericalError(f"correlation factor residual {resid:.3g} too large")
    return CorrelationFactor(c=c, r=r)
