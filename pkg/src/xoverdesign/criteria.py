"""D-criteria, per-sequence sensitivities and directional derivatives.

Both objectives are minimised:

* ``d_theta``: ``Phi = -ln det M``; sensitivity ``trace(X*_i M^{-1} X*_i')``,
  bound ``m``.
* ``d_tau``: ``Phi = ln det(H M^{-1} H')``; sensitivity
  ``trace(A X*_i' X*_i)`` with ``A = M^{-1} H'(H M^{-1} H')^{-1} H M^{-1}``,
  bound ``t - 1``.

The directional derivative towards sequence ``i``, i.e. of
``Phi((1 - u) w + u e_i)`` at ``u = 0``, is ``bound - sensitivity_i``.  A
design is optimal iff it is zero on the support and non-negative elsewhere.
"""

from dataclasses import dataclass
import enum

import numpy as np
from scipy.linalg import solve_triangular

from .design import build_contrast_matrix
from .exceptions import DesignError, SingularInformationError
from .information import (
    cholesky_information,
    sequence_contributions,
    stack_grams,
)


class Criterion(enum.Enum):
    D_THETA = "d_theta"
    D_TAU = "d_tau"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        key = str(value).lower().strip()
        aliases = {"theta": cls.D_THETA, "d_theta": cls.D_THETA,
                   "tau": cls.D_TAU, "d_tau": cls.D_TAU}
        if key not in aliases:
            raise DesignError(f"unknown criterion {value!r}; expected theta or tau")
        return aliases[key]


@dataclass(frozen=True, eq=False)
class SensitivityProfile:
    values: np.ndarray
    bound: float
    directional_derivatives: np.ndarray


class DesignEvaluator:
    """Criterion evaluations for a fixed sequence set and model.

    The per-sequence factors ``X*_j`` do not depend on the proportions, so
    they are computed once and reused for every weight vector.
    """

    def __init__(self, sequences, spec, criterion):
        self.sequences = tuple(sequences)
        self.spec = spec
        self.criterion = Criterion.parse(criterion)
        self.contributions = sequence_contributions(self.sequences, spec)
        self.x_star = np.stack([c.x_star for c in self.contributions])
        self.grams = stack_grams(self.contributions)
        if self.criterion is Criterion.D_THETA:
            self.h = None
            self.bound = float(spec.m)
        else:
            self.h = build_contrast_matrix(spec.t, spec.p)
            self.bound = float(spec.t - 1)

    @property
    def k(self):
        return len(self.sequences)

    def information(self, w):
        return np.tensordot(np.asarray(w, float), self.grams, axes=1)

    def _tau_factor(self, lower):
        # columns W with A = W W'
        b = solve_triangular(lower, self.h.T, lower=True)
        b = solve_triangular(lower.T, b, lower=False)
        v = self.h @ b
        lv = np.linalg.cholesky(0.5 * (v + v.T))
        w_mat = solve_triangular(lv, b.T, lower=True).T
        return w_mat, lv

    def objective(self, w):
        lower = cholesky_information(self.information(w))
        if self.criterion is Criterion.D_THETA:
            return -2.0 * float(np.sum(np.log(np.diag(lower))))
        _, lv = self._tau_factor(lower)
        return 2.0 * float(np.sum(np.log(np.diag(lv))))

    def evaluate(self, w):
        """Objective and sensitivities from one factorization of ``M``."""
        lower = cholesky_information(self.information(w))
        if self.criterion is Criterion.D_THETA:
            phi = -2.0 * float(np.sum(np.log(np.diag(lower))))
            # trace(X* M^{-1} X*') = ||L^{-1} X*'||_F^2
            k, p, m = self.x_star.shape
            z = solve_triangular(lower, self.x_star.reshape(k * p, m).T, lower=True)
            s = np.sum(z.reshape(m, k, p) ** 2, axis=(0, 2))
        else:
            w_mat, lv = self._tau_factor(lower)
            phi = 2.0 * float(np.sum(np.log(np.diag(lv))))
            s = np.sum((self.x_star @ w_mat) ** 2, axis=(1, 2))
        return phi, s

    def sensitivities(self, w):
        return self.evaluate(w)[1]

    def profile(self, w):
        s = self.sensitivities(w)
        return SensitivityProfile(values=s, bound=self.bound,
                                  directional_derivatives=self.bound - s)


def _evaluator(design, spec, criterion):
    return DesignEvaluator(design.sequences, spec, criterion)


def objective(design, spec, criterion):
    """``-ln det M`` (d_theta) or ``ln det(H M^{-1} H')`` (d_tau), with n = 1."""
    return _evaluator(design, spec, criterion).objective(design.proportions)


def sensitivity_profile(design, spec, criterion):
    return _evaluator(design, spec, criterion).profile(design.proportions)


def sensitivity(design, spec, criterion, i):
    """Sensitivity of sequence ``i`` (0-based index into ``design.sequences``)."""
    if not 0 <= i < design.k:
        raise DesignError(f"sequence index {i} out of range for k={design.k}")
    return float(sensitivity_profile(design, spec, criterion).values[i])


def directional_derivative(design, spec, criterion, i):
    """Derivative of the objective when moving mass towards sequence ``i``."""
    if not 0 <= i < design.k:
        raise DesignError(f"sequence index {i} out of range for k={design.k}")
    return float(sensitivity_profile(design, spec, criterion).directional_derivatives[i])


def objective_sweep(sequences, spec, criterion, index=0, grid=1001, base=None):
    """Objective and directional derivative along a one-dimensional slice.

    Proportion ``index`` runs over ``linspace(0, 1, grid)``; the remaining
    mass is shared in proportion to ``base`` (uniform by default).  Points
    where ``M`` is singular come back as ``nan``.

    Returns ``(p_values, objective, derivative)``.
    """
    grid = int(grid)
    if grid < 2:
        raise DesignError("a sweep needs at least 2 grid points")
    ev = DesignEvaluator(sequences, spec, criterion)
    k = ev.k
    if not 0 <= index < k:
        raise DesignError(f"sequence index {index} out of range for k={k}")
    if k < 2:
        raise DesignError("a sweep needs at least two sequences")
    b = np.full(k, 1.0 / k) if base is None else np.asarray(base, dtype=float)
    rest = b.copy()
    rest[index] = 0.0
    if rest.sum() <= 0:
        raise DesignError("the base design puts all mass on the swept sequence")
    rest /= rest.sum()
    p_values = np.linspace(0.0, 1.0, grid)
    phi = np.full(grid, np.nan)
    deriv = np.full(grid, np.nan)
    for g, pv in enumerate(p_values):
        w = (1.0 - pv) * rest
        w[index] = pv
        try:
            phi[g], s = ev.evaluate(w)
        except SingularInformationError:
            continue
        deriv[g] = ev.bound - s[index]
    return p_values, phi, deriv
