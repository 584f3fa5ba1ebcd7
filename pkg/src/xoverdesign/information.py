"""Transformed design matrices, the GEE information matrix and variances.

With ``n = 1`` the information matrix of a design with proportions ``w`` is

    M(w) = sum_j w_j X*_j' X*_j,    X*_j = R D_j^{-1/2} G_j X_j,

and ``Var(theta_hat) = M^{-1}``, ``Var(tau_hat) = H M^{-1} H'``.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import cho_solve, solve_triangular

from .correlation import build_correlation, factor_inverse
from .design import build_contrast_matrix, build_design_matrix
from .exceptions import SingularInformationError
from .links import evaluate_link

CONDITION_LIMIT = 1e12


@dataclass(frozen=True, eq=False)
class SequenceContribution:
    x_star: np.ndarray
    gram: np.ndarray


@dataclass(frozen=True, eq=False)
class InformationMatrix:
    m_matrix: np.ndarray
    contributions: tuple
    proportions: np.ndarray


def correlation_factor(spec):
    return factor_inverse(build_correlation(spec.correlation, spec.p))


def sequence_contribution(seq, spec, factor=None):
    """``X* = R D^{-1/2} G X`` for one sequence and its Gram matrix."""
    if factor is None:
        factor = correlation_factor(spec)
    x = build_design_matrix(seq, spec.t, spec.p)
    ev = evaluate_link(x, spec)
    scale = ev.g_diag / np.sqrt(ev.d_diag)
    x_star = factor.r @ (scale[:, None] * x)
    gram = x_star.T @ x_star
    return SequenceContribution(x_star=x_star, gram=0.5 * (gram + gram.T))


def sequence_contributions(sequences, spec):
    factor = correlation_factor(spec)
    return tuple(sequence_contribution(s, spec, factor) for s in sequences)


def stack_grams(contributions):
    return np.stack([c.gram for c in contributions])


def information_matrix(design, spec, n=1.0, contributions=None):
    """Information matrix ``M = n * sum_j p_j X*_j' X*_j``."""
    if contributions is None:
        contributions = sequence_contributions(design.sequences, spec)
    w = np.asarray(design.proportions, dtype=float)
    m_matrix = n * np.einsum("j,jab->ab", w, stack_grams(contributions))
    return InformationMatrix(m_matrix=m_matrix, contributions=tuple(contributions),
                             proportions=w)


def _singular(m_matrix, what="information matrix"):
    evals, evecs = np.linalg.eigh(0.5 * (m_matrix + m_matrix.T))
    top = max(evals[-1], 0.0)
    smallest = evals[0]
    cond = top / smallest if smallest > 0 else np.inf
    deficient = evecs[:, evals <= top / CONDITION_LIMIT]
    return SingularInformationError(
        f"{what} is singular (smallest eigenvalue {smallest:.3g}, condition {cond:.3g})",
        smallest_eigenvalue=smallest, directions=deficient, condition=cond)


def cholesky_information(m_matrix):
    """Lower Cholesky factor of ``M``; raises when ``M`` is singular.

    Condition numbers above ``CONDITION_LIMIT`` count as singular.
    """
    try:
        lower = np.linalg.cholesky(m_matrix)
    except np.linalg.LinAlgError:
        raise _singular(m_matrix) from None
    d = np.diag(lower)
    # cond(M) >= (max d / min d)^2; exact check only when the cheap bound is close
    if (d.max() / d.min()) ** 2 > CONDITION_LIMIT / 1e3:
        evals = np.linalg.eigvalsh(m_matrix)
        if evals[0] <= 0 or evals[-1] / evals[0] > CONDITION_LIMIT:
            raise _singular(m_matrix)
    return lower


def _as_matrix(info):
    return info.m_matrix if isinstance(info, InformationMatrix) else np.asarray(info, float)


def variance_theta(info):
    """``Var(theta_hat) = M^{-1}``."""
    m_matrix = _as_matrix(info)
    lower = cholesky_information(m_matrix)
    return cho_solve((lower, True), np.eye(m_matrix.shape[0]))


def variance_tau(info, h):
    """``Var(tau_hat) = H M^{-1} H'``."""
    m_matrix = _as_matrix(info)
    lower = cholesky_information(m_matrix)
    z = solve_triangular(lower, np.asarray(h, float).T, lower=True)
    return z.T @ z


def log_det_information(m_matrix):
    lower = cholesky_information(m_matrix)
    return 2.0 * np.sum(np.log(np.diag(lower)))


def relative_d_efficiency(design_a, design_b, spec, criterion="d_theta"):
    """Relative D-efficiency of ``design_a`` with respect to ``design_b``.

    For the full parameter vector this is ``(det M_a / det M_b)^(1/m)``; for
    the direct treatment effects it is
    ``(det Var_b(tau) / det Var_a(tau))^(1/(t-1))``.  Values above one favour
    ``design_a``.
    """
    from .criteria import Criterion

    criterion = Criterion.parse(criterion)
    m_a = information_matrix(design_a, spec).m_matrix
    m_b = information_matrix(design_b, spec).m_matrix
    if criterion is Criterion.D_THETA:
        return float(np.exp((log_det_information(m_a) - log_det_information(m_b)) / spec.m))
    h = build_contrast_matrix(spec.t, spec.p)
    va = np.linalg.slogdet(variance_tau(m_a, h))[1]
    vb = np.linalg.slogdet(variance_tau(m_b, h))[1]
    return float(np.exp((vb - va) / (spec.t - 1)))
