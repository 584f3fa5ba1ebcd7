"""Link functions, variance functions and the model specification.

Only canonical family/link pairs are supported:
``bernoulli + logit``, ``poisson + log`` and ``gaussian + identity``.
Gaussian dispersion is fixed at one.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from .correlation import CorrelationSpec
from .design import n_parameters
from .exceptions import DesignError, NumericalError

CANONICAL_LINK = {"bernoulli": "logit", "poisson": "log", "gaussian": "identity"}
FAMILIES = tuple(CANONICAL_LINK)
LINKS = tuple(CANONICAL_LINK.values())


def _check_link(link):
    if link not in LINKS:
        raise DesignError(f"unknown link {link!r}; expected one of {LINKS}")


def linear_predictor(x, theta):
    x = np.asarray(x, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if theta.ndim != 1 or x.shape[-1] != theta.shape[0]:
        raise DesignError(
            f"theta has length {theta.size} but the design matrix has {x.shape[-1]} columns")
    return x @ theta


def inverse_link(eta, link):
    """Mean ``mu = g^{-1}(eta)``.

    The logistic inverse saturates to exactly 0 or 1 for ``|eta|`` beyond
    roughly 37; the log inverse overflows to ``inf`` beyond roughly 709.
    """
    _check_link(link)
    eta = np.asarray(eta, dtype=float)
    if link == "logit":
        out = expit(eta)
    elif link == "log":
        with np.errstate(over="ignore"):
            out = np.exp(eta)
    else:
        out = eta.copy()
    return out[()] if out.ndim == 0 else out


def inverse_link_derivative(eta, link):
    """Derivative ``(g^{-1})'(eta)``."""
    _check_link(link)
    eta = np.asarray(eta, dtype=float)
    if link == "logit":
        mu = expit(eta)
        out = mu * (1.0 - mu)
    elif link == "log":
        with np.errstate(over="ignore"):
            out = np.exp(eta)
    else:
        out = np.ones_like(eta)
    return out[()] if out.ndim == 0 else out


def variance_function(mu, family):
    """Response variance as a function of the mean."""
    if family not in FAMILIES:
        raise DesignError(f"unknown family {family!r}; expected one of {FAMILIES}")
    mu = np.asarray(mu, dtype=float)
    if family == "bernoulli":
        if np.any((mu < 0) | (mu > 1)) or np.any(np.isnan(mu)):
            raise NumericalError(f"bernoulli mean must lie in [0, 1], got {mu}")
        out = mu * (1.0 - mu)
    elif family == "poisson":
        if np.any(mu < 0) or np.any(np.isnan(mu)):
            raise NumericalError(f"poisson mean must be non-negative, got {mu}")
        out = mu.copy()
    else:
        out = np.ones_like(mu)
    return out[()] if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ModelSpec:
    """Everything needed to evaluate the information matrix at a guess of theta."""

    theta: np.ndarray
    family: str
    t: int
    p: int
    correlation: CorrelationSpec = field(default_factory=CorrelationSpec)
    link: str = None

    def __post_init__(self):
        family = str(self.family).lower()
        if family not in FAMILIES:
            raise DesignError(f"unknown family {self.family!r}; expected one of {FAMILIES}")
        link = CANONICAL_LINK[family] if self.link is None else str(self.link).lower()
        _check_link(link)
        if link != CANONICAL_LINK[family]:
            raise DesignError(
                f"unsupported family/link pair {family}+{link}; "
                f"{family} requires the {CANONICAL_LINK[family]} link")
        t, p = int(self.t), int(self.p)
        if t < 2 or p < 1:
            raise DesignError(f"need t >= 2 and p >= 1, got t={t}, p={p}")
        theta = np.array(self.theta, dtype=float).ravel()
        m = n_parameters(t, p)
        if theta.size != m:
            raise DesignError(f"theta has length {theta.size}; expected m = p + 2t - 2 = {m}")
        if not np.all(np.isfinite(theta)):
            raise DesignError("theta must be finite")
        theta.setflags(write=False)
        corr = self.correlation
        if isinstance(corr, dict):
            corr = CorrelationSpec(**corr)
        corr.check(p)
        for name, value in (("family", family), ("link", link), ("t", t), ("p", p),
                            ("theta", theta), ("correlation", corr)):
            object.__setattr__(self, name, value)

    @property
    def m(self):
        return n_parameters(self.t, self.p)

    def with_theta(self, theta):
        return ModelSpec(theta, self.family, self.t, self.p, self.correlation, self.link)


@dataclass(frozen=True, eq=False)
class LinkEvaluation:
    eta: np.ndarray
    mu: np.ndarray
    g_diag: np.ndarray
    d_diag: np.ndarray


def evaluate_link(x, spec):
    """Linear predictor, mean, ``G`` diagonal and ``D`` diagonal for one sequence."""
    eta = linear_predictor(x, spec.theta)
    mu = np.asarray(inverse_link(eta, spec.link), dtype=float)
    if not np.all(np.isfinite(mu)):
        raise NumericalError(f"non-finite mean for eta = {eta}; theta is too extreme")
    g = np.asarray(inverse_link_derivative(eta, spec.link), dtype=float)
    d = np.asarray(variance_function(mu, spec.family), dtype=float)
    if not (np.all(np.isfinite(g)) and np.all(np.isfinite(d))):
        raise NumericalError(f"non-finite link derivative or variance for eta = {eta}")
    if np.any(d <= 0):
        raise NumericalError(f"variance underflowed to zero for eta = {eta}; theta is too extreme")
    return LinkEvaluation(eta=eta, mu=mu, g_diag=g, d_diag=d)
