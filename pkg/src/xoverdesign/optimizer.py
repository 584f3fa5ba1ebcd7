"""Optimal proportions on the simplex.

Three routes to the same optimum:

* ``multiplicative``: ``w_i <- w_i * s_i / bound`` (default for d_theta).
* ``projected_gradient``: Euclidean projected gradient with Armijo
  backtracking (default for d_tau).
* ``equivalence_newton``: Newton's method on the equivalence conditions
  ``s_i = bound`` over an assumed support.

``grid_oracle`` is an exhaustive lattice search used to cross-check all of
them; it evaluates the objectives through determinants of sub-blocks of ``M``
rather than through the evaluator used by the iterative methods.
"""

from dataclasses import dataclass
import logging
import math

import numpy as np

from .criteria import Criterion, DesignEvaluator, SensitivityProfile
from .design import CrossoverDesign
from .exceptions import (
    ConvergenceError,
    DesignError,
    InfeasibleSupportError,
    SingularInformationError,
)
from .information import CONDITION_LIMIT

log = logging.getLogger(__name__)

METHODS = ("multiplicative", "projected_gradient", "equivalence_newton")
LATTICE_CAP = 10**8
ARMIJO_C = 1e-4
NEWTON_FD_STEP = 1e-7
NEWTON_RESIDUAL_TOL = 1e-9


@dataclass
class OptimizerOptions:
    method: str = None
    max_iterations: int = 100_000
    tolerance: float = 1e-6
    zero_threshold: float = 1e-8
    initial: object = "uniform"

    def __post_init__(self):
        if self.method is not None and self.method not in METHODS:
            raise DesignError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if not self.tolerance > 0:
            raise DesignError("tolerance must be positive")
        if not self.zero_threshold > 0:
            raise DesignError("zero_threshold must be positive")
        if int(self.max_iterations) < 1:
            raise DesignError("max_iterations must be >= 1")

    def resolved_method(self, criterion):
        if self.method is not None:
            return self.method
        if Criterion.parse(criterion) is Criterion.D_THETA:
            return "multiplicative"
        return "projected_gradient"


@dataclass(frozen=True, eq=False)
class OptimizationResult:
    design: CrossoverDesign
    objective_value: float
    profile: SensitivityProfile
    iterations: int
    converged: bool
    method: str = ""

    @property
    def max_violation(self):
        return violation(self.design.proportions, self.profile.values, self.profile.bound,
                         1e-8)


def violation(w, s, bound, zero_threshold):
    """Largest breach of the equivalence conditions.

    ``|s_i - bound|`` for supported sequences, ``max(0, s_i - bound)`` for
    sequences with ``w_i <= zero_threshold``.
    """
    w = np.asarray(w)
    gap = np.asarray(s) - bound
    per = np.where(w > zero_threshold, np.abs(gap), np.maximum(gap, 0.0))
    return float(per.max())


def project_to_simplex(v):
    """Euclidean projection onto ``{w >= 0, sum w = 1}`` (sort-based)."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    idx = np.arange(1, v.size + 1)
    rho = np.nonzero(u - css / idx > 0)[0][-1]
    shift = css[rho] / (rho + 1.0)
    return np.maximum(v - shift, 0.0)


def _renormalize(w):
    w = np.maximum(w, 0.0)
    return w / w.sum()


def _initial_weights(sequences, initial):
    k = len(sequences)
    if initial is None or (isinstance(initial, str) and initial == "uniform"):
        return np.full(k, 1.0 / k)
    if isinstance(initial, CrossoverDesign):
        if initial.sequences != tuple(sequences):
            raise DesignError("initial design must use the same sequences, in order")
        return np.array(initial.proportions, dtype=float)
    w = np.asarray(initial, dtype=float)
    if w.shape != (k,):
        raise DesignError(f"initial weights must have length {k}")
    return _renormalize(w)


def multiplicative_step(design, spec, criterion):
    """One multiplicative update ``w_i <- w_i s_i / bound``, renormalised."""
    ev = DesignEvaluator(design.sequences, spec, criterion)
    s = ev.sensitivities(design.proportions)
    return design.with_proportions(_renormalize(design.proportions * s / ev.bound))


def _run_multiplicative(ev, w, opts):
    phi, s = ev.evaluate(w)
    for it in range(1, opts.max_iterations + 1):
        if violation(w, s, ev.bound, opts.zero_threshold) <= opts.tolerance:
            return w, phi, s, it - 1, True
        w = _renormalize(w * s / ev.bound)
        phi, s = ev.evaluate(w)
    return w, phi, s, opts.max_iterations, \
        violation(w, s, ev.bound, opts.zero_threshold) <= opts.tolerance


def _safe_evaluate(ev, w):
    try:
        return ev.evaluate(w)
    except SingularInformationError:
        return np.inf, None


def _run_projected_gradient(ev, w, opts):
    phi, s = ev.evaluate(w)
    step = 1.0 / max(float(np.max(s)), 1.0)
    for it in range(1, opts.max_iterations + 1):
        if violation(w, s, ev.bound, opts.zero_threshold) <= opts.tolerance:
            return w, phi, s, it - 1, True
        grad = -s
        step *= 2.0
        while True:
            w_new = project_to_simplex(w - step * grad)
            phi_new, s_new = _safe_evaluate(ev, w_new)
            if phi_new <= phi + ARMIJO_C * grad @ (w_new - w):
                break
            step *= 0.5
            if step < 1e-20:
                return w, phi, s, it, False
        w, phi, s = w_new, phi_new, s_new
    return w, phi, s, opts.max_iterations, \
        violation(w, s, ev.bound, opts.zero_threshold) <= opts.tolerance


def _result(ev, w, phi, s, iterations, converged, method):
    w = _renormalize(w)
    return OptimizationResult(
        design=CrossoverDesign(ev.sequences, w),
        objective_value=phi,
        profile=SensitivityProfile(values=s, bound=ev.bound,
                                   directional_derivatives=ev.bound - s),
        iterations=iterations, converged=bool(converged), method=method)


def optimize(sequences, spec, criterion, options=None):
    """Optimal proportions over ``sequences`` for the given criterion.

    Non-convergence does not raise: the best iterate is returned with
    ``converged=False``.  A singular information matrix at the starting point
    raises ``SingularInformationError``.
    """
    opts = options or OptimizerOptions()
    criterion = Criterion.parse(criterion)
    ev = DesignEvaluator(sequences, spec, criterion)
    w0 = _initial_weights(ev.sequences, opts.initial)
    ev.evaluate(w0)
    method = opts.resolved_method(criterion)
    if method == "equivalence_newton":
        try:
            design, its = _solve_equivalence(ev, list(range(ev.k)), w0,
                                             min(opts.max_iterations, 100))
            phi, s = ev.evaluate(design.proportions)
            conv = violation(design.proportions, s, ev.bound, opts.zero_threshold) \
                <= opts.tolerance
            return _result(ev, design.proportions, phi, s, its, conv, method)
        except (InfeasibleSupportError, ConvergenceError) as exc:
            log.info("equivalence system failed on full support (%s); falling back", exc)
            method = OptimizerOptions().resolved_method(criterion)
    runner = _run_multiplicative if method == "multiplicative" else _run_projected_gradient
    w, phi, s, its, conv = runner(ev, w0, opts)
    if not conv:
        log.warning("%s did not converge in %d iterations", method, its)
    return _result(ev, w, phi, s, its, conv, method)


def _damped_step(residual, x, dx, r):
    norm0 = np.linalg.norm(r)
    step = 1.0
    while step >= 1e-12:
        try:
            r_new = residual(x + step * dx)
        except SingularInformationError:
            r_new = None
        # accept any finite step once it has shrunk a lot; Newton may need to climb
        if r_new is not None and (np.linalg.norm(r_new) < norm0 or step < 1e-3):
            return x + step * dx, r_new
        step *= 0.5
    raise ConvergenceError("Newton line search failed")


def _solve_equivalence(ev, support, w0, max_iterations=100):
    k = ev.k
    support = sorted(set(int(i) for i in support))
    if not support or support[0] < 0 or support[-1] >= k:
        raise DesignError(f"support indices must lie in 0..{k - 1}")
    x = np.asarray(w0, dtype=float)[support]
    x = x / x.sum() if x.sum() > 0 else np.full(len(support), 1.0 / len(support))

    def full(xs):
        w = np.zeros(k)
        w[support] = xs
        return w

    def residual(xs):
        s = ev.sensitivities(full(xs))
        return np.append(s[support] - ev.bound, xs.sum() - 1.0)

    iterations = 0
    try:
        r = residual(x)
        while np.linalg.norm(r) >= NEWTON_RESIDUAL_TOL:
            if iterations >= max_iterations:
                raise ConvergenceError(
                    f"Newton did not reach residual {NEWTON_RESIDUAL_TOL:g} in "
                    f"{max_iterations} iterations (last {np.linalg.norm(r):.3g})")
            jac = np.empty((r.size, x.size))
            for j in range(x.size):
                xh = x.copy()
                xh[j] += NEWTON_FD_STEP
                jac[:, j] = (residual(xh) - r) / NEWTON_FD_STEP
            dx = np.linalg.lstsq(jac, -r, rcond=None)[0]
            x, r = _damped_step(residual, x, dx, r)
            iterations += 1
    except SingularInformationError as exc:
        raise ConvergenceError(f"Newton iterate has singular information: {exc}") from exc
    w = full(x)
    if np.any(x < 0):
        raise InfeasibleSupportError(
            f"equivalence root has negative proportions {x}; the support is wrong",
            reason="negative", proportions=w)
    w = _renormalize(w)
    s = ev.sensitivities(w)
    off = [i for i in range(k) if i not in support]
    if off and np.max(s[off] - ev.bound) > 1e-6:
        raise InfeasibleSupportError(
            f"excluded sequences {[str(ev.sequences[i]) for i in off]} have sensitivities "
            f"{s[off]} above the bound {ev.bound:g}; the support is too small",
            reason="off_support", proportions=w)
    return CrossoverDesign(ev.sequences, w), iterations


def solve_equivalence_system(sequences, spec, criterion, support=None, initial=None,
                             max_iterations=100):
    """Solve ``sensitivity_i = bound`` for ``i`` in ``support`` and ``sum w = 1``.

    Uses Newton's method with a forward-difference Jacobian.  The root is
    checked afterwards against the inequality condition for every sequence
    outside ``support``.  Raises ``InfeasibleSupportError`` when the support
    guess is wrong and ``ConvergenceError`` when Newton fails.
    """
    ev = DesignEvaluator(sequences, spec, criterion)
    if support is None:
        support = range(ev.k)
    w0 = _initial_weights(ev.sequences, initial)
    return _solve_equivalence(ev, support, w0, max_iterations)[0]


# ---------------------------------------------------------------------------
# lattice oracle

def _lattice_chunks(k, n):
    """Simplex lattice points ``{c in N^k : sum c = n}`` in lexicographic order.

    Yields ``(chunk, ...)`` arrays whose last two coordinates vary fastest.
    """
    if k == 1:
        yield np.array([[n]])
        return
    if k == 2:
        a = np.arange(n + 1)
        yield np.column_stack([a, n - a])
        return

    def rec(prefix, remaining, depth):
        if depth == k - 2:
            a = np.arange(remaining + 1)
            head = np.broadcast_to(np.array(prefix), (a.size, len(prefix)))
            yield np.column_stack([head, a, remaining - a])
            return
        for c in range(remaining + 1):
            yield from rec(prefix + [c], remaining - c, depth + 1)

    yield from rec([], n, 0)


def _batch_objective(grams, weights, criterion, tau_idx):
    mats = np.tensordot(weights, grams, axes=1)
    evals = np.linalg.eigvalsh(mats)
    ok = (evals[:, 0] > 0) & (evals[:, -1] <= CONDITION_LIMIT * np.maximum(evals[:, 0], 0))
    with np.errstate(divide="ignore", invalid="ignore"):
        logdet = np.sum(np.log(np.where(ok[:, None], evals, 1.0)), axis=1)
        if criterion is Criterion.D_THETA:
            phi = -logdet
        else:
            # ln det(H M^-1 H') = ln det M_rest - ln det M  (Schur complement)
            rest = np.setdiff1d(np.arange(grams.shape[1]), tau_idx)
            sub = mats[:, rest][:, :, rest]
            sign, logsub = np.linalg.slogdet(sub)
            ok &= sign > 0
            phi = logsub - logdet
    return np.where(ok, phi, np.inf)


def grid_oracle(sequences, spec, criterion, resolution=0.001, cap=LATTICE_CAP):
    """Brute-force minimiser over the simplex lattice of spacing ``resolution``.

    Ties go to the lexicographically smallest lattice point.
    """
    criterion = Criterion.parse(criterion)
    if not resolution > 0:
        raise DesignError("resolution must be positive")
    n = int(round(1.0 / resolution))
    if n < 1 or not math.isclose(n * resolution, 1.0, rel_tol=1e-9):
        raise DesignError(f"1/resolution must be a positive integer, got {resolution}")
    ev = DesignEvaluator(sequences, spec, criterion)
    k = ev.k
    size = math.comb(n + k - 1, k - 1)
    if size > cap:
        raise DesignError(f"lattice has {size} points, above the cap of {cap}")
    tau_idx = np.arange(spec.p, spec.p + spec.t - 1)
    best_phi, best = np.inf, None
    for chunk in _lattice_chunks(k, n):
        w = chunk / n
        phi = _batch_objective(ev.grams, w, criterion, tau_idx)
        j = int(np.argmin(phi))
        if phi[j] < best_phi:
            best_phi, best = float(phi[j]), w[j].copy()
    if best is None:
        raise SingularInformationError("information matrix is singular on the whole lattice")
    return CrossoverDesign(ev.sequences, best / best.sum())
