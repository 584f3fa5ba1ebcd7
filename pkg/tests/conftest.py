import numpy as np
import pytest

from xoverdesign import CorrelationSpec, ModelSpec, parse_sequence

AR1 = CorrelationSpec("ar1", 0.1)

ILLUSTRATION_THETA = [0.5, -1.0, 4.0, -2.0]
WORK_THETA = [2.0, 0.3, 0.8, -0.1, -2.0, 0.40, -2.0, -1.0, 0.3, -1.0]
DIETARY_THETA = [-2, 0.25, 0, 0.75, 1, 5, -1.5, -3.5, 2.75, 0.75]
WORK_SEQUENCES = ("BADC", "CDAB", "DBCA", "ACBD")
DIETARY_SEQUENCES = ("ABCD", "BDAC", "CADB", "DCBA")


def sequences(texts, t):
    return [parse_sequence(s, t) for s in texts]


@pytest.fixture
def illustration():
    spec = ModelSpec(ILLUSTRATION_THETA, "bernoulli", 2, 2, AR1)
    return spec, sequences(("AB", "BA"), 2)


@pytest.fixture
def work_environment():
    spec = ModelSpec(WORK_THETA, "poisson", 4, 4, AR1)
    return spec, sequences(WORK_SEQUENCES, 4)


@pytest.fixture
def dietary():
    spec = ModelSpec(DIETARY_THETA, "bernoulli", 4, 4, AR1)
    return spec, sequences(DIETARY_SEQUENCES, 4)


def random_spec(rng, t=None, p=None, family=None, structure=None, alpha=None, k=None):
    """A random model with enough distinct sequences for a nonsingular M."""
    from xoverdesign import enumerate_sequences, n_parameters

    t = t or int(rng.integers(2, 5))
    p = p or int(rng.integers(2, 5))
    family = family or str(rng.choice(["bernoulli", "poisson", "gaussian"]))
    structure = structure or str(rng.choice(["ar1", "compound_symmetry", "independence"]))
    alpha = float(rng.choice([0.0, 0.1, 0.5])) if alpha is None else alpha
    m = n_parameters(t, p)
    theta = rng.uniform(-3, 3, size=m)
    pool = enumerate_sequences(t, p)
    if k is None:
        k = min(len(pool), int(np.ceil(m / p)) + int(rng.integers(1, 4)))
    idx = rng.choice(len(pool), size=k, replace=False)
    spec = ModelSpec(theta, family, t, p, CorrelationSpec(structure, alpha))
    return spec, [pool[i] for i in sorted(idx)]


# acceptance summary ---------------------------------------------------------

ACCEPTANCE_RESULTS = {}


def record_criterion(name, passed, detail=""):
    ACCEPTANCE_RESULTS[name] = (bool(passed), detail)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS):
        passed, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  {name}  {detail}")
