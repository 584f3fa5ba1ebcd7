import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from xoverdesign import (
    CorrelationSpec,
    DesignError,
    NumericalError,
    build_correlation,
    factor_inverse,
)


def test_ar1_two_periods():
    np.testing.assert_allclose(build_correlation(CorrelationSpec("ar1", 0.1), 2),
                               [[1, 0.1], [0.1, 1]])
    c = build_correlation(CorrelationSpec("ar1", 0.5), 4)
    assert c[0, 3] == 0.125 and c[2, 1] == 0.5


def test_other_structures():
    np.testing.assert_array_equal(build_correlation(CorrelationSpec("independence", 0.7), 3),
                                  np.eye(3))
    cs = build_correlation(CorrelationSpec("compound_symmetry", 0.3), 3)
    np.testing.assert_allclose(cs, [[1, .3, .3], [.3, 1, .3], [.3, .3, 1]])


@pytest.mark.parametrize("structure,alpha,p", [
    ("ar1", 1.0, 2), ("ar1", -1.2, 3), ("compound_symmetry", -0.5, 3),
    ("compound_symmetry", 1.0, 3),
])
def test_out_of_range_alpha(structure, alpha, p):
    with pytest.raises(DesignError):
        build_correlation(CorrelationSpec(structure, alpha), p)


def test_unknown_structure():
    with pytest.raises(DesignError):
        CorrelationSpec("toeplitz", 0.1)


def test_factor_identity():
    f = factor_inverse(np.eye(3))
    np.testing.assert_allclose(f.r, np.eye(3))


def test_factor_two_by_two_closed_form():
    f = factor_inverse(np.array([[1, 0.1], [0.1, 1]]))
    expected = np.array([[1, -0.1], [-0.1, 1]]) / 0.99
    np.testing.assert_allclose(f.r.T @ f.r, expected, rtol=1e-14)
    assert f.r[1, 0] == 0  # upper triangular


def test_factor_rejects_indefinite():
    with pytest.raises(NumericalError):
        factor_inverse(np.array([[1.0, 2.0], [2.0, 1.0]]))


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(["ar1", "compound_symmetry", "independence"]),
       st.floats(-0.95, 0.95), st.integers(1, 8))
def test_valid_correlations_are_pd_and_factor(structure, alpha, p):
    spec = CorrelationSpec(structure, alpha)
    try:
        spec.check(p)
    except DesignError:
        return
    c = build_correlation(spec, p)
    assert np.allclose(c, c.T) and np.all(np.diag(c) == 1)
    assert np.linalg.eigvalsh(c).min() > 0
    if np.linalg.cond(c) < 1e4:
        f = factor_inverse(c)
        assert np.max(np.abs(f.r.T @ f.r @ c - np.eye(p))) < 1e-10
