import csv
import io

import numpy as np
import pytest

from conftest import sequences
from xoverdesign import (
    CrossoverDesign,
    DesignError,
    enumerate_sequences,
    optimize,
    verify_augmented,
    verify_optimality,
)
from xoverdesign.verifier import SUPPORTED_OK, SUPPORTED_VIOLATION, ZERO_OK, ZERO_VIOLATION

# four-decimal designs as reported in the source; their sensitivities drift by
# up to ~0.018 from the bound purely through rounding
REPORTED = {
    ("work", "theta"): [0.2375, 0.2894, 0.2246, 0.2485],
    ("work", "tau"): [0.2900, 0.2963, 0.1734, 0.2403],
    ("dietary", "theta"): [0.3540, 0.2108, 0.2726, 0.1626],
}
ROUNDING_TOLERANCE = 0.025


def test_optimum_verifies(work_environment):
    spec, seqs = work_environment
    res = optimize(seqs, spec, "theta")
    rep = verify_optimality(res.design, spec, "theta")
    assert rep.optimal and rep.bound == 10
    assert all(c.status == SUPPORTED_OK for c in rep.per_sequence)
    np.testing.assert_allclose([c.sensitivity for c in rep.per_sequence], 10, atol=1e-6)


def test_uniform_is_not_optimal(work_environment):
    spec, seqs = work_environment
    rep = verify_optimality(CrossoverDesign.uniform(seqs), spec, "theta")
    assert not rep.optimal and rep.max_violation > 1e-4
    assert SUPPORTED_VIOLATION in {c.status for c in rep.per_sequence}


@pytest.mark.parametrize("example,criterion", list(REPORTED))
def test_reported_designs(example, criterion, request):
    spec, seqs = request.getfixturevalue({"work": "work_environment",
                                          "dietary": "dietary"}[example])
    design = CrossoverDesign(seqs, REPORTED[example, criterion])
    assert verify_optimality(design, spec, criterion, tolerance=ROUNDING_TOLERANCE).optimal
    other = "tau" if criterion == "theta" else "theta"
    assert verify_optimality(design, spec, other, tolerance=1e-4).optimal is False


def test_reported_tau_design_does_not_sum_to_one(dietary):
    spec, seqs = dietary
    with pytest.raises(DesignError):
        CrossoverDesign(seqs, [0.1725, 0.2482, 0.2225, 0.3586])


def test_small_perturbation_breaks_optimality(work_environment):
    spec, seqs = work_environment
    w = optimize(seqs, spec, "theta").design.proportions.copy()
    w[0] += 0.01
    w[1] -= 0.01
    assert not verify_optimality(CrossoverDesign(seqs, w), spec, "theta").optimal


def test_augmented(illustration):
    spec, seqs = illustration
    half = CrossoverDesign.uniform(seqs)
    extra = sequences(["AA", "BB"], 2)
    rep = verify_augmented(half, spec, "theta", extra)
    assert len(rep.per_sequence) == 4
    assert [c.proportion for c in rep.per_sequence[2:]] == [0.0, 0.0]
    assert {c.status for c in rep.per_sequence[2:]} <= {ZERO_OK, ZERO_VIOLATION}
    # AB/BA is not optimal once AA/BB are allowed (the four-sequence optimum drops AB)
    assert not rep.optimal
    assert rep.per_sequence[3].status == ZERO_VIOLATION


def test_augmented_edge_cases(illustration):
    spec, seqs = illustration
    half = CrossoverDesign.uniform(seqs)
    plain = verify_optimality(half, spec, "theta")
    assert verify_augmented(half, spec, "theta", []) == plain
    with pytest.raises(DesignError):
        verify_augmented(half, spec, "theta", seqs[:1])
    with pytest.raises(DesignError):
        verify_augmented(half, spec, "theta", sequences(["AA", "AA"], 2))


def test_zero_proportion_below_bound_is_fine(illustration):
    spec, _ = illustration
    all4 = enumerate_sequences(2, 2)
    res = optimize(all4, spec, "theta")
    rep = verify_optimality(res.design, spec, "theta")
    assert rep.optimal
    assert rep.per_sequence[1].status == ZERO_OK
    assert rep.per_sequence[1].sensitivity < rep.bound


def test_report_serialisation(work_environment):
    spec, seqs = work_environment
    rep = verify_optimality(CrossoverDesign.uniform(seqs), spec, "tau")
    rows = list(csv.DictReader(io.StringIO(rep.to_csv())))
    assert [r["sequence"] for r in rows] == list(map(str, seqs))
    # repr round-trips floats exactly
    assert float(rows[0]["sensitivity"]) == rep.per_sequence[0].sensitivity
    text = rep.to_text()
    assert "NOT OPTIMAL" in text and "bound: 3" in text


def test_tolerance_must_be_positive(illustration):
    spec, seqs = illustration
    with pytest.raises(DesignError):
        verify_optimality(CrossoverDesign.uniform(seqs), spec, "theta", tolerance=0)
