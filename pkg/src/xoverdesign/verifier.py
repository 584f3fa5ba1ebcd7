"""Optimality certificates from the equivalence conditions."""

from dataclasses import dataclass
import csv
import io

import numpy as np

from .criteria import Criterion, DesignEvaluator
from .design import CrossoverDesign
from .exceptions import DesignError

DEFAULT_TOLERANCE = 1e-4
ZERO_THRESHOLD = 1e-8

SUPPORTED_OK = "supported_ok"
SUPPORTED_VIOLATION = "supported_violation"
ZERO_OK = "zero_ok"
ZERO_VIOLATION = "zero_violation"


@dataclass(frozen=True)
class SequenceCheck:
    sequence: object
    proportion: float
    sensitivity: float
    directional_derivative: float
    status: str


@dataclass(frozen=True)
class VerificationReport:
    criterion: Criterion
    bound: float
    per_sequence: tuple
    max_violation: float
    optimal: bool
    tolerance_used: float
    objective_value: float = float("nan")

    TABLE_FIELDS = ("sequence", "proportion", "sensitivity", "directional_derivative",
                    "status")

    def rows(self):
        return [
            {"sequence": str(c.sequence), "proportion": c.proportion,
             "sensitivity": c.sensitivity,
             "directional_derivative": c.directional_derivative, "status": c.status}
            for c in self.per_sequence
        ]

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=self.TABLE_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows():
            writer.writerow({k: (repr(float(v)) if isinstance(v, float) else v)
                             for k, v in row.items()})
        return buf.getvalue()

    def to_text(self):
        lines = [
            f"criterion: {self.criterion.value}",
            f"bound: {self.bound:.12g}",
            f"objective: {self.objective_value:.12g}",
            f"{'sequence':<10} {'proportion':>16} {'sensitivity':>18} "
            f"{'derivative':>18}  status",
        ]
        for c in self.per_sequence:
            lines.append(f"{str(c.sequence):<10} {c.proportion:>16.12f} "
                         f"{c.sensitivity:>18.12f} {c.directional_derivative:>18.12g}  "
                         f"{c.status}")
        verdict = "OPTIMAL" if self.optimal else "NOT OPTIMAL"
        lines.append(f"max violation: {self.max_violation:.12g} "
                     f"(tolerance {self.tolerance_used:.3g}) -> {verdict}")
        return "\n".join(lines)


def _classify(w, s, bound, tolerance, zero_threshold):
    gap = s - bound
    if w > zero_threshold:
        v = abs(gap)
        return v, SUPPORTED_OK if v <= tolerance else SUPPORTED_VIOLATION
    v = max(gap, 0.0)
    return v, ZERO_OK if v <= tolerance else ZERO_VIOLATION


def _report(sequences, w, spec, criterion, tolerance, zero_threshold):
    ev = DesignEvaluator(sequences, spec, criterion)
    phi, s = ev.evaluate(w)
    checks, worst = [], 0.0
    for seq, wi, si in zip(sequences, w, s):
        v, status = _classify(float(wi), float(si), ev.bound, tolerance, zero_threshold)
        worst = max(worst, v)
        checks.append(SequenceCheck(seq, float(wi), float(si), float(ev.bound - si), status))
    return VerificationReport(criterion=ev.criterion, bound=ev.bound,
                              per_sequence=tuple(checks), max_violation=worst,
                              optimal=worst <= tolerance, tolerance_used=tolerance,
                              objective_value=phi)


def verify_optimality(design, spec, criterion, tolerance=DEFAULT_TOLERANCE,
                      zero_threshold=ZERO_THRESHOLD):
    """Check the equivalence conditions for ``design`` over its own sequences.

    A supported sequence violates by ``|s_i - bound|``; a sequence with zero
    proportion violates by ``max(0, s_i - bound)``.  The design is declared
    optimal when the largest violation is at most ``tolerance``.
    """
    if not tolerance > 0:
        raise DesignError("tolerance must be positive")
    return _report(design.sequences, design.proportions, spec, criterion, tolerance,
                   zero_threshold)


def verify_augmented(design, spec, criterion, extra_sequences, tolerance=DEFAULT_TOLERANCE,
                     zero_threshold=ZERO_THRESHOLD):
    """Certify ``design`` against an enlarged candidate set.

    The extra sequences enter with zero proportion, so only the inequality
    side of the conditions is checked for them.
    """
    extra = tuple(extra_sequences)
    if not extra:
        return verify_optimality(design, spec, criterion, tolerance, zero_threshold)
    clash = set(extra) & set(design.sequences)
    if clash:
        raise DesignError(f"extra sequences already in the design: {sorted(map(str, clash))}")
    if len(set(extra)) != len(extra):
        raise DesignError("extra sequences must be distinct")
    enlarged = CrossoverDesign(design.sequences + extra,
                               np.concatenate([design.proportions, np.zeros(len(extra))]))
    return verify_optimality(enlarged, spec, criterion, tolerance, zero_threshold)
