"""Treatment sequences, per-sequence design matrices and the design container.

Parameters are ordered ``theta = (lambda, beta_2..beta_p, tau_2..tau_t,
rho_2..rho_t)`` under the baseline constraints ``beta_1 = tau_1 = rho_1 = 0``,
so a model with ``t`` treatments and ``p`` periods has ``m = p + 2t - 2``
parameters.  Treatments are the integers ``1..t`` internally and the letters
``A, B, C, ...`` in text.
"""

from dataclasses import dataclass
import itertools
import string

import numpy as np

from .exceptions import DesignError

SEQUENCE_CAP = 10**6
PROPORTION_SUM_TOL = 1e-12

_LETTERS = string.ascii_uppercase


def n_parameters(t, p):
    """Number of model parameters ``m = p + 2t - 2``."""
    return p + 2 * t - 2


@dataclass(frozen=True)
class TreatmentSequence:
    """Ordered treatment labels (``1..t``), one per period."""

    labels: tuple

    def __post_init__(self):
        labels = tuple(int(x) for x in self.labels)
        if not labels:
            raise DesignError("a treatment sequence needs at least one period")
        if min(labels) < 1:
            raise DesignError(f"treatment labels must be >= 1, got {labels}")
        object.__setattr__(self, "labels", labels)

    @property
    def p(self):
        return len(self.labels)

    def check(self, t, p):
        """Raise ``DesignError`` unless the sequence is valid for ``(t, p)``."""
        if len(self.labels) != p:
            raise DesignError(
                f"sequence {self} has {len(self.labels)} periods, expected {p}")
        if max(self.labels) > t:
            raise DesignError(f"sequence {self} uses a treatment beyond t={t}")

    def __str__(self):
        if max(self.labels) <= len(_LETTERS):
            return "".join(_LETTERS[x - 1] for x in self.labels)
        return "-".join(str(x) for x in self.labels)

    def __len__(self):
        return len(self.labels)


def parse_sequence(text, t):
    """Parse a letter string such as ``"BADC"`` into a sequence.

    ``A`` maps to treatment 1, ``B`` to 2, and so on.  Lower case is accepted.

    >>> parse_sequence("BADC", 4).labels
    (2, 1, 4, 3)
    """
    if isinstance(text, TreatmentSequence):
        text.check(t, len(text))
        return text
    text = str(text).strip().upper()
    if not text:
        raise DesignError("empty treatment sequence")
    labels = []
    for ch in text:
        idx = _LETTERS.find(ch)
        if idx < 0:
            raise DesignError(f"symbol {ch!r} in {text!r} is not a treatment letter")
        if idx + 1 > t:
            raise DesignError(
                f"symbol {ch!r} in {text!r} is outside the treatment set A..{_LETTERS[t - 1]}")
        labels.append(idx + 1)
    return TreatmentSequence(tuple(labels))


def build_design_matrix(seq, t, p):
    """Design matrix ``[1_p, P, T, F]`` of one sequence, shape ``(p, m)``.

    Row ``i`` of the direct-effect block ``T`` flags the treatment applied in
    period ``i`` and row ``i`` of the carryover block ``F`` flags the
    treatment applied in period ``i - 1``; baseline treatment 1 gets no
    column.  No carryover enters the first period.
    """
    seq.check(t, p)
    m = n_parameters(t, p)
    x = np.zeros((p, m))
    x[:, 0] = 1.0
    x[np.arange(1, p), np.arange(1, p)] = 1.0
    tau0 = p
    rho0 = p + t - 1
    for i, s in enumerate(seq.labels):
        if s >= 2:
            x[i, tau0 + s - 2] = 1.0
        if i > 0 and seq.labels[i - 1] >= 2:
            x[i, rho0 + seq.labels[i - 1] - 2] = 1.0
    assert x.shape[1] == m
    return x


def build_contrast_matrix(t, p):
    """Matrix ``H`` of shape ``(t - 1, m)`` selecting the direct effects."""
    if t < 2:
        raise DesignError(f"t must be >= 2 for treatment contrasts, got {t}")
    if p < 2:
        raise DesignError(f"p must be >= 2, got {p}")
    m = n_parameters(t, p)
    h = np.zeros((t - 1, m))
    h[:, p:p + t - 1] = np.eye(t - 1)
    return h


def enumerate_sequences(t, p, cap=SEQUENCE_CAP):
    """All ``t**p`` sequences in lexicographic order."""
    if t < 1 or p < 1:
        raise DesignError(f"t and p must be positive, got t={t}, p={p}")
    if t**p > cap:
        raise DesignError(f"t**p = {t**p} sequences exceeds the cap of {cap}")
    return [TreatmentSequence(c) for c in itertools.product(range(1, t + 1), repeat=p)]


@dataclass(frozen=True, eq=False)
class CrossoverDesign:
    """Approximate crossover design: distinct sequences with proportions.

    Proportions are stored as a read-only float array and must lie on the
    probability simplex.
    """

    sequences: tuple
    proportions: np.ndarray

    def __post_init__(self):
        seqs = tuple(self.sequences)
        if not seqs:
            raise DesignError("a design needs at least one sequence")
        if len(set(seqs)) != len(seqs):
            raise DesignError("design sequences must be pairwise distinct")
        w = np.array(self.proportions, dtype=float).ravel()
        if w.shape != (len(seqs),):
            raise DesignError(
                f"got {w.size} proportions for {len(seqs)} sequences")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise DesignError(f"proportions must be finite and non-negative, got {w}")
        if abs(w.sum() - 1.0) > PROPORTION_SUM_TOL:
            raise DesignError(f"proportions must sum to 1, got sum {w.sum():.12g}")
        w.setflags(write=False)
        object.__setattr__(self, "sequences", seqs)
        object.__setattr__(self, "proportions", w)

    @classmethod
    def uniform(cls, sequences):
        k = len(sequences)
        return cls(tuple(sequences), np.full(k, 1.0 / k))

    @classmethod
    def from_strings(cls, texts, t, proportions=None):
        seqs = tuple(parse_sequence(s, t) for s in texts)
        if proportions is None:
            return cls.uniform(seqs)
        return cls(seqs, proportions)

    @property
    def k(self):
        return len(self.sequences)

    def with_proportions(self, proportions):
        return CrossoverDesign(self.sequences, proportions)

    def labels(self):
        return [str(s) for s in self.sequences]

    def __repr__(self):
        body = ", ".join(f"{s}: {w:.6g}" for s, w in zip(self.labels(), self.proportions))
        return f"CrossoverDesign({{{body}}})"
