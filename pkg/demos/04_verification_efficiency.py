"""Certifying a design against sequences it does not use.

A design is optimal over its own support when all sensitivities sit at the
bound.  Allowing extra sequences (with zero weight) can expose that the
support itself was a poor choice: here AA or BB beats AB/BA.
"""
import numpy as np

from xoverdesign import (
    CorrelationSpec,
    CrossoverDesign,
    InfeasibleSupportError,
    ModelSpec,
    enumerate_sequences,
    grid_oracle,
    optimize,
    parse_sequence,
    relative_d_efficiency,
    solve_equivalence_system,
    verify_augmented,
)

spec = ModelSpec([0.5, -1.0, 4.0, -2.0], "bernoulli", 2, 2, CorrelationSpec("ar1", 0.1))
ab_ba = [parse_sequence("AB", 2), parse_sequence("BA", 2)]
extra = [parse_sequence("AA", 2), parse_sequence("BB", 2)]

half = CrossoverDesign.uniform(ab_ba)
print(verify_augmented(half, spec, "theta", extra).to_text())
print()

all4 = enumerate_sequences(2, 2)
try:
    solve_equivalence_system(all4, spec, "theta")
except InfeasibleSupportError as exc:
    print(f"full-support root rejected ({exc.reason}): {np.round(exc.proportions, 4)}")

best = optimize(all4, spec, "theta").design
print("optimum over all four sequences:", dict(zip(best.labels(), np.round(best.proportions, 4).tolist())))
print("lattice check (0.01):", np.round(grid_oracle(all4, spec, "theta", 0.01).proportions, 2))

wider = CrossoverDesign(all4, [0.0, 0.5, 0.5, 0.0])
print(f"efficiency of AB/BA relative to the four-sequence optimum: "
      f"{relative_d_efficiency(wider, best, spec, 'theta'):.4f}")
