"""Two sequences, two periods: where do the optima sit?

With only AB and BA available the design has a single free proportion, so
the objective can be traced along the whole segment.  Under a binary model
with theta = (0.5, -1, 4, -2) the full-parameter optimum is the balanced
split, while the treatment-contrast optimum moves well towards BA.
"""
import numpy as np

from xoverdesign import (
    CorrelationSpec,
    CrossoverDesign,
    ModelSpec,
    objective_sweep,
    optimize,
    parse_sequence,
    verify_optimality,
)

spec = ModelSpec([0.5, -1.0, 4.0, -2.0], "bernoulli", t=2, p=2,
                 correlation=CorrelationSpec("ar1", 0.1))
seqs = [parse_sequence("AB", 2), parse_sequence("BA", 2)]

for criterion in ("theta", "tau"):
    p, phi, deriv = objective_sweep(seqs, spec, criterion, index=0, grid=1001)
    j = np.nanargmin(phi)
    print(f"[{criterion}] sweep minimum on the 0.001 grid: p_AB = {p[j]:.3f}")
    # a coarse look at the curve; the endpoints are single-sequence designs and singular
    for q in (0.05, 0.25, 0.5, 0.75, 0.95):
        k = int(round(q * 1000))
        print(f"    p_AB = {q:4.2f}   objective = {phi[k]:9.4f}   derivative = {deriv[k]:+8.4f}")

    res = optimize(seqs, spec, criterion)
    report = verify_optimality(res.design, spec, criterion)
    print(f"[{criterion}] optimizer ({res.method}, {res.iterations} iterations): "
          f"p = {np.round(res.design.proportions, 6)}")
    print(report.to_text())
    print()

# the balanced design is far from satisfying the tau conditions
half = CrossoverDesign.uniform(seqs)
print("tau sensitivities at the balanced design:",
      [round(c.sensitivity, 4) for c in verify_optimality(half, spec, "tau").per_sequence])
