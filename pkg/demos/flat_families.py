"""
Flat families: full confidence with no inconclusive outcome
===========================================================

When every coefficient modulus equals 1/sqrt(dim), the optimal measurement
stops needing an inconclusive outcome: the failure probability is exactly
zero at any purity, and the optimal operators coincide with the square-root
measurement built from the pure components.
"""

import numpy as np

from maxconf import (
    SymmetricFamily,
    evaluate_measurement,
    flat_mixed_solution,
    opnorm,
    square_root_measurement,
)

family = SymmetricFamily.flat(order=4, dim=3, purity=0.5)
sol = flat_mixed_solution(family)

print("flat family, order 4, dim 3, purity 0.5")
print(f"  confidence          C = {sol.confidence:.12f}")
print(f"  failure probability Q = {sol.failure_probability}")

# the measurement achieving this is the square-root measurement of the
# underlying pure states, whatever the purity
pure_twin = SymmetricFamily.flat(order=4, dim=3, purity=1.0)
srm_ops, _ = square_root_measurement(pure_twin)
gap = max(opnorm(a - b) for a, b in zip(sol.detection_operators, srm_ops))
print(f"  operator gap to SRM   = {gap:.2e}")

# run the measurement on the ensemble and look at the outcome statistics
from maxconf import DetectionSet

ensemble = family.ensemble()
det = DetectionSet.from_conclusive(np.asarray(sol.detection_operators))
stats = evaluate_measurement(ensemble, det)
print(f"  outcome probabilities = {np.round(stats.outcome_probabilities, 6) + 0.0}")
print(f"  achieved confidences  = {np.round(stats.confidences, 6)}")

# confidence grows with purity while Q stays pinned at zero
print("\npurity sweep:")
for p in (0.25, 0.5, 0.75, 1.0):
    s = flat_mixed_solution(SymmetricFamily.flat(order=4, dim=3, purity=p))
    print(f"  p = {p:4.2f}   C = {s.confidence:.6f}   Q = {s.failure_probability}")
