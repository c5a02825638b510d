"""Approach regions, the disc law-of-cosines bounds and polydisc chains.

Run with ``python3 demos/regions_and_chains.py``.
"""

import numpy as np

from admissible.chains import build_chain, default_c
from admissible.geometry import UnitBall
from admissible.regions import inclusion_report, law_of_cosines_check, paper_parabola

rep = law_of_cosines_check(trials=10_000, seed=0)
print("lower bound 1/(2 cos phi) violations:", rep["lower_violations"])
print("upper bound 2/cos(phi) on the unit disc about xi, violations:", rep["upper_violations"],
      "worst ratio*cos(phi):", round(rep["upper_worst_ratio_times_cos"], 2))
print("upper bound 1/cos(phi) where |z - xi| <= cos(phi), violations:", rep["local_upper_violations"],
      "of", rep["local_trials"])

for alpha in (1.1, 2, 10):
    r = inclusion_report(("disc_stolz", "disc_angular"), alpha, trials=10_000)
    print(f"Stolz({alpha}) inside angle arccos(1/alpha) = {r.target_aperture:.4f}: {r.violations} violations")

B = UnitBall(2)
xi = np.array([1.0 + 0j, 0j])
print("\nsampled c(alpha=3):", default_c(B, xi, 3.0))
for j in (10, 100, 10**4):
    ch = build_chain(B, xi, paper_parabola(j), 0.25, 3.0)
    print(f"j={j:>6}: chain length {ch.length} (bound {ch.bound}), overlaps ok {all(ch.overlaps)}, "
          f"anchors in A_6 {all(ch.anchors_in_region)}")
