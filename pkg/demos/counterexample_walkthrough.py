"""Walk through f(z1, z2) = z2^2/(1 - z1) at the boundary point (1, 0) of the unit ball.

The function is bounded, tends to 0 along the inner normal, yet equals 1 on the
parabola (1 - 1/j, 1/sqrt j), which eventually enters every Koranyi region.
Run with ``python3 demos/counterexample_walkthrough.py``.
"""

import numpy as np

from admissible import expr as ex
from admissible.derivatives import nabla_functional
from admissible.geometry import UnitBall
from admissible.limits import admissible_verdict, criterion_t1_check, estimate_limit, growth_verdict
from admissible.regions import RegionSpec, normal_path, paper_parabola, parabola_threshold

B = UnitBall(2)
xi = np.array([1.0 + 0j, 0j])
f = ex.catalog("paper_counterexample")

print("f =", ex.to_text(f.expr))
print("normal limit:", estimate_limit(f, normal_path(B, xi)).value)

# the parabola enters D_alpha only for alpha > 2
print("threshold for alpha=1.5:", parabola_threshold(1.5))
for alpha in (2.5, 3.0, 6.0):
    j0 = parabola_threshold(alpha)
    r = RegionSpec("ball_koranyi", alpha, (1, 0), B)
    inside = all(r.contains(paper_parabola(j)) for j in range(j0, j0 + 200))
    print(f"alpha={alpha}: parabola inside D_alpha from j={j0}: {inside}, f there = {f(paper_parabola(j0)).real:.12f}")

out = admissible_verdict(f, B, xi, [1.5, 3, 6])
print("admissible verdict:", out.status, "witness:", out.witness["path"]["kind"], "at alpha", out.witness["alpha"])

print("\nanisotropic spherical quantity along the parabola:")
for j in (10, 100, 10**4, 10**6):
    print(f"  j={j:>8}: {nabla_functional(f, B, xi, paper_parabola(j)):.6f}")
crit = criterion_t1_check(f, B, xi, 3)
print("criterion:", crit["status"], "liminf", round(crit["liminf"], 4))

g = growth_verdict(f, B, xi, 3)
print("tangential growth exponent:", round(g["tangential"]["fit"]["exponent"], 4), "label", g["tangential"]["label"])
