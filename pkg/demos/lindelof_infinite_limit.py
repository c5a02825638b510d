"""The function 1/(1 - z1): infinite admissible limit predicted from an omitted value.

Run with ``python3 demos/lindelof_infinite_limit.py``.
"""

import json

import numpy as np

from admissible import expr as ex
from admissible.geometry import UnitBall
from admissible.limits import classify

B = UnitBall(2)
xi = np.array([1.0 + 0j, 0j])
v = classify(ex.catalog("inv_normal"), B, xi, [1, 2, 4], omit_samples=20_000)
d = v.to_dict()
print("admissible:", d["admissible"]["status"], d["admissible"]["value"])
print("refined verdict:", d["lindelof"]["status"], "caps:", json.dumps(d["lindelof"]["caps"]["hold"]))
print("omitted value attained:", d["lindelof"]["omitted_value"]["attained"])
print("flags:", json.dumps(d["theorem_flags"], sort_keys=True))
