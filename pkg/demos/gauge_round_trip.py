"""Break the co-closed gauge on T^3 and recover it.

Start from θ = dx¹ with the flat metric (already co-closed), apply a
random conformal change f₀, then solve for the f that makes θ co-closed
again.  Uniqueness up to constants means the solver should return -f₀.
"""

import numpy as np

from weylcheck.catalog import flat_torus
from weylcheck.discrete import PeriodicGrid, evaluate
from weylcheck.tensor_core import TrigField
from weylcheck.weyl import codiff_theta_on_grid, gauduchon_gauge, gauge_transform, theta_periods

w = flat_torus(3, (1.0,)).weyl
grid = PeriodicGrid(w.chart, 48)  # 32^3 is borderline for some draws of f0
f0 = TrigField.random(w.chart, (0, 0), np.random.default_rng(3), max_mode=2, amplitude=0.05, zero_mean=True)
broken = gauge_transform(w, f0)

print("sup |d*θ| before:", float(np.max(np.abs(codiff_theta_on_grid(broken, grid)))))
sol = gauduchon_gauge(broken, grid)
print("sup |d*θ'| after:", sol.residual)
print("sup |f + f0|     :", float(np.max(np.abs(sol.f + evaluate(f0, grid.points)))))
print("periods before   :", theta_periods(broken, grid))
print("periods after    :", theta_periods(broken, grid, sol.f))
