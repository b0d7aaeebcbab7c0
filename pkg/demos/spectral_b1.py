"""Count harmonic 1-forms on periodic grids.

The kernel of the discrete Hodge Laplacian on a torus grid has dimension
n regardless of the metric in the conformal class, and the first nonzero
eigenvalue sits many orders of magnitude above round-off.
"""

import numpy as np

from weylcheck.catalog import torus_chart
from weylcheck.discrete import PeriodicGrid, b1_estimate
from weylcheck.tensor_core import TrigField, conformal_metric, flat_metric

cases = [("flat T^2", PeriodicGrid(torus_chart(2), 32), None), ("flat T^3", PeriodicGrid(torus_chart(3), 12), None)]
chart = torus_chart(3)
f = TrigField.random(chart, (0, 0), np.random.default_rng(8), max_mode=2, amplitude=0.1)
cases.append(("conformal T^3", PeriodicGrid(chart, 12), conformal_metric(flat_metric(chart), f)))

for label, grid, g in cases:
    est = b1_estimate(grid, g)
    head = ", ".join(f"{v:.2e}" for v in est.spectrum_head[:5])
    print(f"{label:14s} b1 = {est.count}  gap ratio {est.gap_ratio:.1e}  lowest eigenvalues [{head}]")
