"""Walk the catalog and compare the positivity margin with what b1 allows.

For each entry we sample points, compute the smallest eigenvalue of
Ric^W - (n-2)(n-4)/8 (|θ|² g - θ⊗θ) relative to g, and then ask whether
the observed b1 is consistent with the vanishing statement.
"""

import numpy as np

from weylcheck.catalog import CATALOG_NAMES, default_catalog
from weylcheck.weyl import b1_bound_violations, positivity_margin

rng = np.random.default_rng(0)
catalog = default_catalog()

print(f"{'manifold':28s} {'n':>2s} {'b1':>3s} {'min margin':>11s} {'strict@θ':>9s}  audit")
for name in CATALOG_NAMES:
    entry = catalog[name]
    if "margin" not in entry.metadata:
        continue
    margin, strict = positivity_margin(entry.weyl, entry.chart.sample(rng, 50))
    mmin = float(np.min(margin))
    bad = b1_bound_violations(
        name, entry.weyl.n, entry.metadata["b1"], entry.metadata["exactness"], mmin, float(np.max(strict))
    )
    audit = "violation: " + "; ".join(bad) if bad else ("condition holds" if mmin > -1e-9 else "condition fails")
    print(f"{entry.name:28s} {entry.weyl.n:2d} {entry.metadata['b1']:3d} {mmin:11.4f} {float(np.max(strict)):9.2e}  {audit}")

# The flat 4-torus fails the condition by -1/2 and has b1 = 4; S^1 x S^3 sits
# exactly on the boundary with b1 = 1 and a parallel Lee form.
