"""Space-like Scherk germ: invariants, family and curvature blow-up.

Run with ``python demos/scherk_profile.py``.
"""

import numpy as np

from zmclab.approx import characteristic, predict_causal_type, profile_of
from zmclab.ck_solver import ck_solve, initial_curve_of
from zmclab.gallery import get_entry
from zmclab.geometry import gauss_curvature, sample_grid

entry = get_entry("scherk_spacelike")
surface = entry.surface(12)
profile = profile_of(surface)
print(f"{entry.name}: mu = {profile.mu:+.6f}, family = {profile.family}")
print(f"predicted causal type: {predict_causal_type(profile)}")

# rebuild the germ from its initial curve and compare
germ = ck_solve(initial_curve_of(surface), order=12)
print(f"mu of rebuilt germ: {characteristic(germ):+.6f}")

grid = sample_grid(germ, box=(-0.2, 0.2, -0.2, 0.2), grid=(41, 41))
tags, counts = np.unique(grid.tag, return_counts=True)
print("grid tags:", dict(zip(tags.tolist(), counts.tolist())))

print("\n        x            K")
for x in np.geomspace(0.1, 1e-3, 6):
    print(f"{x:10.4g}  {gauss_curvature(surface, (x, 0.0)):12.5g}")
