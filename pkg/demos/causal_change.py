"""Degenerate germs whose causal type is fixed by mu, delta and Delta.

Run with ``python demos/causal_change.py``.
"""

import numpy as np

from zmclab.approx import predict_causal_type, profile_of
from zmclab.ck_solver import InitialCurve, ck_solve
from zmclab.geometry import sample_grid

cases = {
    "Delta > 0": ({}, {4: 1.0}),
    "Delta < 0": ({}, {4: -1.0}),
    "delta > 0": ({2: 1.0}, {2: -1.0, 3: 3.0}),
}
for label, (u, v) in cases.items():
    gamma = InitialCurve.from_invariants(u, v, order=14)
    profile = profile_of(gamma)
    grid = sample_grid(ck_solve(gamma, order=14), grid=(61, 61))
    tags, counts = np.unique(grid.tag, return_counts=True)
    print(f"{label}: mu={profile.mu:+.1f} delta={profile.delta:+.1f} Delta={profile.Delta:+.1f}"
          f" -> {predict_causal_type(profile)}; sampled {dict(zip(tags.tolist(), counts.tolist()))}")
