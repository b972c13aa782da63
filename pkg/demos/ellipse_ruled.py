"""Light-like ruled surface over a space-like ellipse.

Run with ``python demos/ellipse_ruled.py``.
"""

import numpy as np

from zmclab.curves import SpacelikeCurve, lorentz_dot, make_director, ruled_metric

base = SpacelikeCurve.ellipse(2.0)
ruled = make_director(base, "-")
t = np.linspace(-np.pi, np.pi, 73)
xi = ruled.director(t)
print(f"|<xi, xi>| <= {np.max(np.abs(lorentz_dot(xi, xi))):.1e}")
print(f"|<xi, c'>| <= {np.max(np.abs(lorentz_dot(xi, base.velocity(t)))):.1e}")

T, S = np.meshgrid(t, np.linspace(-ruled.eps, ruled.eps, 11)[1:-1])
E, F, G = ruled_metric(ruled, T, S)
print(f"max |EG - F^2| = {np.max(np.abs(E * G - F * F)):.1e} (degenerate metric)")
