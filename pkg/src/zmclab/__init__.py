"""Zero mean curvature germs at light-like points of Lorentz-Minkowski 3-space."""
