"""A walk that shrinks everything to the origin.

Four random matrices of norm 0.2 act on R^2.  The product X_n = g_n ... g_1
has norm at most 0.2^n, so every path collapses onto the origin and a
harmonic function must equal its value there.  We watch both happen.
"""
import numpy as np

from liouville_lab import Space, WalkConfig, family_contracting, simulate
from liouville_lab.harmonic import gaussian_bump, mc_harmonic
from liouville_lab.walk import estimate_limit_set, transience_stat

mu = family_contracting(d=2, a=0.2, k=4, seed=7)
space = Space("vector", 2)
x0 = np.array([1.0, 1.0])

paths = simulate(mu, space, x0, WalkConfig(horizon=30, n_paths=2000, base_seed=7))
norms = np.linalg.norm(paths.points, axis=-1)
print("median |X_n x0| at n = 1, 5, 10:", np.round(np.median(norms[:, [0, 4, 9]], axis=0), 8))

annulus = transience_stat(paths, lambda p: (np.linalg.norm(p, axis=-1) >= 0.5) & (np.linalg.norm(p, axis=-1) <= 2.0))
print("fraction of paths that return to 0.5 <= |x| <= 2 after n = 3:", annulus.at(3))

limit = estimate_limit_set(paths, eps=0.01)
print("estimated limit set:", limit.points.round(6).tolist())

# h(x) = E f(X_n x) should not depend on x at all
f = gaussian_bump(np.zeros(2), 0.5, space)
probes = np.array([[1.0, 1.0], [-2.0, 0.5], [3.0, -3.0]])
est = mc_harmonic(mu, space, f, probes, WalkConfig(horizon=30, n_paths=2000, base_seed=8))
print("harmonic candidate at the probes:", est.values.round(6), "  f(0) =", float(f(np.zeros(2))))
