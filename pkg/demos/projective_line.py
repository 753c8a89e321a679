"""Harmonic functions on the projective line for three kinds of walks.

For each measure we average P^i f over a 720-bin grid of P^1 and look at
the limit.  A hyperbolic pair and an irrational rotation both flatten every
bump into a constant.  A single parabolic shear also flattens it, but much
more slowly, because the drift towards the fixed line is only polynomial.
"""
import numpy as np

from liouville_lab.gspace import Space, angle_to_point
from liouville_lab.harmonic import GridFunction, cesaro, gaussian_bump, grid_operator
from liouville_lab.invariant import normalized_powers, rank_one_attractor
from liouville_lab.scenarios import PROJLINE_MEASURES

space = Space("projective", 2)
bump = gaussian_bump(angle_to_point(1.0), 0.3, space)
grid = GridFunction.from_function(bump, 720)
print(f"bump oscillation on the grid: {np.ptp(grid.values):.3f}")

for name, (factory, _, n_terms, _) in PROJLINE_MEASURES.items():
    mu = factory()
    op = grid_operator(mu, 720)
    F, gap = cesaro(mu, grid, n_terms, op=op)
    print(f"{name:>10}: {n_terms} Cesaro terms, oscillation of the limit {np.ptp(F.values):.2e}, last-half gap {gap:.1e}")

# products of the hyperbolic pair become rank one; their image is an attracting line
mu = PROJLINE_MEASURES["hyperbolic"][0]()
word = mu.atoms[0] @ mu.atoms[1] @ mu.atoms[0]
line = rank_one_attractor(normalized_powers(word, 60))
print("attracting line of (g0 g1 g0)^n:", np.round(line, 6))
