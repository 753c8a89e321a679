"""Unipotent groups fix a line, and every minimal set sits on it.

Upper unitriangular matrices fix e1 in P(V).  Acting by conjugation on
P(sl(V)) they fix the line of the matrix unit e_{1,d}, a nilpotent element.
"""
import numpy as np

from liouville_lab.gspace import Space, sl_unflatten
from liouville_lab.invariant import unipotent_fixed_points
from liouville_lab.linalg import jordan_chevalley, upper_unipotent_generators
from liouville_lab.scenarios import scenario_unipotent

for d in (2, 3, 4):
    gens = upper_unipotent_generators(d)
    (p,) = unipotent_fixed_points(gens, Space("projective", d))
    (q,) = unipotent_fixed_points(gens, Space("adjoint_projective", d))
    v = sl_unflatten(q, d)
    jc = jordan_chevalley(v)
    print(f"d = {d}: fixed line in P(V) {np.round(p, 6)}; in P(sl) the matrix unit at (1, {d}) "
          f"(|v - e_1d| = {np.abs(np.abs(v) - np.eye(d)[:, [0]] @ np.eye(d)[[d - 1]]).max():.1e}), "
          f"semisimple part {np.linalg.norm(jc.s):.1e}")

report = scenario_unipotent("heisenberg")
print(f"Heisenberg group, random positive atoms: {report.status}")
for c in report.checks:
    print(f"  {c.name}: {c.value}")
