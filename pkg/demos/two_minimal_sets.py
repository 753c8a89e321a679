"""A walk whose harmonic functions are not invariant.

The point mass at diag(2, 1/2) moves every line towards e1 except e2 itself.
So there are two minimal sets, {e1} and {e2}.  Cesaro averages of a function
worth 1 at e1 and 2 at e2 converge to a step function: 2 on the line e2, 1
everywhere else.  It is harmonic but not continuous, which is exactly why
the Liouville question is about continuous functions.
"""
import numpy as np

from liouville_lab.gspace import Space, angle_to_point, point_to_angle
from liouville_lab.harmonic import GridFunction, cesaro, liouville_verdict, gaussian_bump
from liouville_lab.invariant import minimal_sets
from liouville_lab.measure import dirac

space = Space("projective", 2)
mu = dirac(np.diag([2.0, 0.5]))

mins = minimal_sets(mu, space, angle_to_point(np.linspace(0.2, 3.0, 6)), eps=0.01)
print("minimal sets:", [c.points.round(6).tolist() for c in mins])


def two_level(p):
    return 1.5 - 0.5 * np.cos(2 * point_to_angle(p))


F, _ = cesaro(mu, GridFunction.from_function(two_level, 720), 2000)
print("limit at e1, at e2, just off e2:", float(F(np.array([1.0, 0.0]))), float(F(np.array([0.0, 1.0]))), float(F(angle_to_point(np.pi / 2 - 0.05))))

bumps = [two_level] + [gaussian_bump(angle_to_point(c), 0.3, space) for c in (0.7, 2.2)]
v = liouville_verdict(mu, space, bumps, angle_to_point(np.linspace(0.1, 3.0, 8)))
print("verdict:", v.kind.value, "-", v.annotation)
