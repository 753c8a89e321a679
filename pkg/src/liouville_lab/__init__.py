"""Numerical experiments on the Liouville property of matrix group actions.

Finite measures on GL(d, R) act on R^d, on projective spaces and on the
projectivized Lie algebra sl(d).  The package simulates their random walks,
builds harmonic candidates (grid Cesaro averages on P^1, Monte Carlo
elsewhere), and approximates orbit closures and minimal sets.
"""
from .errors import DecompositionError, InvalidInputError, LiouvilleLabError, SingularMatrixError, ZeroVectorError
from .gspace import Space, act, angle_to_point, point_to_angle, proj_dist, projectivize
from .harmonic import GridFunction, Verdict, VerdictKind, cesaro, gaussian_bump, grid_operator, liouville_verdict, mc_harmonic
from .invariant import minimal_sets, orbit_closure, overlap_test, proximality_stat, rank_one_attractor, unipotent_fixed_points
from .linalg import jordan_chevalley, upper_unipotent_generators
from .measure import FiniteMeasure, adjoint, dirac, family_axb, family_contracting, family_example71
from .scenarios import SCENARIOS, Report, run_scenario
from .walk import WalkConfig, estimate_limit_set, increment_stat, simulate, transience_stat

__version__ = "0.1.0"
