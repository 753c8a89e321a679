import math

import numpy as np
import pytest
import sympy

from liouville_lab.cloud import OrbitCloud, hausdorff
from liouville_lab.errors import InvalidInputError
from liouville_lab.gspace import ADJOINT, PROJECTIVE, Space, act, angle_to_point, point_to_angle, proj_dist, projectivize, sl_flatten
from liouville_lab.invariant import (
    fixed_residual,
    minimal_sets,
    normalized_powers,
    orbit_closure,
    overlap_test,
    proximality_stat,
    rank_one_attractor,
    unipotent_fixed_points,
)
from liouville_lab.linalg import elementary, upper_unipotent_generators
from liouville_lab.measure import FiniteMeasure, dirac, family_example71, rotation
from liouville_lab.walk import WalkConfig

P2 = Space(PROJECTIVE, 2)
GOLDEN = (math.sqrt(5) - 1) / 2


def hyperbolic_pair():
    h = np.diag([2.0, 0.5])
    r = rotation(math.pi / 4)
    return FiniteMeasure.normalized([h, r @ h @ r.T])


def example71_measure():
    return family_example71([[-1.0, 0.9], [0.2, 0.5], [1.1, -0.3], [-0.4, 0.0]])


def test_orbit_closure_identity():
    cloud = orbit_closure(dirac(np.eye(3)), Space(PROJECTIVE, 3), [1.0, 2.0, 2.0])
    assert len(cloud) == 1 and cloud.converged
    np.testing.assert_allclose(cloud.points[0], projectivize([1.0, 2.0, 2.0]))
    with pytest.raises(InvalidInputError):
        orbit_closure(dirac(np.eye(3)), Space(PROJECTIVE, 3), [1.0, 2.0, 2.0], max_words=0)


def test_orbit_closure_rotation_fills_the_line():
    cloud = orbit_closure(dirac(rotation(2 * math.pi * GOLDEN)), P2, [1.0, 0.0], max_words=2000, eps=0.02)
    ang = np.sort(point_to_angle(cloud.points))
    gaps = np.diff(np.append(ang, ang[0] + math.pi))
    assert gaps.max() <= 3 * math.pi / len(cloud)


def test_orbit_closure_example71_reaches_both_invariant_lines():
    mu = example71_measure()
    cloud = orbit_closure(mu, Space(PROJECTIVE, 4), [1.0, 1.0, 1.0, 0.0], max_words=16, use_inverses=True, eps=5e-4)
    assert cloud.contains(projectivize([1.0, 1.0, 0.0, 0.0]), 1e-3)
    assert cloud.contains(projectivize([0.0, 0.0, 1.0, 0.0]), 1e-3)


def test_orbit_closure_grows_with_the_word_budget():
    mu = hyperbolic_pair()
    small = orbit_closure(mu, P2, angle_to_point(1.0), max_words=4, eps=0.01)
    big = orbit_closure(mu, P2, angle_to_point(1.0), max_words=8, eps=0.01)
    np.testing.assert_array_equal(big.points[: len(small)], small.points)
    assert not small.converged


def test_shuffled_orbit_closure_is_eps_equivalent():
    mu = hyperbolic_pair()
    base = orbit_closure(mu, P2, angle_to_point(2.0), max_words=10, eps=0.02)
    for seed in range(3):
        other = orbit_closure(mu, P2, angle_to_point(2.0), max_words=10, eps=0.02, shuffle_seed=seed)
        assert hausdorff(base, other, P2) <= 0.02


def test_minimal_sets_two_fixed_lines():
    seeds = angle_to_point(np.array([0.3, 1.0, 2.0, 2.9]))
    g = np.diag([2.0, 0.5])
    clouds = minimal_sets(dirac(g), P2, seeds)
    assert len(clouds) == 2
    # eigenline oracle
    _, vecs = np.linalg.eig(g)
    for c in clouds:
        assert len(c) == 1
        assert min(proj_dist(c.points[0], vecs[:, i]) for i in range(2)) <= 1e-12


def test_minimal_sets_identity_returns_seeds():
    seeds = angle_to_point(np.array([0.3, 1.0, 2.0]))
    clouds = minimal_sets(dirac(np.eye(2)), P2, seeds)
    assert len(clouds) == 3
    for c, s in zip(clouds, seeds):
        assert proj_dist(c.points[0], s) <= 1e-15


def test_minimal_set_hyperbolic_pair_is_unique_and_invariant():
    mu = hyperbolic_pair()
    clouds = minimal_sets(mu, P2, angle_to_point(np.linspace(0.2, 3.0, 6)), eps=0.01)
    assert len(clouds) == 1
    assert clouds[0].invariance_residual(mu.atoms) <= 0.01


def test_overlap_test():
    a = OrbitCloud(P2, np.array([[1.0, 0.0]]), 0.01)
    b = OrbitCloud(P2, np.array([[0.0, 1.0]]), 0.01)
    assert overlap_test(a, a)
    assert not overlap_test(a, b)
    with pytest.raises(InvalidInputError):
        overlap_test(a, OrbitCloud(Space(PROJECTIVE, 3), np.array([[1.0, 0.0, 0.0]]), 0.01))


def test_example71_invariant_singletons_do_not_overlap():
    mu = example71_measure()
    sp = Space(PROJECTIVE, 4)
    p1, p2 = projectivize([1.0, 1.0, 0.0, 0.0]), projectivize([0.0, 0.0, 1.0, 0.0])
    c1 = orbit_closure(mu, sp, p1, use_inverses=True, eps=1e-3)
    c2 = orbit_closure(mu, sp, p2, use_inverses=True, eps=1e-3)
    assert len(c1) == len(c2) == 1
    assert not overlap_test(c1, c2)


def test_proximality():
    cfg = WalkConfig(horizon=200, n_paths=20)
    pairs = [(angle_to_point(0.2), angle_to_point(0.2))]
    assert proximality_stat(hyperbolic_pair(), P2, pairs, cfg).fraction == 1.0

    rot = dirac(rotation(2 * math.pi * GOLDEN))
    pairs = [(angle_to_point(a), angle_to_point(a + 0.7)) for a in (0.1, 1.0, 2.0)]
    res = proximality_stat(rot, P2, pairs, cfg)
    assert res.fraction == 0.0
    np.testing.assert_allclose(res.min_dists, res.initial_dists, atol=1e-9)

    res = proximality_stat(hyperbolic_pair(), P2, pairs, cfg)
    assert res.fraction == 1.0


def test_two_point_contraction_oracle():
    # long products are close to rank one: both points end near the top singular direction
    mu = hyperbolic_pair()
    gen = np.random.default_rng(3)
    p = np.eye(2)
    for _ in range(60):
        p = mu.atoms[gen.integers(2)] @ p
    u = np.linalg.svd(p)[0][:, 0]
    # p is singular to machine precision, so apply it as a plain matrix
    for a in (0.3, 1.9):
        assert proj_dist(p @ angle_to_point(a), u) <= 1e-6


def test_rank_one_attractor():
    w = rank_one_attractor(normalized_powers(np.diag([2.0, 0.5]), 40))
    np.testing.assert_allclose(w, [1.0, 0.0], atol=1e-12)
    assert rank_one_attractor([rotation(0.1 * k) for k in range(1, 30)]) is None
    assert rank_one_attractor([np.eye(2)]) is None


def test_rank_one_attractor_parabolic():
    # (1/n) [[1, n], [0, 1]] -> e_{12}, whose image is the line e1
    gs = [np.array([[1.0, n], [0.0, 1.0]]) for n in (10_000, 10_001)]
    limit = np.array([[0.0, 1.0], [0.0, 0.0]])
    assert np.linalg.norm(gs[-1] / 10_001 - limit, 2) <= 1e-4
    w = rank_one_attractor(gs, tol=1e-6)
    # the image line of g_n itself is (1, 1/n)
    assert proj_dist(w, [1.0, 0.0]) <= 1.01 / 10_001


def test_rank_one_attractor_attracts_generic_points():
    tol = 1e-6
    g = np.array([[3.0, 1.0], [1.0, 1.0]])
    gs = normalized_powers(g, 40)
    w = rank_one_attractor(gs, tol)
    assert w is not None
    for a in np.linspace(0.05, 3.1, 20):
        if proj_dist(angle_to_point(a), np.linalg.eig(g)[1][:, 1]) < 1e-2:
            continue
        assert proj_dist(gs[-1] @ angle_to_point(a), w) <= 10 * tol


@pytest.mark.parametrize("d", [2, 3, 4])
def test_unipotent_fixed_points_projective_and_adjoint(d):
    gens = upper_unipotent_generators(d)
    (v,) = unipotent_fixed_points(gens, Space(PROJECTIVE, d))
    np.testing.assert_allclose(v, np.eye(d)[0], atol=1e-12)
    ad = Space(ADJOINT, d)
    (w,) = unipotent_fixed_points(gens, ad)
    assert proj_dist(w, sl_flatten(elementary(d, 0, d - 1))) <= 1e-12
    assert fixed_residual(gens, w, ad) <= 1e-8


def test_unipotent_fixed_points_adjoint_matches_exact_nullspace():
    d = 3
    ad = Space(ADJOINT, d)
    gens = upper_unipotent_generators(d)
    blocks = [sympy.Matrix(np.rint(ad.action_matrix(g) - np.eye(8)).astype(int)) for g in gens]
    exact = sympy.Matrix.vstack(*blocks).nullspace()
    assert len(exact) == 1
    (w,) = unipotent_fixed_points(gens, ad)
    assert proj_dist(w, np.array(exact[0], dtype=float).ravel()) <= 1e-12


def test_unipotent_fixed_points_identity_and_errors():
    assert len(unipotent_fixed_points([np.eye(3)], Space(PROJECTIVE, 3))) == 3
    with pytest.raises(InvalidInputError):
        unipotent_fixed_points([np.diag([2.0, 0.5])], P2)
    with pytest.raises(InvalidInputError):
        unipotent_fixed_points([np.eye(2)], Space("vector", 2))
