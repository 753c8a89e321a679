import math

import numpy as np
import pytest

from liouville_lab.errors import InvalidInputError
from liouville_lab.gspace import PROJECTIVE, VECTOR, Space, angle_to_point, proj_dist, projectivize
from liouville_lab.harmonic import GridFunction, cesaro, gaussian_bump
from liouville_lab.measure import FiniteMeasure, dirac, family_contracting, rotation
from liouville_lab.walk import (
    PathEnsemble,
    WalkConfig,
    estimate_limit_set,
    increment_stat,
    simulate,
    transience_stat,
)

V2, P2 = Space(VECTOR, 2), Space(PROJECTIVE, 2)


def hyperbolic_pair():
    h = np.diag([2.0, 0.5])
    r = rotation(math.pi / 4)
    return FiniteMeasure.normalized([h, r @ h @ r.T])


def test_config_validation_and_times():
    with pytest.raises(InvalidInputError):
        WalkConfig(horizon=0)
    np.testing.assert_array_equal(WalkConfig(horizon=10, record_stride=4).times, [1, 5, 9, 10])


def test_dirac_walk_is_deterministic_powers():
    g = np.array([[1.0, 1.0], [0.0, 2.0]])
    x0 = np.array([1.0, -1.0])
    paths = simulate(dirac(g), V2, x0, WalkConfig(horizon=6, n_paths=3))
    expect = np.stack([np.linalg.matrix_power(g, n) @ x0 for n in range(1, 7)])
    for p in paths:
        np.testing.assert_allclose(p.points, expect, rtol=1e-15)


def test_identity_walk_is_constant():
    paths = simulate(dirac(np.eye(3)), Space(VECTOR, 3), [1.0, 2.0, 3.0], WalkConfig(horizon=20, n_paths=4))
    assert np.all(paths.points == np.array([1.0, 2.0, 3.0]))
    cloud = estimate_limit_set(paths)
    assert len(cloud) == 1


def test_contracting_norm_bound_holds_pathwise():
    a = 0.2
    mu = family_contracting(2, a, 4, seed=7)
    x0 = np.array([1.0, 1.0])
    paths = simulate(mu, V2, x0, WalkConfig(horizon=30, n_paths=2000, base_seed=3))
    norms = np.linalg.norm(paths.points, axis=-1)
    bound = a ** paths.times * math.sqrt(2)
    assert np.all(norms <= bound * (1 + 1e-9))


def test_projective_paths_stay_on_the_sphere():
    mu = FiniteMeasure.normalized([np.array([[3.0, 1.0], [0.0, 1 / 3]]), np.array([[1.0, 0.0], [5.0, 1.0]])])
    paths = simulate(mu, P2, [1.0, 0.3], WalkConfig(horizon=10_000, n_paths=8, record_stride=1000))
    assert np.all(np.abs(np.linalg.norm(paths.points, axis=-1) - 1) <= 1e-9)


def test_parallel_schedule_is_bit_identical():
    mu = family_contracting(3, 0.8, 5, seed=1)
    cfg = WalkConfig(horizon=300, n_paths=257, base_seed=99, record_stride=7)
    serial = simulate(mu, Space(VECTOR, 3), [1.0, 0.0, -1.0], cfg)
    parallel = simulate(mu, Space(VECTOR, 3), [1.0, 0.0, -1.0], cfg, workers=4)
    np.testing.assert_array_equal(serial.points, parallel.points)
    # a sub-range of paths reproduces the same rows
    tail = simulate(mu, Space(VECTOR, 3), [1.0, 0.0, -1.0], WalkConfig(300, 57, 99, 7), path_offset=200)
    np.testing.assert_array_equal(tail.points, serial.points[200:])


def test_overflow_truncates_and_flags():
    paths = simulate(dirac(1e100 * np.eye(2)), V2, [1.0, 1.0], WalkConfig(horizon=5, n_paths=2))
    assert paths.truncated.all()
    assert np.isfinite(paths.points[:, 1]).all()
    assert np.isnan(paths.points[:, 3:]).all()


def test_dimension_mismatch():
    with pytest.raises(InvalidInputError):
        simulate(dirac(np.eye(3)), V2, [1.0, 0.0], WalkConfig(horizon=2, n_paths=1))


def test_limit_set_contracting_is_origin():
    mu = family_contracting(2, 0.2, 4, seed=7)
    paths = simulate(mu, V2, [1.0, 1.0], WalkConfig(horizon=30, n_paths=1000))
    cloud = estimate_limit_set(paths, 0.2, eps=0.01)
    assert len(cloud) == 1
    assert np.linalg.norm(cloud.points[0]) <= 0.01


def test_limit_set_diag_is_dominant_eigenline():
    g = np.diag([2.0, 0.5])
    # power iteration oracle for the dominant eigenline
    v = np.array([0.3, 0.9])
    for _ in range(200):
        v = g @ v
        v /= np.linalg.norm(v)
    paths = simulate(dirac(g), P2, [0.3, 0.9], WalkConfig(horizon=100, n_paths=5))
    cloud = estimate_limit_set(paths, 0.2, eps=0.01)
    assert len(cloud) == 1
    assert proj_dist(cloud.points[0], v) <= 1e-12


def test_transience_curves():
    mu = family_contracting(2, 0.2, 4, seed=7)
    paths = simulate(mu, V2, [1.0, 1.0], WalkConfig(horizon=30, n_paths=2000))
    everything = transience_stat(paths, lambda p: np.ones(p.shape[:-1], dtype=bool))
    assert np.all(everything.values == 1.0)
    norms = lambda p: np.linalg.norm(p, axis=-1)  # noqa: E731
    annulus = transience_stat(paths, lambda p: (norms(p) >= 0.5) & (norms(p) <= 2))
    # oracle: a path can be in the annulus at time n only if a^n sqrt(2) >= 0.5
    possible = 0.2 ** paths.times * math.sqrt(2) >= 0.5
    assert np.all(annulus.values[~possible] == 0.0)
    assert annulus.at(30) < 0.01 and annulus.transient
    ball = transience_stat(paths, lambda p: norms(p) <= 0.01)
    assert ball.at(30) == 1.0


def test_increment_constant_is_zero():
    paths = simulate(hyperbolic_pair(), P2, [0.2, 1.0], WalkConfig(horizon=50, n_paths=100))
    curve = increment_stat(paths, lambda p: np.full(p.shape[:-1], 3.0), hyperbolic_pair())
    assert np.all(curve.values == 0.0)


def test_increment_non_harmonic_stays_away_from_zero():
    mu = dirac(rotation(math.pi / 3))
    f = gaussian_bump(angle_to_point(0.5), 0.3, P2)
    paths = simulate(mu, P2, angle_to_point(0.1), WalkConfig(horizon=300, n_paths=1))
    curve = increment_stat(paths, f, mu)
    # the rotation cycles through 3 lines, so the increments are 3-periodic
    assert curve.windowed_means(3).min() > 0.1


def test_increment_of_harmonic_estimate_decays():
    mu = hyperbolic_pair()
    n_bins = 720
    f = GridFunction.from_function(gaussian_bump(angle_to_point(1.0), 0.3, P2), n_bins)
    F, _ = cesaro(mu, f, 2000)
    # independent fixed point: the stationary vector of a dense copy of the grid operator
    theta = np.arange(n_bins) * np.pi / n_bins
    dense = np.zeros((n_bins, n_bins))
    for g, w in zip(mu.atoms, mu.weights):
        v = np.stack([np.cos(theta), np.sin(theta)], 1) @ g.T
        pos = np.mod(np.arctan2(v[:, 1], v[:, 0]), np.pi) / np.pi * n_bins
        lo = np.floor(pos).astype(int)
        frac = pos - lo
        for j in range(n_bins):
            dense[j, lo[j] % n_bins] += w * (1 - frac[j])
            dense[j, (lo[j] + 1) % n_bins] += w * frac[j]
    evals, evecs = np.linalg.eig(dense.T)
    pi = np.real(evecs[:, np.argmin(np.abs(evals - 1))])
    pi /= pi.sum()
    fixed_value = pi @ f.values
    assert np.max(np.abs(F.values - fixed_value)) <= 1e-3

    paths = simulate(mu, P2, angle_to_point(2.0), WalkConfig(horizon=500, n_paths=2000, base_seed=1))
    curve = increment_stat(paths, F, mu)
    assert curve.at(500) < 0.05
    means = curve.windowed_means(50)
    assert means[-1] < means[0]
    assert np.all(np.diff(means) <= 1e-2 * means[0])


def test_curve_csv(tmp_path):
    paths = simulate(dirac(np.eye(2)), V2, [1.0, 2.0], WalkConfig(horizon=3, n_paths=2))
    paths.to_csv(tmp_path / "p.csv")
    rows = (tmp_path / "p.csv").read_text().splitlines()
    assert rows[0] == "path_index,n,x0,x1" and len(rows) == 7
    curve = transience_stat(paths, lambda p: np.ones(p.shape[:-1], dtype=bool))
    curve.to_csv(tmp_path / "c.csv")
    assert (tmp_path / "c.csv").read_text().splitlines()[1] == "1,1.0"


def test_limit_set_outlier_mass_cut():
    # 999 paths sit at e1, one stays at e2: the lone path carries mass 1e-3
    space = Space(VECTOR, 2)
    pts = np.zeros((1000, 5, 2))
    pts[:, :, 0] = 1.0
    pts[0] = [0.0, 1.0]
    ens = PathEnsemble(space, np.array([1.0, 0.0]), np.arange(1, 6), pts, np.arange(1000), np.zeros(1000, bool))
    assert len(estimate_limit_set(ens, 1.0, eps=0.01)) == 2
    cut = estimate_limit_set(ens, 1.0, eps=0.01, min_mass=2e-3)
    assert len(cut) == 1 and np.allclose(cut.points, [[1.0, 0.0]])
    assert cut.info["dropped_mass"] == pytest.approx(1e-3)
    assert cut.weights.sum() == pytest.approx(1 - 1e-3)
