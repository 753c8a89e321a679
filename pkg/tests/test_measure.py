import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from liouville_lab import rng
from liouville_lab.errors import InvalidInputError, SingularMatrixError
from liouville_lab.linalg import operator_norm
from liouville_lab.measure import (
    FiniteMeasure,
    adjoint,
    dirac,
    family_axb,
    family_contracting,
    family_example71,
    measure_from_json,
    rotation,
    sample,
    support_norm_bound,
)


def test_construction_validates():
    with pytest.raises(InvalidInputError):
        FiniteMeasure(np.stack([np.eye(2), 2 * np.eye(2)]), [1.0, 0.0])
    with pytest.raises(InvalidInputError):
        FiniteMeasure(np.stack([np.eye(2), 2 * np.eye(2)]), [0.5, 0.5 + 1e-9])
    with pytest.raises(SingularMatrixError):
        FiniteMeasure(np.zeros((1, 2, 2)), [1.0])
    with pytest.raises(InvalidInputError):
        FiniteMeasure(np.stack([np.eye(2)]), [0.5, 0.5])


@given(st.lists(st.floats(1e-3, 1e3), min_size=1, max_size=12))
def test_normalized_weights_sum_to_one(ws):
    mu = FiniteMeasure.normalized(np.stack([np.eye(2)] * len(ws)), ws)
    assert abs(mu.weights.sum() - 1.0) <= 1e-12
    assert np.all(mu.weights > 0)


def test_measure_is_immutable():
    mu = dirac(np.eye(2))
    with pytest.raises(ValueError):
        mu.atoms[0, 0, 0] = 5.0


def test_sample_single_atom_and_determinism():
    g = np.array([[2.0, 1.0], [0.0, 1.0]])
    mu = dirac(g)
    gen = np.random.default_rng(1)
    for _ in range(5):
        np.testing.assert_array_equal(sample(mu, gen), g)
    nu = FiniteMeasure.normalized(np.stack([np.eye(2), g, 3 * np.eye(2)]))
    a = [sample(nu, rng.generator(9)) for _ in range(3)]
    b = [sample(nu, rng.generator(9)) for _ in range(3)]
    for x, y in zip(a, b):
        np.testing.assert_array_equal(x, y)


def test_sample_frequency_within_binomial_band():
    mu = FiniteMeasure.normalized(np.stack([np.eye(2), 2 * np.eye(2)]))
    gen = rng.generator(31)
    n = 10_000
    hits = sum(sample(mu, gen)[0, 0] == 1.0 for _ in range(n))
    sigma = math.sqrt(n * 0.25)
    assert abs(hits - n / 2) <= 3 * sigma


def test_adjoint():
    np.testing.assert_array_equal(adjoint(dirac(np.eye(3))).atoms[0], np.eye(3))
    g = np.array([[1.0, 1.0], [0.0, 1.0]])
    np.testing.assert_allclose(adjoint(dirac(g)).atoms[0], [[1.0, -1.0], [0.0, 1.0]])
    mu = family_contracting(3, 0.5, 3, seed=4)
    back = adjoint(adjoint(mu))
    np.testing.assert_allclose(back.atoms, mu.atoms, rtol=1e-10, atol=1e-14)
    np.testing.assert_array_equal(adjoint(mu).weights, mu.weights)


def test_support_norm_bound():
    atoms = np.stack([0.2 * rotation(t) for t in (0.1, 1.0, 2.0)])
    mu = FiniteMeasure.normalized(atoms)
    assert support_norm_bound(mu, 3) == pytest.approx(0.008, rel=1e-12)
    assert support_norm_bound(dirac(np.eye(2)), 7) == pytest.approx(1.0)


def test_support_norm_bound_dominates_sampled_products():
    mu = family_contracting(3, 0.6, 5, seed=11)
    gen = rng.generator(12)
    for n in (1, 3, 6):
        bound = support_norm_bound(mu, n)
        for _ in range(1000 // 3):
            p = np.eye(3)
            for _ in range(n):
                p = sample(mu, gen) @ p
            assert operator_norm(p) <= bound * (1 + 1e-12)


@pytest.mark.parametrize("d,a,k", [(2, 0.2, 4), (3, 0.9, 2), (1, 0.5, 1)])
def test_family_contracting(d, a, k):
    mu = family_contracting(d, a, k, seed=7)
    assert len(mu) == k and mu.dim == d
    for g in mu.atoms:
        assert operator_norm(g) <= a * (1 + 1e-12)
        assert abs(np.linalg.det(g)) > 0
    np.testing.assert_array_equal(family_contracting(d, a, k, seed=7).atoms, mu.atoms)
    with pytest.raises(InvalidInputError):
        family_contracting(2, 1.0, 2, 0)


def test_family_axb():
    mu = family_axb([0.1], [0.0])
    np.testing.assert_allclose(mu.atoms[0], [[0.01, 0.0], [0.0, 0.1]])
    # norms bounded by the extreme parameters t = a = 1/5
    extreme = np.linalg.svd(np.array([[1 / 25, 1 / 5], [0.0, 1 / 5]]), compute_uv=False)[0]
    assert extreme < 1
    mu = family_axb([0.05, 0.19, 0.15], [0.19, -0.19, 0.0])
    for g in mu.atoms:
        assert operator_norm(g) <= extreme
        assert g[1, 0] == 0 and g[0, 0] > 0 and g[1, 1] > 0
    for bad in ([0.2], [0.0], [-0.1]):
        with pytest.raises(InvalidInputError):
            family_axb(bad, [0.0])
    with pytest.raises(InvalidInputError):
        family_axb([0.1], [0.2])


def test_family_example71():
    mu = family_example71([[0.0, 0.0], [1.0, 0.0]])
    np.testing.assert_allclose(mu.atoms[0], np.eye(4))
    np.testing.assert_allclose(mu.atoms[1], np.diag([1, 1, math.e, 1 / math.e]))
    for g in family_example71(np.random.default_rng(0).uniform(-1.5, 1.5, (4, 2))).atoms:
        assert np.linalg.det(g) == pytest.approx(1.0, rel=1e-12)


def test_measure_from_json():
    mu = measure_from_json({"atoms": [{"rows": [[1, 0], [0, 1]], "weight": 0.25}, {"rows": [[2, 0], [0, 1]], "weight": 0.75}]})
    np.testing.assert_array_equal(mu.weights, [0.25, 0.75])
    mu2 = measure_from_json(mu.to_json())
    np.testing.assert_array_equal(mu2.atoms, mu.atoms)
    fam = measure_from_json({"family": "contracting", "d": 2, "a": 0.2, "k": 4, "seed": 7})
    np.testing.assert_array_equal(fam.atoms, family_contracting(2, 0.2, 4, 7).atoms)
    assert len(measure_from_json({"family": "example71", "params": [[0, 1], [1, 0]]})) == 2
    with pytest.raises(InvalidInputError):
        measure_from_json({"family": "nosuch"})
    with pytest.raises(InvalidInputError):
        measure_from_json({"family": "axb", "ts": [0.1]})
    with pytest.raises(InvalidInputError):
        measure_from_json([1, 2])


# -- counter-based streams ---------------------------------------------------

def test_uniform_streams_are_order_independent():
    full = rng.uniforms(5, np.arange(10), 300)
    part = rng.uniforms(5, np.array([7, 2]), 300)
    np.testing.assert_array_equal(part, full[[7, 2]])
    # reading the stream in two chunks gives the same draws
    a = rng.uniforms(5, np.arange(3), 100)
    b = np.concatenate([rng.uniforms(5, np.arange(3), 40), rng.uniforms(5, np.arange(3), 60, offset=40)], axis=1)
    np.testing.assert_array_equal(a, b)


def test_uniform_streams_look_uniform():
    u = rng.uniforms(0, np.arange(200), 500).ravel()
    assert u.min() >= 0.0 and u.max() < 1.0
    counts, _ = np.histogram(u, bins=20, range=(0, 1))
    expected = u.size / 20
    chi2 = float(((counts - expected) ** 2 / expected).sum())
    # 19 degrees of freedom: the 0.999 quantile is about 43.8
    assert chi2 < 43.8
    assert abs(np.corrcoef(u[:-1], u[1:])[0, 1]) < 0.01


def test_different_seeds_differ():
    assert not np.array_equal(rng.uniforms(1, [0], 10), rng.uniforms(2, [0], 10))
    assert not np.array_equal(rng.uniforms(1, [0], 10), rng.uniforms(1, [1], 10))
