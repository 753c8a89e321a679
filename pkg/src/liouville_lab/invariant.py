"""Orbit closures, minimal sets and fixed points on projective spaces."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cloud import OrbitCloud, directed_hausdorff, extend_net, hausdorff, min_dist
from .errors import InvalidInputError, LiouvilleLabError
from .gspace import Space, act, canonical_sign, projectivize
from .linalg import as_matrix, common_fixed_space, invert, operator_norm
from .measure import FiniteMeasure, adjoint
from .walk import WalkConfig, simulate

__all__ = [
    "OrbitCloud",
    "ProximalityResult",
    "hausdorff",
    "minimal_sets",
    "orbit_closure",
    "overlap_test",
    "proximality_stat",
    "rank_one_attractor",
    "unipotent_fixed_points",
]


def orbit_closure(
    mu: FiniteMeasure,
    space: Space,
    x0,
    max_words: int = 12,
    use_inverses: bool = False,
    eps: float = 0.01,
    max_points: int = 20000,
    shuffle_seed: int | None = None,
) -> OrbitCloud:
    """Breadth-first eps-net of ``{w x0}`` over words ``w`` of length <= max_words.

    Words use the atoms (approximating S_mu x0) or atoms and inverses
    (G_mu x0).  Only points that enlarge the net are expanded further.
    The cloud is flagged non-converged when the word or point budget runs
    out while the last generation was still adding points.
    Each generation's images are sorted lexicographically before they
    enter the net, so the result does not depend on the order in which a
    parallel expansion produced them.  ``shuffle_seed`` permutes the images
    before that sort, to exercise this.
    """
    if max_words < 1:
        raise InvalidInputError("orbit_closure: max_words must be >= 1")
    mats = [space.action_matrix(g) for g in mu.atoms]
    if use_inverses:
        mats += [invert(m) for m in mats]
    x0 = space.point(np.asarray(x0, dtype=float)).reshape(1, -1)
    shuffler = np.random.default_rng(shuffle_seed) if shuffle_seed is not None else None
    net, frontier = x0, x0
    converged = False
    depth = 0
    while depth < max_words and len(net) < max_points:
        images = np.concatenate([frontier @ m.T for m in mats])
        if space.is_projective:
            images = projectivize(images)
        if shuffler is not None:
            images = images[shuffler.permutation(len(images))]
        images = images[np.lexsort(images.T[::-1])]
        net, frontier = extend_net(net, images, eps, space)
        depth += 1
        if len(frontier) == 0:
            converged = True
            break
    return OrbitCloud(
        space,
        net,
        eps,
        converged=converged,
        info={"depth": depth, "use_inverses": use_inverses, "max_words": max_words},
    )


def _land(mu, space, x, burn_in, seed, index):
    cfg = WalkConfig(horizon=burn_in, n_paths=1, base_seed=seed, record_stride=burn_in)
    return simulate(mu, space, x, cfg, path_offset=index).points[0, -1]


def minimal_sets(
    mu: FiniteMeasure,
    space: Space,
    seeds,
    burn_in: int = 1000,
    eps: float = 0.01,
    max_words: int = 12,
    base_seed: int = 0,
    backward: bool = True,
) -> list[OrbitCloud]:
    """Approximate the S_mu-minimal sets reached from ``seeds``.

    Each seed is pushed along a random word of length ``burn_in`` and the
    forward orbit closure of the landing point is taken.  With ``backward``
    the seed is also pushed along a word of the inverse measure, which
    lands near repelling minimal sets that forward words never approach.
    Candidates that strictly contain another candidate (within ``2 eps``)
    are not minimal and are dropped; candidates within Hausdorff distance
    ``2 eps`` of each other are merged.
    """
    if burn_in < 1:
        raise InvalidInputError("minimal_sets: burn_in must be >= 1")
    seeds = space.point(np.atleast_2d(seeds))
    walkers = [mu, adjoint(mu)] if backward else [mu]
    candidates = []
    for i, x in enumerate(seeds):
        for w, walker in enumerate(walkers):
            y = _land(walker, space, x, burn_in, base_seed, 2 * i + w)
            if not np.all(np.isfinite(y)):
                continue
            candidates.append(orbit_closure(mu, space, y, max_words=max_words, eps=eps))

    tol = 2 * eps
    keep = []
    for i, c in enumerate(candidates):
        strict_superset = any(
            directed_hausdorff(d, c, space) <= tol and directed_hausdorff(c, d, space) > tol
            for j, d in enumerate(candidates)
            if j != i
        )
        if not strict_superset:
            keep.append(c)
    merged: list[OrbitCloud] = []
    for c in keep:
        if not any(hausdorff(c, m, space) <= tol for m in merged):
            merged.append(c)
    return merged


def overlap_test(a: OrbitCloud, b: OrbitCloud, eps: float = 0.02) -> bool:
    """True iff some point of ``a`` lies within ``eps`` of some point of ``b``."""
    if a.space != b.space:
        raise InvalidInputError("overlap_test: clouds live in different spaces")
    if len(a) == 0 or len(b) == 0:
        return False
    return bool(min_dist(a.points, b.points, a.space).min() <= eps)


@dataclass(frozen=True, eq=False)
class ProximalityResult:
    fraction: float
    min_dists: np.ndarray
    initial_dists: np.ndarray
    eps: float


def proximality_stat(mu: FiniteMeasure, space: Space, pairs, cfg: WalkConfig, eps: float = 1e-3) -> ProximalityResult:
    """Fraction of pairs ``(x, y)`` brought within ``eps`` of each other by
    some common random word before the horizon.

    Both points of a pair are driven by the same streams, so path ``m`` of
    ``x`` and path ``m`` of ``y`` see the same word.
    """
    mins, inits = [], []
    for x, y in pairs:
        px = simulate(mu, space, x, cfg)
        py = simulate(mu, space, y, cfg)
        inits.append(float(space.dist(space.point(x), space.point(y))))
        mins.append(float(min(inits[-1], np.nanmin(space.dist(px.points, py.points)))))
    mins = np.array(mins)
    return ProximalityResult(float(np.mean(mins <= eps)), mins, np.array(inits), eps)


def _canonical_matrix(h):
    flat = canonical_sign(h.reshape(-1))
    return flat.reshape(h.shape)


def rank_one_attractor(gs, tol: float = 1e-6):
    """Attracting line of a sequence whose normalized terms tend to rank one.

    Each ``g`` is scaled to unit norm and sign-fixed (largest entry
    positive).  If the last two normalized terms agree within ``tol`` and
    the limit ``h`` has ``sigma_2 / sigma_1 <= tol``, the line spanned by
    the image of ``h`` is returned; otherwise ``None``.
    """
    gs = [as_matrix(g) for g in gs]
    if not gs:
        raise InvalidInputError("rank_one_attractor: empty sequence")
    if any(g.shape != gs[0].shape for g in gs):
        raise InvalidInputError("rank_one_attractor: matrices differ in dimension")
    if len(gs) < 2:
        return None
    hs = [_canonical_matrix(g / operator_norm(g)) for g in gs[-2:]]
    if np.linalg.norm(hs[1] - hs[0], 2) > tol:
        return None
    u, s, _ = np.linalg.svd(hs[1])
    if s.size > 1 and s[1] / s[0] > tol:
        return None
    return projectivize(u[:, 0])


def normalized_powers(g, n: int) -> list[np.ndarray]:
    """``g, g^2, ..., g^n`` each rescaled to unit norm (no overflow)."""
    g = as_matrix(g)
    out, p = [], np.eye(g.shape[0])
    for _ in range(n):
        p = g @ p
        p = p / operator_norm(p)
        out.append(p)
    return out


def unipotent_fixed_points(generators, space: Space, tol: float = 1e-9) -> list[np.ndarray]:
    """Lines fixed by every generator, from the common fixed space of the
    action matrices (adjoint representation on P(sl))."""
    if not space.is_projective:
        raise InvalidInputError("unipotent_fixed_points: needs a projective space")
    mats = [space.action_matrix(g) for g in generators]
    if not mats:
        raise InvalidInputError("unipotent_fixed_points: no generators")
    for m in mats:
        dim = m.shape[0]
        e = m - np.eye(dim)
        scale = max(1.0, operator_norm(e)) ** dim
        if np.linalg.norm(np.linalg.matrix_power(e, dim), 2) > 1e-8 * scale:
            raise InvalidInputError("unipotent_fixed_points: generator does not act unipotently")
    basis = common_fixed_space(mats, tol)
    if len(basis) == 0:
        raise LiouvilleLabError("unipotent_fixed_points: empty fixed space (tolerance too tight?)")
    return [projectivize(b) for b in basis]


def fixed_residual(mats, p, space: Space) -> float:
    """Largest ``dist(g p, p)`` over ``mats``."""
    return max(float(space.dist(act(g, p, space), p)) for g in mats)
