"""Left random walks ``X_n x = g_n ... g_1 x`` on a space, and path statistics.

Points are pushed forward one factor at a time; on projective spaces the
vector is renormalized after every step, so the full product matrix (whose
norm can over- or underflow) is never formed.
"""
from __future__ import annotations

import csv
import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import rng
from .cloud import OrbitCloud, epsilon_net
from .errors import InvalidInputError
from .gspace import Space, canonical_sign
from .measure import FiniteMeasure

OVERFLOW_NORM = 1e300
_TIME_CHUNK = 256


@dataclass(frozen=True)
class WalkConfig:
    horizon: int = 1000
    n_paths: int = 1000
    base_seed: int = 0
    record_stride: int = 1

    def __post_init__(self):
        if self.horizon < 1 or self.n_paths < 1 or self.record_stride < 1:
            raise InvalidInputError("WalkConfig: horizon, n_paths and record_stride must be >= 1")

    @property
    def times(self) -> np.ndarray:
        """Recorded step numbers: 1, 1 + stride, ..., always ending at the horizon."""
        t = np.arange(1, self.horizon + 1, self.record_stride)
        return t if t[-1] == self.horizon else np.append(t, self.horizon)

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "n_paths": self.n_paths,
            "base_seed": self.base_seed,
            "record_stride": self.record_stride,
        }


@dataclass(frozen=True, eq=False)
class PathSample:
    start: np.ndarray
    points: np.ndarray
    times: np.ndarray
    path_index: int
    truncated: bool = False


@dataclass(eq=False)
class PathEnsemble(Sequence):
    """All simulated paths, stored as one ``(n_paths, n_times, dim)`` array.

    Indexing yields :class:`PathSample` views.
    """

    space: Space
    start: np.ndarray
    times: np.ndarray
    points: np.ndarray
    path_indices: np.ndarray
    truncated: np.ndarray

    def __len__(self):
        return self.points.shape[0]

    def __getitem__(self, i):
        if isinstance(i, slice):
            return [self[j] for j in range(*i.indices(len(self)))]
        return PathSample(
            start=self.start,
            points=self.points[i],
            times=self.times,
            path_index=int(self.path_indices[i]),
            truncated=bool(self.truncated[i]),
        )

    def to_csv(self, path) -> None:
        """Rows ``(path_index, n, x0, x1, ...)``."""
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["path_index", "n"] + [f"x{i}" for i in range(self.points.shape[2])])
            for pi, pts in zip(self.path_indices, self.points):
                for n, p in zip(self.times, pts):
                    w.writerow([int(pi), int(n)] + [repr(float(c)) for c in p])


def _scaled_norm(y):
    # plain norms square the entries and overflow near 1e154
    m = np.max(np.abs(y), axis=1)
    with np.errstate(invalid="ignore", divide="ignore"):
        r = np.linalg.norm(y / np.where(m > 0, m, 1.0)[:, None], axis=1)
    return m * r


def _simulate_block(mats, mu, projective, x0, cfg, indices):
    m = len(indices)
    times = cfg.times
    out = np.full((m, len(times), x0.shape[0]), np.nan)
    truncated = np.zeros(m, dtype=bool)
    x = np.tile(x0, (m, 1))
    rec = 0
    for t0 in range(0, cfg.horizon, _TIME_CHUNK):
        steps = min(_TIME_CHUNK, cfg.horizon - t0)
        idx = mu.index_from_uniform(rng.uniforms(cfg.base_seed, indices, steps, offset=t0))
        for j in range(steps):
            col = idx[:, j]
            y = np.empty_like(x)
            for a, g in enumerate(mats):
                sel = col == a
                y[sel] = x[sel] @ g.T
            if projective:
                y /= np.linalg.norm(y, axis=1, keepdims=True)
            else:
                bad = ~(_scaled_norm(y) <= OVERFLOW_NORM)
                if bad.any():
                    truncated |= bad
                    y[bad] = np.nan
            x = y
            n = t0 + j + 1
            if rec < len(times) and times[rec] == n:
                out[:, rec] = canonical_sign(x) if projective else x
                rec += 1
    return out, truncated


def simulate(mu: FiniteMeasure, space: Space, x0, cfg: WalkConfig, workers: int = 1, path_offset: int = 0) -> PathEnsemble:
    """Simulate ``cfg.n_paths`` independent left walks from ``x0``.

    Path ``i`` uses the counter stream keyed by ``(cfg.base_seed, path_offset + i)``,
    so splitting the paths across ``workers`` threads changes nothing.
    Vector-space paths whose norm exceeds 1e300 are truncated: later
    points become NaN and the path is flagged.
    """
    if mu.dim != space.d:
        raise InvalidInputError(f"measure of dim {mu.dim} cannot act on {space}")
    x0 = space.point(x0)
    if x0.ndim != 1:
        raise InvalidInputError("simulate: x0 must be a single point")
    mats = [space.action_matrix(g) for g in mu.atoms]
    indices = np.arange(path_offset, path_offset + cfg.n_paths, dtype=np.int64)
    workers = max(1, int(workers))
    blocks = np.array_split(indices, min(workers, len(indices)))
    run = lambda b: _simulate_block(mats, mu, space.is_projective, x0, cfg, b)  # noqa: E731
    if workers == 1:
        results = [run(b) for b in blocks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(run, blocks))
    return PathEnsemble(
        space=space,
        start=x0,
        times=cfg.times,
        points=np.concatenate([r[0] for r in results]),
        path_indices=indices,
        truncated=np.concatenate([r[1] for r in results]),
    )


def _tail(paths: PathEnsemble, tail_fraction: float) -> np.ndarray:
    if not 0 < tail_fraction <= 1:
        raise InvalidInputError("tail_fraction must lie in (0, 1]")
    n_times = paths.points.shape[1]
    k = max(1, math.ceil(tail_fraction * n_times))
    return paths.points[:, n_times - k:]


def estimate_limit_set(paths: PathEnsemble, tail_fraction: float = 0.2, eps: float = 0.01, min_mass: float = 0.0) -> OrbitCloud:
    """Eps-net over the last ``tail_fraction`` of every recorded path.

    Each center carries the share of tail points it absorbed.  Centers
    holding less than ``min_mass`` of them are dropped as outliers, since
    limit points are only claimed for almost every path.
    """
    if len(paths) == 0:
        raise InvalidInputError("estimate_limit_set: no paths")
    if not 0 <= min_mass < 1:
        raise InvalidInputError("estimate_limit_set: min_mass must lie in [0, 1)")
    pts = _tail(paths, tail_fraction).reshape(-1, paths.points.shape[2])
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    centers, mass = epsilon_net(pts, eps, paths.space, weights=np.full(len(pts), 1.0 / max(len(pts), 1)))
    keep = mass >= min_mass if len(pts) else np.zeros(0, dtype=bool)
    info = {"tail_fraction": tail_fraction, "min_mass": min_mass, "dropped_mass": float(mass[~keep].sum()) if len(pts) else 0.0}
    return OrbitCloud(paths.space, centers[keep], eps, weights=mass[keep], info=info)


@dataclass(frozen=True, eq=False)
class Curve:
    times: np.ndarray
    values: np.ndarray

    def at(self, n: int) -> float:
        """Value at the last recorded time not after ``n``."""
        i = np.searchsorted(self.times, n, side="right") - 1
        if i < 0:
            raise InvalidInputError(f"no recorded time <= {n}")
        return float(self.values[i])

    def windowed_means(self, window: int) -> np.ndarray:
        k = len(self.values) // window
        return self.values[: k * window].reshape(k, window).mean(axis=1)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["n", "value"])
            for n, v in zip(self.times, self.values):
                w.writerow([int(n), repr(float(v))])


@dataclass(frozen=True, eq=False)
class ReturnCurve(Curve):
    """Fraction of paths that visit the region at some recorded time >= n."""

    threshold: float = 0.01

    @property
    def first_below(self):
        below = np.nonzero(self.values < self.threshold)[0]
        return int(self.times[below[0]]) if below.size else None

    @property
    def transient(self) -> bool:
        return self.first_below is not None


class DecayCurve(Curve):
    """Mean increment ``|h(g X_n x) - h(X_n x)|`` against n."""


def transience_stat(paths: PathEnsemble, region, threshold: float = 0.01) -> ReturnCurve:
    """``region`` maps an ``(..., dim)`` array of points to booleans."""
    inside = np.asarray(region(paths.points), dtype=bool) & np.all(np.isfinite(paths.points), axis=-1)
    later = np.logical_or.accumulate(inside[:, ::-1], axis=1)[:, ::-1]
    return ReturnCurve(paths.times, later.mean(axis=0), threshold)


def increment_stat(paths: PathEnsemble, h, mu: FiniteMeasure) -> DecayCurve:
    """mu-weighted mean over atoms and paths of ``|h(g X_n x) - h(X_n x)|``.

    ``h`` is evaluated on ``(..., dim)`` arrays of points.
    """
    space = paths.space
    pts = paths.points
    base = np.asarray(h(pts), dtype=float)
    total = np.zeros(pts.shape[1])
    for g, w in zip(mu.atoms, mu.weights):
        a = space.action_matrix(g)
        y = pts @ a.T
        if space.is_projective:
            y = canonical_sign(y / np.linalg.norm(y, axis=-1, keepdims=True))
        diff = np.abs(np.asarray(h(y), dtype=float) - base)
        total += w * np.nanmean(diff, axis=0)
    return DecayCurve(paths.times, total)
