"""Epsilon-net point clouds standing in for closed subsets of a space."""
from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field

import numpy as np

from .gspace import Space, act


def min_dist(x, y, space: Space, chunk_elems: int = 2_000_000) -> np.ndarray:
    """For each row of ``x``, the distance to the nearest row of ``y``."""
    x = np.atleast_2d(x)
    y = np.atleast_2d(y)
    if len(y) == 0:
        return np.full(len(x), np.inf)
    step = max(1, chunk_elems // max(1, len(y) * x.shape[1]))
    out = np.empty(len(x))
    for lo in range(0, len(x), step):
        out[lo:lo + step] = space.dist(x[lo:lo + step, None, :], y[None, :, :]).min(axis=1)
    return out


@dataclass(eq=False)
class OrbitCloud:
    """Finite eps-separated point set with optional probability weights.

    ``converged`` is False when the procedure that built the cloud ran out
    of budget before its frontier stabilized.
    """

    space: Space
    points: np.ndarray
    eps: float
    weights: np.ndarray | None = None
    converged: bool = True
    info: dict = field(default_factory=dict)

    def __len__(self):
        return len(self.points)

    def dist_to(self, x) -> np.ndarray:
        """Distance from each point of ``x`` (batch or single) to the cloud."""
        return min_dist(x, self.points, self.space)

    def contains(self, x, tol: float | None = None) -> bool:
        tol = self.eps if tol is None else tol
        return bool(np.all(self.dist_to(x) <= tol))

    def diameter(self) -> float:
        if len(self.points) < 2:
            return 0.0
        return float(self.space.dist(self.points[:, None, :], self.points[None, :, :]).max())

    def invariance_residual(self, mats) -> float:
        """Largest distance from ``g . C`` to ``C`` over the given matrices."""
        worst = 0.0
        for g in mats:
            worst = max(worst, float(self.dist_to(act(g, self.points, self.space)).max()))
        return worst

    def summary(self, mats=None) -> dict:
        out = {
            "space": self.space.to_json(),
            "count": len(self),
            "eps": self.eps,
            "diameter": self.diameter(),
            "converged": self.converged,
        }
        if mats is not None:
            out["invariance_residual"] = self.invariance_residual(mats)
        return out

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            dim = self.points.shape[1] if self.points.ndim == 2 else self.space.ambient_dim
            w.writerow([f"x{i}" for i in range(dim)] + ["weight"])
            weights = self.weights if self.weights is not None else np.full(len(self), 1.0 / max(len(self), 1))
            for p, wt in zip(self.points, weights):
                w.writerow([repr(float(c)) for c in p] + [repr(float(wt))])

    def to_json(self) -> str:
        return json.dumps(self.summary())


def epsilon_net(points, eps: float, space: Space, weights=None):
    """Greedy eps-net: scan in order, keep a point unless an earlier kept
    point lies within ``eps``.  Returns ``(centers, accumulated_weights)``;
    each input point's weight goes to the first center that absorbed it."""
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points[None]
    keep = np.all(np.isfinite(points), axis=1)
    points = points[keep]
    w = None if weights is None else np.asarray(weights, dtype=float)[keep]
    centers, acc = [], []
    remaining = np.arange(len(points))
    while remaining.size:
        c = points[remaining[0]]
        close = space.dist(points[remaining], c) <= eps
        centers.append(c)
        if w is not None:
            acc.append(w[remaining[close]].sum())
        remaining = remaining[~close]
    centers = np.array(centers).reshape(-1, points.shape[1])
    return centers, (np.array(acc) if w is not None else None)


def extend_net(net, candidates, eps: float, space: Space):
    """Add the candidates farther than ``eps`` from ``net`` (and from each
    other).  Returns ``(new_net, added_points)``."""
    candidates = np.asarray(candidates, dtype=float).reshape(-1, space.ambient_dim)
    candidates = candidates[np.all(np.isfinite(candidates), axis=1)]
    if len(net) and len(candidates):
        dmin = min_dist(candidates, net, space)
        candidates = candidates[dmin > eps]
    added, _ = epsilon_net(candidates, eps, space)
    if len(added) == 0:
        return net, added
    return (np.vstack([net, added]) if len(net) else added), added


def directed_hausdorff(a: OrbitCloud | np.ndarray, b: OrbitCloud | np.ndarray, space: Space) -> float:
    """sup over points of ``a`` of the distance to ``b``."""
    pa = a.points if isinstance(a, OrbitCloud) else np.atleast_2d(a)
    pb = b.points if isinstance(b, OrbitCloud) else np.atleast_2d(b)
    if len(pa) == 0:
        return 0.0
    if len(pb) == 0:
        return float("inf")
    return float(min_dist(pa, pb, space).max())


def hausdorff(a, b, space: Space) -> float:
    return max(directed_hausdorff(a, b, space), directed_hausdorff(b, a, space))
