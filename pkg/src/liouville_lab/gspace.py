"""Spaces the matrix groups act on: V, P(V) and P(sl(V)).

Points are numpy vectors.  Projective points are stored as unit vectors
whose largest-magnitude coordinate is positive (lowest index wins ties),
so two representatives of the same line compare equal coordinate-wise.
Most functions accept a single point ``(dim,)`` or a batch ``(m, dim)``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidInputError, ZeroVectorError
from .linalg import as_matrix, invert

VECTOR = "vector"
PROJECTIVE = "projective"
ADJOINT = "adjoint_projective"
_KIND_ALIASES = {
    "vector": VECTOR,
    "projective": PROJECTIVE,
    "adjoint": ADJOINT,
    "adjoint_projective": ADJOINT,
    "adjoint-projective": ADJOINT,
}


@dataclass(frozen=True)
class Space:
    kind: str
    d: int

    def __post_init__(self):
        kind = _KIND_ALIASES.get(self.kind)
        if kind is None:
            raise InvalidInputError(f"unknown space kind {self.kind!r}")
        object.__setattr__(self, "kind", kind)
        if int(self.d) != self.d or self.d < 1:
            raise InvalidInputError("space dimension must be a positive integer")
        if kind == ADJOINT and self.d < 2:
            raise InvalidInputError("adjoint projective space needs d >= 2")

    @property
    def ambient_dim(self) -> int:
        return self.d * self.d - 1 if self.kind == ADJOINT else self.d

    @property
    def is_projective(self) -> bool:
        return self.kind != VECTOR

    def action_matrix(self, g) -> np.ndarray:
        """The linear map on ambient coordinates induced by ``g``."""
        g = as_matrix(g)
        if g.shape[0] != self.d:
            raise InvalidInputError(f"matrix of dim {g.shape[0]} cannot act on {self}")
        if self.kind == ADJOINT:
            return adjoint_rep(g)
        if self.kind == PROJECTIVE:
            invert(g)  # raises on singular g
        return g

    def point(self, x) -> np.ndarray:
        """Validate ``x`` as a point (or batch) of this space."""
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.ambient_dim:
            raise InvalidInputError(f"point of length {x.shape[-1]} is not in {self}")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("point has non-finite coordinates")
        return projectivize(x) if self.is_projective else x

    def dist(self, p, q) -> np.ndarray:
        if self.is_projective:
            return proj_dist(p, q)
        return np.linalg.norm(np.asarray(p, dtype=float) - np.asarray(q, dtype=float), axis=-1)

    def to_json(self) -> dict:
        return {"kind": self.kind, "d": self.d}

    def __str__(self):
        return f"{self.kind}({self.d})"


def space_from_json(obj) -> Space:
    try:
        return Space(obj["kind"], int(obj["d"]))
    except (KeyError, TypeError):
        raise InvalidInputError("space JSON needs 'kind' and 'd'") from None


def canonical_sign(x: np.ndarray) -> np.ndarray:
    """Flip each vector so its largest-magnitude coordinate is positive."""
    idx = np.argmax(np.abs(x), axis=-1)
    lead = np.take_along_axis(x, idx[..., None], axis=-1)
    return np.where(lead < 0, -x, x) + 0.0


def projectivize(v) -> np.ndarray:
    """Canonical unit representative of the line through ``v``."""
    v = np.asarray(v, dtype=float)
    norm = np.linalg.norm(v, axis=-1, keepdims=True)
    if np.any(norm <= 1e-300):
        raise ZeroVectorError("cannot projectivize the zero vector")
    return canonical_sign(v / norm)


def proj_dist(p, q) -> np.ndarray:
    """Sine of the angle between the lines through ``p`` and ``q``.

    Computed as ``|p - q| |p + q| / 2`` on aligned unit representatives,
    which keeps full relative accuracy for nearby lines.
    """
    p = np.asarray(p, dtype=float)
    q = np.asarray(q, dtype=float)
    if p.shape[-1] != q.shape[-1]:
        raise InvalidInputError("proj_dist: dimension mismatch")
    p = p / np.linalg.norm(p, axis=-1, keepdims=True)
    q = q / np.linalg.norm(q, axis=-1, keepdims=True)
    sign = np.where(np.sum(p * q, axis=-1) < 0, -1.0, 1.0)[..., None]
    q = sign * q
    d = np.linalg.norm(p - q, axis=-1) * np.linalg.norm(p + q, axis=-1) / 2
    return np.minimum(d, 1.0)


# -- sl(V) coordinates ------------------------------------------------------

def _offdiag_index(d):
    return [(i, j) for i in range(d) for j in range(d) if i != j]


def sl_flatten(x, tol: float = 1e-9) -> np.ndarray:
    """Coordinates of a trace-zero matrix in the basis
    ``{e_ij : i != j}`` (row-major) followed by ``e_ii - e_{i+1,i+1}``."""
    x = as_matrix(x)
    d = x.shape[0]
    if abs(np.trace(x)) > tol * max(1.0, float(np.linalg.norm(x))):
        raise InvalidInputError("sl_flatten: matrix has nonzero trace")
    off = [x[i, j] for i, j in _offdiag_index(d)]
    diag = np.cumsum(np.diag(x))[:-1]
    return np.concatenate([np.asarray(off, dtype=x.dtype), diag])


def sl_unflatten(v, d: int | None = None) -> np.ndarray:
    v = np.asarray(v)
    if d is None:
        d = int(round(np.sqrt(v.shape[-1] + 1)))
    if v.shape != (d * d - 1,):
        raise InvalidInputError(f"sl_unflatten: expected {d * d - 1} coordinates")
    x = np.zeros((d, d), dtype=v.dtype)
    for k, (i, j) in enumerate(_offdiag_index(d)):
        x[i, j] = v[k]
    c = np.concatenate([[0], v[d * (d - 1):], [0]])
    x[np.arange(d), np.arange(d)] = c[1:] - c[:-1]
    return x


def sl_basis(d: int) -> list[np.ndarray]:
    eye = np.eye(d * d - 1)
    return [sl_unflatten(eye[k], d) for k in range(d * d - 1)]


def adjoint_rep(g) -> np.ndarray:
    """Matrix of ``x -> g x g^{-1}`` on flattened sl(V) coordinates."""
    g = as_matrix(g)
    ginv = invert(g)
    d = g.shape[0]
    cols = [sl_flatten(g @ b @ ginv, tol=1e-6) for b in sl_basis(d)]
    return np.column_stack(cols)


def act(g, x, space: Space) -> np.ndarray:
    """Image of the point (or batch of points) ``x`` under ``g``."""
    a = space.action_matrix(g)
    y = np.asarray(x, dtype=float) @ a.T
    return projectivize(y) if space.is_projective else y


def angle_to_point(theta) -> np.ndarray:
    """Point of P^1 for the line at angle ``theta`` (mod pi)."""
    theta = np.asarray(theta, dtype=float)
    return projectivize(np.stack([np.cos(theta), np.sin(theta)], axis=-1))


def point_to_angle(p) -> np.ndarray:
    """Angle in [0, pi) of a line in P^1."""
    p = np.asarray(p, dtype=float)
    theta = np.mod(np.arctan2(p[..., 1], p[..., 0]), np.pi)
    return np.where(theta >= np.pi, 0.0, theta)
