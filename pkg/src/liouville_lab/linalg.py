"""Dense linear algebra for small matrices (d <= 16).

Matrices are plain 2-D numpy arrays.  The helpers here validate shape and
finiteness, and provide the handful of decompositions the rest of the
package needs: operator norms, guarded inverses, the Jordan-Chevalley
split of a matrix into commuting semisimple and nilpotent parts, and the
common fixed space of a family of matrices.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .errors import DecompositionError, InvalidInputError, SingularMatrixError

MAX_DIM = 16
SINGULAR_THRESHOLD = 1e-12


def as_matrix(m, name="matrix") -> np.ndarray:
    """Coerce ``m`` to a finite square float or complex array."""
    a = np.asarray(m)
    if a.dtype == object:
        raise InvalidInputError(f"{name}: entries must be numeric")
    if np.iscomplexobj(a):
        a = a.astype(complex)
    else:
        a = a.astype(float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InvalidInputError(f"{name}: expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name}: non-finite entries")
    return a


def elementary(d: int, i: int, j: int) -> np.ndarray:
    """The matrix unit with a single 1 at (i, j), zero-based."""
    e = np.zeros((d, d))
    e[i, j] = 1.0
    return e


def upper_unipotent_generators(d: int, scale: float = 1.0) -> list[np.ndarray]:
    """``I + scale * e_{i,i+1}``; together they generate the upper unitriangular group."""
    return [np.eye(d) + scale * elementary(d, i, i + 1) for i in range(d - 1)]


def operator_norm(m) -> float:
    """Largest singular value of ``m``."""
    a = as_matrix(m)
    return float(np.linalg.norm(a, 2))


def invert(m) -> np.ndarray:
    a = as_matrix(m)
    d = a.shape[0]
    det = np.linalg.det(a)
    # |det| <= prod(sigma_i) <= ||a||^d, so the ratio is scale free
    scale = operator_norm(a) ** d
    if scale == 0.0 or abs(det) <= SINGULAR_THRESHOLD * scale:
        raise SingularMatrixError(f"matrix is numerically singular (|det| = {abs(det):.3e})", det=abs(det))
    return np.linalg.inv(a)


def matrix_power_norm(m, k: int) -> float:
    return float(np.linalg.norm(np.linalg.matrix_power(m, k), 2))


def is_unipotent(m, tol: float = 1e-9) -> bool:
    """True iff ``(m - I)^d`` has operator norm at most ``tol``."""
    a = as_matrix(m)
    d = a.shape[0]
    return matrix_power_norm(a - np.eye(d), d) <= tol


def is_nilpotent(m, tol: float = 1e-9) -> bool:
    a = as_matrix(m)
    d = a.shape[0]
    return matrix_power_norm(a, d) <= tol * max(1.0, operator_norm(a)) ** d


def nilpotent_exp(n, tol: float = 1e-9) -> np.ndarray:
    """Exponential of a nilpotent matrix as the finite sum of n^k / k!."""
    a = as_matrix(n)
    d = a.shape[0]
    if not is_nilpotent(a, tol):
        raise InvalidInputError("nilpotent_exp: input is not nilpotent")
    out = np.eye(d, dtype=a.dtype)
    term = np.eye(d, dtype=a.dtype)
    for k in range(1, d):
        term = term @ a / k
        out = out + term
    return out


def common_fixed_space(mats, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (as rows) of the vectors fixed by every matrix in ``mats``.

    The null space of the stacked ``u - I`` blocks; singular values at or
    below ``tol`` times the largest one count as zero.
    """
    mats = [as_matrix(m) for m in mats]
    if not mats:
        raise InvalidInputError("common_fixed_space: empty list of matrices")
    d = mats[0].shape[0]
    if any(m.shape != (d, d) for m in mats):
        raise InvalidInputError("common_fixed_space: matrices differ in dimension")
    stacked = np.vstack([m - np.eye(d) for m in mats])
    if not np.any(stacked):
        return np.eye(d)
    basis = scipy.linalg.null_space(stacked, rcond=tol)
    return basis.T


@dataclass(frozen=True)
class JCDecomp:
    s: np.ndarray
    n: np.ndarray
    residual_commute: float
    residual_sum: float
    residual_nilpotent: float
    eigenvalue_clusters: tuple


def _cluster_eigenvalues(eigs: np.ndarray, cluster_tol: float) -> list[list[int]]:
    """Single-linkage clusters of eigenvalues at relative distance <= cluster_tol."""
    scale = max(1.0, float(np.max(np.abs(eigs))))
    k = len(eigs)
    parent = list(range(k))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(k):
        for j in range(i):
            if abs(eigs[i] - eigs[j]) <= cluster_tol * scale:
                parent[find(i)] = find(j)
    groups: dict[int, list[int]] = {}
    for i in range(k):
        groups.setdefault(find(i), []).append(i)
    return sorted(groups.values(), key=lambda g: g[0])


def jordan_chevalley(v, tol: float = 1e-8, cluster_tol: float = 1e-6) -> JCDecomp:
    """Split ``v = s + n`` with ``s`` diagonalizable, ``n`` nilpotent, ``sn = ns``.

    A complex Schur form is reordered so each eigenvalue cluster occupies a
    contiguous diagonal block, the off-diagonal coupling is removed with
    Sylvester solves, and ``s`` is the cluster mean times each block's
    spectral projector.  ``tol`` bounds the residuals (scaled by powers of
    ``max(1, ||v||)``); a miss raises :class:`DecompositionError`.
    """
    a = as_matrix(v).astype(complex)
    d = a.shape[0]
    if d > MAX_DIM:
        raise InvalidInputError(f"jordan_chevalley: dimension {d} exceeds {MAX_DIM}")
    eigs = np.linalg.eigvals(a)
    clusters = _cluster_eigenvalues(eigs, cluster_tol)
    centers = np.array([eigs[g].mean() for g in clusters])
    sizes = [len(g) for g in clusters]

    def nearest(z):
        return int(np.argmin(np.abs(centers - z)))

    # Reorder the Schur form one cluster at a time on the trailing block.
    q = np.eye(d, dtype=complex)
    t = a.copy()
    offset = 0
    for k, size in enumerate(sizes[:-1]):
        block = t[offset:, offset:]
        tb, zb, sdim = scipy.linalg.schur(block, output="complex", sort=lambda z, k=k: nearest(z) == k)
        if sdim != size:
            raise DecompositionError("jordan_chevalley: eigenvalue clusters are not separable")
        q[:, offset:] = q[:, offset:] @ zb
        t = q.conj().T @ a @ q
        offset += size
    t = q.conj().T @ a @ q

    # Block-diagonalize: S^{-1} T S = diag(T_11, ..., T_kk).
    m = np.eye(d, dtype=complex)
    minv = np.eye(d, dtype=complex)
    offset = 0
    for size in sizes[:-1]:
        lo, hi = offset, offset + size
        x = scipy.linalg.solve_sylvester(t[lo:hi, lo:hi], -t[hi:, hi:], -t[lo:hi, hi:])
        sk = np.eye(d, dtype=complex)
        sk[lo:hi, hi:] = x
        skinv = np.eye(d, dtype=complex)
        skinv[lo:hi, hi:] = -x
        t = skinv @ t @ sk
        t[lo:hi, hi:] = 0.0
        m = m @ sk
        minv = skinv @ minv
        offset = hi

    # n is built block by block and s = a - n: a simple eigenvalue adds
    # nothing to n, so a matrix with simple spectrum gives n = 0 exactly
    # however ill-conditioned its eigenvectors are
    nb = np.zeros_like(t)
    offset = 0
    for size in sizes:
        lo, hi = offset, offset + size
        if size > 1:
            blk = t[lo:hi, lo:hi]
            nb[lo:hi, lo:hi] = blk - np.trace(blk) / size * np.eye(size)
        offset = hi
    n = q @ m @ nb @ minv @ q.conj().T
    s = a - n

    scale = max(1.0, float(np.linalg.norm(a, 2)))
    residual_sum = float(np.linalg.norm(a - (s + n), 2))
    residual_commute = float(np.linalg.norm(s @ n - n @ s, 2))
    residual_nilpotent = float(np.linalg.norm(np.linalg.matrix_power(n, d), 2))
    if (
        not math.isfinite(residual_commute)
        or residual_sum > tol * scale
        or residual_commute > tol * scale**2
        or residual_nilpotent > tol * scale**d
    ):
        raise DecompositionError(
            "jordan_chevalley: residuals exceed tolerance "
            f"(sum={residual_sum:.2e}, commute={residual_commute:.2e}, nilpotent={residual_nilpotent:.2e})",
            residual_sum=residual_sum,
            residual_commute=residual_commute,
            residual_nilpotent=residual_nilpotent,
        )
    return JCDecomp(
        s=s,
        n=n,
        residual_commute=residual_commute,
        residual_sum=residual_sum,
        residual_nilpotent=residual_nilpotent,
        eigenvalue_clusters=tuple((complex(c), size) for c, size in zip(centers, sizes)),
    )


# -- JSON literals ----------------------------------------------------------

def matrix_from_json(obj) -> np.ndarray:
    """Parse ``{"dim": 2, "scalars": "real", "rows": [[1, 1], [0, 1]]}``.

    Complex entries are ``[re, im]`` pairs.
    """
    try:
        rows = obj["rows"]
    except (KeyError, TypeError):
        raise InvalidInputError("matrix literal needs a 'rows' field") from None
    scalars = obj.get("scalars", "real")
    if scalars == "complex":
        a = np.array([[complex(e[0], e[1]) if isinstance(e, (list, tuple)) else complex(e) for e in r] for r in rows])
    elif scalars == "real":
        a = np.array(rows, dtype=float)
    else:
        raise InvalidInputError(f"unknown scalars kind {scalars!r}")
    a = as_matrix(a)
    if "dim" in obj and obj["dim"] != a.shape[0]:
        raise InvalidInputError(f"matrix literal: dim {obj['dim']} does not match rows")
    return a


def matrix_to_json(m) -> dict:
    a = as_matrix(m)
    if np.iscomplexobj(a):
        rows = [[[float(z.real), float(z.imag)] for z in r] for r in a]
        return {"dim": a.shape[0], "scalars": "complex", "rows": rows}
    return {"dim": a.shape[0], "scalars": "real", "rows": a.tolist()}
