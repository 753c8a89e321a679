"""Finitely supported probability measures on GL(d, R)."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import rng as rng_mod
from .errors import InvalidInputError
from .linalg import as_matrix, invert, matrix_from_json, operator_norm

WEIGHT_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """Weighted atoms ``g_i`` with weights ``w_i > 0`` summing to one.

    The semigroup S_mu is explored through words in the atoms, the group
    G_mu through words in the atoms and their inverses.
    """

    atoms: np.ndarray
    weights: np.ndarray

    def __post_init__(self):
        atoms = np.asarray(self.atoms, dtype=float)
        if atoms.ndim == 2:
            atoms = atoms[None]
        if atoms.ndim != 3 or atoms.shape[0] < 1:
            raise InvalidInputError("measure needs at least one square atom")
        atoms = np.stack([as_matrix(a, f"atom {i}") for i, a in enumerate(atoms)])
        weights = np.asarray(self.weights, dtype=float).reshape(-1)
        if weights.shape[0] != atoms.shape[0]:
            raise InvalidInputError("measure: one weight per atom required")
        if not np.all(np.isfinite(weights)) or np.any(weights <= 0):
            raise InvalidInputError("measure: weights must be positive")
        if abs(weights.sum() - 1.0) > WEIGHT_TOL:
            raise InvalidInputError(f"measure: weights sum to {weights.sum()!r}, not 1")
        for a in atoms:
            invert(a)
        atoms.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def normalized(cls, atoms, weights=None) -> "FiniteMeasure":
        """Build from unnormalized positive weights (uniform when omitted)."""
        atoms = np.asarray(atoms, dtype=float)
        if atoms.ndim == 2:
            atoms = atoms[None]
        if weights is None:
            weights = np.ones(len(atoms))
        weights = np.asarray(weights, dtype=float)
        if np.any(weights <= 0):
            raise InvalidInputError("measure: weights must be positive")
        weights = weights / weights.sum()
        # absorb the rounding of the division into the largest weight
        weights[np.argmax(weights)] += 1.0 - weights.sum()
        return cls(atoms, weights)

    @property
    def dim(self) -> int:
        return self.atoms.shape[1]

    def __len__(self):
        return self.atoms.shape[0]

    def index_from_uniform(self, u) -> np.ndarray:
        """Map uniform draws in [0, 1) to atom indices."""
        cum = np.cumsum(self.weights)
        cum[-1] = 1.0
        return np.minimum(np.searchsorted(cum, u, side="right"), len(self) - 1)

    def to_json(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [{"weight": float(w), "rows": a.tolist()} for a, w in zip(self.atoms, self.weights)],
        }


def sample(mu: FiniteMeasure, stream: np.random.Generator) -> np.ndarray:
    """Draw one atom; advances ``stream``."""
    return mu.atoms[int(mu.index_from_uniform(stream.random()))]


def dirac(g) -> FiniteMeasure:
    return FiniteMeasure(np.asarray(g, dtype=float)[None], np.ones(1))


def adjoint(mu: FiniteMeasure) -> FiniteMeasure:
    """The pushforward of ``mu`` under ``g -> g^{-1}``."""
    return FiniteMeasure(np.stack([invert(a) for a in mu.atoms]), mu.weights.copy())


def support_norm_bound(mu: FiniteMeasure, n: int) -> float:
    """``a^n`` with ``a`` the largest atom norm: bounds ||g|| on the support of mu^n."""
    if n < 1:
        raise InvalidInputError("support_norm_bound: n must be >= 1")
    a = max(operator_norm(g) for g in mu.atoms)
    return a**n


def rotation(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


# -- parametric families ----------------------------------------------------

def family_contracting(d: int, a: float, k: int, seed: int) -> FiniteMeasure:
    """``k`` random invertible atoms, atom ``i`` rescaled to norm ``a * u_i``
    with ``u_i`` uniform on (0.5, 1]; uniform weights."""
    if not 0 < a < 1:
        raise InvalidInputError("family_contracting: need 0 < a < 1")
    if k < 1 or d < 1:
        raise InvalidInputError("family_contracting: need k >= 1 and d >= 1")
    gen = rng_mod.generator(seed)
    atoms = []
    while len(atoms) < k:
        g = gen.standard_normal((d, d))
        sv = np.linalg.svd(g, compute_uv=False)
        if sv[-1] < 1e-3 * sv[0]:
            continue
        u = 1.0 - 0.5 * gen.random()  # (0.5, 1]
        atoms.append(g * (a * u / sv[0]))
    return FiniteMeasure.normalized(np.stack(atoms))


def family_axb(ts, as_, weights=None) -> FiniteMeasure:
    """Atoms ``[[t^2, a], [0, t]]`` with ``0 < t < 1/5`` and ``|a| < 1/5``."""
    ts = np.asarray(ts, dtype=float).reshape(-1)
    as_ = np.asarray(as_, dtype=float).reshape(-1)
    if ts.shape != as_.shape or ts.size == 0:
        raise InvalidInputError("family_axb: ts and as_ must be non-empty and of equal length")
    if np.any(ts <= 0) or np.any(ts >= 0.2) or np.any(np.abs(as_) >= 0.2):
        raise InvalidInputError("family_axb: need 0 < t < 1/5 and |a| < 1/5")
    atoms = np.array([[[t * t, a], [0.0, t]] for t, a in zip(ts, as_)])
    return FiniteMeasure.normalized(atoms, weights)


def example71_matrix(t: float, s: float) -> np.ndarray:
    return np.diag([1.0, 1.0, math.exp(t - s), math.exp(s - t)])


def family_example71(params, weights=None) -> FiniteMeasure:
    """Diagonal atoms ``diag(1, 1, e^{t-s}, e^{s-t})`` for each ``(t, s)``."""
    params = np.asarray(params, dtype=float).reshape(-1, 2)
    if not np.all(np.isfinite(params)):
        raise InvalidInputError("family_example71: parameters must be finite")
    return FiniteMeasure.normalized(np.stack([example71_matrix(t, s) for t, s in params]), weights)


def measure_from_json(obj) -> FiniteMeasure:
    """Explicit atoms or a named family."""
    if not isinstance(obj, dict):
        raise InvalidInputError("measure JSON must be a JSON object")
    family = obj.get("family")
    if family is None:
        try:
            atoms = obj["atoms"]
            mats = [matrix_from_json({"rows": at["rows"]}) for at in atoms]
            weights = [float(at.get("weight", 1.0)) for at in atoms]
        except (KeyError, TypeError):
            raise InvalidInputError("measure JSON needs 'atoms' with 'rows' (and 'weight')") from None
        mu = FiniteMeasure(np.stack(mats), weights) if all("weight" in at for at in atoms) else FiniteMeasure.normalized(np.stack(mats), weights)
        if "dim" in obj and obj["dim"] != mu.dim:
            raise InvalidInputError("measure JSON: 'dim' does not match atoms")
        return mu
    try:
        if family == "contracting":
            return family_contracting(int(obj["d"]), float(obj["a"]), int(obj["k"]), int(obj.get("seed", 0)))
        if family == "axb":
            return family_axb(obj["ts"], obj["as"], obj.get("weights"))
        if family == "example71":
            return family_example71(obj["params"], obj.get("weights"))
        if family == "dirac":
            return dirac(matrix_from_json(obj))
    except KeyError as exc:
        raise InvalidInputError(f"measure family {family!r} is missing field {exc}") from None
    raise InvalidInputError(f"unknown measure family {family!r}")
