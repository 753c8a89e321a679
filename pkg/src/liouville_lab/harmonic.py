"""The Markov operator ``Pf(x) = sum_i w_i f(g_i x)`` and harmonic functions.

On the projective line the operator is applied exactly on an angle grid
(lines at ``theta_j = j pi / n_bins``, linear interpolation between bins);
on every other space harmonic functions are estimated by Monte Carlo along
the walks of :mod:`liouville_lab.walk`.
"""
from __future__ import annotations

import csv
import enum
import json
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse

from .cloud import OrbitCloud, epsilon_net
from .errors import InvalidInputError
from .gspace import PROJECTIVE, Space, act, angle_to_point, point_to_angle
from .linalg import invert
from .measure import FiniteMeasure
from .walk import WalkConfig, simulate

_SNAP = 1e-9


def gaussian_bump(center, width: float, space: Space):
    """``x -> exp(-dist(x, center)^2 / (2 width^2))`` on ``(..., dim)`` arrays."""
    c = space.point(center)

    def f(x):
        return np.exp(-space.dist(x, c) ** 2 / (2 * width * width))

    f.center = c
    f.width = width
    return f


@dataclass(frozen=True, eq=False)
class GridFunction:
    """Values at the lines ``theta_j = j pi / n_bins`` of P^1."""

    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).reshape(-1)
        if v.size < 8:
            raise InvalidInputError("GridFunction needs at least 8 bins")
        if not np.all(np.isfinite(v)):
            raise InvalidInputError("GridFunction values must be finite")
        object.__setattr__(self, "values", v)

    @property
    def n_bins(self) -> int:
        return self.values.size

    @property
    def theta(self) -> np.ndarray:
        return np.arange(self.n_bins) * np.pi / self.n_bins

    @classmethod
    def from_function(cls, f, n_bins: int) -> "GridFunction":
        """Sample ``f`` (a function of P^1 points) at the grid lines."""
        theta = np.arange(n_bins) * np.pi / n_bins
        return cls(np.asarray(f(angle_to_point(theta)), dtype=float))

    def at_angle(self, theta) -> np.ndarray:
        j0, j1, frac = _interp_weights(np.asarray(theta, dtype=float), self.n_bins)
        return (1 - frac) * self.values[j0] + frac * self.values[j1]

    def __call__(self, points) -> np.ndarray:
        return self.at_angle(point_to_angle(points))

    def max_jump(self) -> float:
        """Largest difference between neighbouring bins (wrapping at pi)."""
        return float(np.max(np.abs(np.diff(np.append(self.values, self.values[0])))))

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["theta", "value"])
            for t, v in zip(self.theta, self.values):
                w.writerow([repr(float(t)), repr(float(v))])


def _interp_weights(theta, n_bins):
    pos = np.mod(theta, np.pi) * (n_bins / np.pi)
    near = np.round(pos)
    pos = np.where(np.abs(pos - near) < _SNAP, near, pos)
    j0 = np.floor(pos).astype(int) % n_bins
    frac = pos - np.floor(pos)
    return j0, (j0 + 1) % n_bins, frac


def _image_angles(g, theta):
    v = np.stack([np.cos(theta), np.sin(theta)], axis=-1) @ np.asarray(g).T
    return np.mod(np.arctan2(v[:, 1], v[:, 0]), np.pi)


def grid_operator(mu: FiniteMeasure, n_bins: int) -> scipy.sparse.csr_matrix:
    """Row-stochastic sparse matrix of P on the angle grid."""
    if mu.dim != 2:
        raise InvalidInputError("grid operator needs a measure on 2x2 matrices")
    theta = np.arange(n_bins) * np.pi / n_bins
    rows, cols, vals = [], [], []
    for g, w in zip(mu.atoms, mu.weights):
        j0, j1, frac = _interp_weights(_image_angles(g, theta), n_bins)
        rows += [np.arange(n_bins)] * 2
        cols += [j0, j1]
        vals += [w * (1 - frac), w * frac]
    p = scipy.sparse.coo_matrix(
        (np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))), shape=(n_bins, n_bins)
    )
    return p.tocsr()


def grid_apply(mu: FiniteMeasure, f: GridFunction) -> GridFunction:
    return GridFunction(grid_operator(mu, f.n_bins) @ f.values)


def grid_residual(mu: FiniteMeasure, f: GridFunction, op=None) -> float:
    """``sup |Pf - f|`` on the grid."""
    op = grid_operator(mu, f.n_bins) if op is None else op
    return float(np.max(np.abs(op @ f.values - f.values)))


def cesaro(mu: FiniteMeasure, f: GridFunction, n_terms: int, op=None):
    """``A_n = (1/n) sum_{i=1..n} P^i f`` and the gap ``sup |A_n - A_{n//2}|``."""
    if n_terms < 2:
        raise InvalidInputError("cesaro: need at least 2 terms")
    op = grid_operator(mu, f.n_bins) if op is None else op
    half = n_terms // 2
    g = f.values
    total = np.zeros_like(g)
    total_half = None
    for i in range(1, n_terms + 1):
        g = op @ g
        total += g
        if i == half:
            total_half = total.copy()
    a_n = total / n_terms
    gap = float(np.max(np.abs(a_n - total_half / half)))
    return GridFunction(a_n), gap


# -- Monte Carlo ------------------------------------------------------------

def _path_values(mu, space, fs, x, cfg, mode, workers=1):
    """Per-path statistics, shape ``(len(fs), n_paths)``."""
    paths = simulate(mu, space, x, cfg, workers=workers)
    out = []
    for f in fs:
        if mode == "terminal":
            out.append(np.asarray(f(paths.points[:, -1]), dtype=float))
        elif mode == "cesaro":
            out.append(np.nanmean(np.asarray(f(paths.points), dtype=float), axis=1))
        else:
            raise InvalidInputError(f"unknown mode {mode!r}")
    return np.array(out)


@dataclass(eq=False)
class HarmonicEstimate:
    probes: np.ndarray
    values: np.ndarray
    residual_sup: float
    method: str
    cfg: dict
    stderr: np.ndarray | None = None
    residuals: np.ndarray | None = None
    residual_stderr: np.ndarray | None = None

    def to_json(self) -> str:
        def arr(a):
            return None if a is None else np.asarray(a).tolist()

        return json.dumps(
            {
                "probes": arr(self.probes),
                "values": arr(self.values),
                "residual_sup": self.residual_sup,
                "method": self.method,
                "cfg": self.cfg,
                "stderr": arr(self.stderr),
                "residuals": arr(self.residuals),
            }
        )


def _nearest_interp(space, probes, values, y):
    if space.kind == PROJECTIVE and space.d == 2:
        order = np.argsort(point_to_angle(probes))
        ang = point_to_angle(probes)[order]
        val = values[order]
        return np.interp(point_to_angle(y), ang, val, period=np.pi)
    idx = np.argmin(space.dist(np.atleast_2d(y)[:, None, :], probes[None, :, :]), axis=1)
    return values[idx]


def mc_harmonic(mu, space: Space, f, probes, cfg: WalkConfig, mode: str = "terminal", residual: str = "simulate", workers: int = 1):
    """Monte Carlo harmonic candidate ``h`` built from ``f`` at ``probes``.

    ``terminal``: ``h(x) = E f(X_N x)``; ``cesaro``: ``h(x) = E (1/N) sum_n f(X_n x)``.
    The residual ``|sum_i w_i h(g_i x) - h(x)|`` evaluates ``h(g_i x)`` either by
    running the same estimator from ``g_i x`` with common random numbers
    (``residual="simulate"``) or by interpolating the probe values
    (``residual="interpolate"``: nearest probe, angle interpolation on P^1).
    ``f`` may be one function or a list; a list returns a list of estimates.
    """
    single = callable(f)
    fs = [f] if single else list(f)
    probes = space.point(np.atleast_2d(probes))
    base = np.stack([_path_values(mu, space, fs, x, cfg, mode, workers) for x in probes], axis=1)  # (F, P, M)
    m = base.shape[-1]
    values = base.mean(axis=-1)
    stderr = base.std(axis=-1, ddof=1) / np.sqrt(m) if m > 1 else np.zeros_like(values)

    if residual == "simulate":
        ph = np.zeros_like(base)
        for g, w in zip(mu.atoms, mu.weights):
            imgs = act(g, probes, space)
            ph += w * np.stack([_path_values(mu, space, fs, y, cfg, mode, workers) for y in imgs], axis=1)
        diff = ph - base
        res = np.abs(diff.mean(axis=-1))
        res_se = diff.std(axis=-1, ddof=1) / np.sqrt(m) if m > 1 else np.zeros_like(res)
    elif residual == "interpolate":
        res = np.zeros_like(values)
        for g, w in zip(mu.atoms, mu.weights):
            imgs = act(g, probes, space)
            res += w * np.stack([_nearest_interp(space, probes, v, imgs) for v in values])
        res = np.abs(res - values)
        res_se = None
    else:
        raise InvalidInputError(f"unknown residual method {residual!r}")

    out = [
        HarmonicEstimate(
            probes=probes,
            values=values[i],
            residual_sup=float(res[i].max()),
            method="monte_carlo",
            cfg={**cfg.to_json(), "mode": mode, "residual": residual},
            stderr=stderr[i],
            residuals=res[i],
            residual_stderr=None if res_se is None else res_se[i],
        )
        for i in range(len(fs))
    ]
    return out[0] if single else out


def cesaro_empirical_measure(mu, space: Space, x, cfg: WalkConfig, eps: float = 0.01, workers: int = 1) -> OrbitCloud:
    """Weighted eps-net of every recorded ``X_n x`` over all paths and times.

    Stands in for the Cesaro limit ``(1/n) sum_k mu^k * delta_x``.
    """
    paths = simulate(mu, space, x, cfg, workers=workers)
    pts = paths.points.reshape(-1, paths.points.shape[-1])
    pts = pts[np.all(np.isfinite(pts), axis=1)]
    centers, weights = epsilon_net(pts, eps, space, weights=np.full(len(pts), 1.0 / len(pts)))
    weights = weights / weights.sum()
    return OrbitCloud(space, centers, eps, weights=weights, info={"n_samples": len(pts)})


# -- verdicts ---------------------------------------------------------------

class VerdictKind(str, enum.Enum):
    LIOUVILLE_CONSISTENT = "liouville_consistent"
    COUNTEREXAMPLE_CANDIDATE = "counterexample_candidate"
    INCONCLUSIVE = "inconclusive"


@dataclass(eq=False)
class Verdict:
    kind: VerdictKind
    method: str
    witness: dict | None = None
    annotation: str = ""
    details: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "method": self.method,
            "witness": self.witness,
            "annotation": self.annotation,
            "details": self.details,
        }


def _invariance_mats(mu):
    return [(f"g{i}", g) for i, g in enumerate(mu.atoms)] + [(f"g{i}^-1", invert(g)) for i, g in enumerate(mu.atoms)]


def liouville_verdict(
    mu: FiniteMeasure,
    space: Space,
    test_functions,
    probes,
    tol_harmonic: float | None = None,
    tol_invariance: float = 1e-2,
    method: str = "auto",
    n_bins: int = 720,
    n_terms: int = 2000,
    cfg: WalkConfig | None = None,
    mode: str = "terminal",
    jump_fraction: float = 0.25,
    workers: int = 1,
) -> Verdict:
    """Check that harmonic candidates built from the test functions are
    G_mu-invariant at the probes.

    Grid method (P^1): the candidate is the Cesaro average of the grid
    operator; harmonic when ``sup |PF - F| <= tol_harmonic`` (default 1e-3).
    A candidate whose neighbouring bins jump by more than
    ``jump_fraction`` of the test function's oscillation is reported as
    discontinuous and makes the verdict inconclusive.  Monte Carlo: the
    candidate is :func:`mc_harmonic`; harmonic when the residual is within
    three standard errors (or ``tol_harmonic`` when given).
    """
    fs = list(test_functions)
    if len(fs) < 3:
        raise InvalidInputError("liouville_verdict needs at least 3 test functions")
    probes = space.point(np.atleast_2d(probes))
    if method == "auto":
        method = "grid" if (space.kind == PROJECTIVE and space.d == 2) else "monte_carlo"
    mats = _invariance_mats(mu)
    details = []
    discontinuous = []

    if method == "grid":
        tol_h = 1e-3 if tol_harmonic is None else tol_harmonic
        op = grid_operator(mu, n_bins)
        for k, f in enumerate(fs):
            gf = GridFunction.from_function(f, n_bins)
            cand, gap = cesaro(mu, gf, n_terms, op=op)
            res = grid_residual(mu, cand, op=op)
            worst, where = 0.0, None
            base = cand(probes)
            for name, g in mats:
                diff = np.abs(cand(act(g, probes, space)) - base)
                i = int(np.argmax(diff))
                if diff[i] > worst:
                    worst, where = float(diff[i]), (name, i)
            osc = float(gf.values.max() - gf.values.min())
            jump = cand.max_jump()
            details.append(
                {
                    "function": k,
                    "residual": res,
                    "convergence_gap": gap,
                    "harmonic": res <= tol_h,
                    "max_jump": jump,
                    "continuous": jump <= jump_fraction * osc + 1e-12,
                    "invariance": worst,
                    "invariant": worst <= tol_invariance,
                    "witness": where,
                }
            )
    elif method == "monte_carlo":
        cfg = WalkConfig() if cfg is None else cfg
        est = mc_harmonic(mu, space, fs, probes, cfg, mode=mode, residual="simulate", workers=workers)
        inv_pts = {name: act(g, probes, space) for name, g in mats}
        inv_vals = {
            name: np.stack([_path_values(mu, space, fs, y, cfg, mode, workers).mean(axis=-1) for y in pts], axis=1)
            for name, pts in inv_pts.items()
        }
        for k, e in enumerate(est):
            tol_h = (
                tol_harmonic
                if tol_harmonic is not None
                else np.maximum(3 * e.residual_stderr, 1e-6)
            )
            harmonic = bool(np.all(e.residuals <= tol_h))
            worst, where = 0.0, None
            for name in inv_vals:
                diff = np.abs(inv_vals[name][k] - e.values)
                i = int(np.argmax(diff))
                if diff[i] > worst:
                    worst, where = float(diff[i]), (name, i)
            details.append(
                {
                    "function": k,
                    "residual": e.residual_sup,
                    "harmonic": harmonic,
                    "continuous": True,
                    "invariance": worst,
                    "invariant": worst <= tol_invariance,
                    "witness": where,
                }
            )
    else:
        raise InvalidInputError(f"unknown method {method!r}")

    for d in details:
        d["harmonic"] = bool(d["harmonic"])
        d["continuous"] = bool(d["continuous"])
        d["invariant"] = bool(d["invariant"])
        if d["witness"] is not None:
            d["witness"] = {"map": d["witness"][0], "probe": int(d["witness"][1])}
    harmonic = [d for d in details if d["harmonic"]]
    if not harmonic:
        return Verdict(VerdictKind.INCONCLUSIVE, method, annotation="no candidate reached the harmonicity tolerance", details=details)
    discontinuous = [d for d in harmonic if not d["continuous"]]
    if discontinuous:
        return Verdict(
            VerdictKind.INCONCLUSIVE,
            method,
            witness={"function": discontinuous[0]["function"]},
            annotation=(
                "harmonic candidate is discontinuous at grid resolution "
                f"(max jump {discontinuous[0]['max_jump']:.3g}); the Liouville property "
                "only constrains continuous harmonic functions"
            ),
            details=details,
        )
    broken = [d for d in harmonic if not d["invariant"]]
    if broken:
        d = broken[0]
        return Verdict(
            VerdictKind.COUNTEREXAMPLE_CANDIDATE,
            method,
            witness={"function": d["function"], **(d["witness"] or {}), "invariance": d["invariance"]},
            details=details,
        )
    return Verdict(VerdictKind.LIOUVILLE_CONSISTENT, method, details=details)

