"""Command-line driver.

Exit codes: 0 pass, 1 failed check or runtime error, 2 inconclusive,
64 usage error (including an unknown scenario), 65 malformed JSON input.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from .errors import LiouvilleLabError
from .gspace import PROJECTIVE, Space, angle_to_point, space_from_json
from .harmonic import GridFunction, cesaro, gaussian_bump, grid_operator, grid_residual, mc_harmonic
from .invariant import orbit_closure
from .measure import measure_from_json
from .scenarios import INCONCLUSIVE, PASS, SCENARIOS, run_scenario
from .walk import WalkConfig, estimate_limit_set, simulate

EXIT_OK, EXIT_FAIL, EXIT_INCONCLUSIVE, EXIT_USAGE, EXIT_DATA = 0, 1, 2, 64, 65
SEED_ENV = "LIOUVILLE_LAB_SEED"


class UsageError(Exception):
    pass


class DataError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad usage, which would read as "inconclusive"
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _load_json(text: str, source: str):
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise DataError(f"{source}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from None


def _json_arg(value: str, what: str):
    """A JSON file path, or inline JSON."""
    p = Path(value)
    if p.is_file():
        return _load_json(p.read_text(), str(p))
    return _load_json(value, f"<{what}>")


def _space_arg(value: str) -> Space:
    # shorthand "projective:2", or a JSON object / file
    if ":" in value and not value.lstrip().startswith("{") and not Path(value).is_file():
        kind, _, d = value.partition(":")
        try:
            return Space(kind, int(d))
        except ValueError as exc:
            raise UsageError(f"bad space {value!r}: {exc}") from None
    return space_from_json(_json_arg(value, "space"))


def _default_seed():
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return None
    try:
        return int(raw, 0)
    except ValueError:
        raise UsageError(f"{SEED_ENV}={raw!r} is not an integer") from None


def _param(value: str):
    key, sep, raw = value.partition("=")
    if not sep:
        raise argparse.ArgumentTypeError(f"expected KEY=VALUE, got {value!r}")
    try:
        return key.replace("-", "_"), json.loads(raw)
    except json.JSONDecodeError:
        return key.replace("-", "_"), raw


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=lambda s: int(s, 0), help=f"base seed (default: ${SEED_ENV}, else built-in)")
    common.add_argument("--paths", type=int, help="number of Monte Carlo paths")
    common.add_argument("--horizon", type=int, help="walk length")
    common.add_argument("--grid-bins", type=int, help="bins of the P^1 grid")
    common.add_argument("--eps", type=float, help="net resolution")
    common.add_argument("--tol", type=float, help="check tolerance")
    common.add_argument("--out", type=Path, help="directory for JSON and CSV artifacts")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--threads", type=int, default=1, help="worker threads")

    parser = _Parser(prog="liouville-lab", description="Random walks, harmonic functions and invariant sets of matrix groups.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sc = sub.add_parser("scenario", parents=[common], help=f"run a canned scenario ({', '.join(SCENARIOS)})")
    sc.add_argument("name")
    sc.add_argument("--d", type=int)
    sc.add_argument("--a", type=float)
    sc.add_argument("--k", type=int)
    sc.add_argument("--measure", help="P^1 measure name for projline")
    sc.add_argument("--group", help="unipotent group name")
    sc.add_argument("--param", type=_param, action="append", default=[], metavar="KEY=VALUE", help="any other scenario argument")

    for name, help_ in (
        ("walk", "simulate paths from a point"),
        ("harmonic", "harmonic candidate of a bump function"),
        ("orbit", "orbit closure of a point"),
    ):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.add_argument("--measure", required=True, help="measure JSON file (or inline JSON)")
        p.add_argument("--space", required=True, help="e.g. projective:2, vector:3, adjoint_projective:3, or JSON")
        p.add_argument("--point", help="JSON list; for harmonic on P^1 the bump center")
        if name == "harmonic":
            p.add_argument("--terms", type=int, default=2000, help="Cesaro terms (grid method)")
            p.add_argument("--width", type=float, default=0.3, help="bump width")
            p.add_argument("--probes", help="JSON list of probe points (Monte Carlo method)")
        if name == "orbit":
            p.add_argument("--max-words", type=int, default=12)
            p.add_argument("--inverses", action="store_true", help="use atoms and their inverses")
    return parser


def _seed(args, fallback=None):
    if args.seed is not None:
        return args.seed
    env = _default_seed()
    return env if env is not None else fallback


def _emit(summary: dict, args) -> None:
    if args.format == "json":
        print(json.dumps(summary))
    else:
        print(",".join(f"{k}={v}" for k, v in summary.items()))


def cmd_scenario(args) -> int:
    if args.name not in SCENARIOS:
        raise UsageError(f"unknown scenario {args.name!r}; choose from {', '.join(SCENARIOS)}")
    overrides = dict(
        seed=_seed(args),
        n_paths=args.paths,
        horizon=args.horizon,
        n_bins=args.grid_bins,
        eps=args.eps,
        tol=args.tol,
        workers=args.threads,
        d=args.d,
        a=args.a,
        k=args.k,
        measure=args.measure,
        group=args.group,
    )
    overrides.update(dict(args.param))
    report = run_scenario(args.name, **overrides)
    out = args.out
    if out is None and args.format == "csv":
        out = Path(f"liouville-lab-{args.name}")
    if out is not None:
        report.write(out, args.format)
    if args.format == "json":
        print(report.to_json(indent=2))
    else:
        print("name,value,relation,threshold,passed")
        for c in report.checks:
            print(f"{c.name},{c.value},{c.relation},{c.threshold},{c.passed}")
    status = report.status
    print(f"{report.scenario_id}: {status} ({sum(c.passed for c in report.checks)}/{len(report.checks)} checks)", file=sys.stderr)
    return EXIT_OK if status == PASS else EXIT_INCONCLUSIVE if status == INCONCLUSIVE else EXIT_FAIL


def _inputs(args):
    mu = measure_from_json(_json_arg(args.measure, "measure"))
    space = _space_arg(args.space)
    point = None if args.point is None else np.asarray(_json_arg(args.point, "point"), dtype=float)
    return mu, space, point


def _out_dir(args) -> Path:
    out = args.out if args.out is not None else Path(".")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_walk(args) -> int:
    mu, space, x0 = _inputs(args)
    if x0 is None:
        raise UsageError("walk needs --point")
    cfg = WalkConfig(horizon=args.horizon or 100, n_paths=args.paths or 100, base_seed=_seed(args, 0))
    paths = simulate(mu, space, x0, cfg, workers=args.threads)
    limit = estimate_limit_set(paths, eps=args.eps or 0.01)
    out = _out_dir(args)
    paths.to_csv(out / "paths.csv")
    limit.to_csv(out / "limit_set.csv")
    _emit(
        {
            "command": "walk",
            "space": str(space),
            "paths": len(paths),
            "horizon": cfg.horizon,
            "truncated": int(paths.truncated.sum()),
            "limit_points": len(limit),
            "csv": str(out / "paths.csv"),
        },
        args,
    )
    return EXIT_OK


def cmd_harmonic(args) -> int:
    mu, space, center = _inputs(args)
    out = _out_dir(args)
    if center is None:
        center = angle_to_point(1.0) if space.kind == PROJECTIVE and space.d == 2 else np.zeros(space.ambient_dim)
    f = gaussian_bump(center, args.width, space)
    if space.kind == PROJECTIVE and space.d == 2:
        bins = args.grid_bins or 720
        op = grid_operator(mu, bins)
        F, gap = cesaro(mu, GridFunction.from_function(f, bins), args.terms, op=op)
        res = grid_residual(mu, F, op=op)
        F.to_csv(out / "harmonic.csv")
        summary = {"command": "harmonic", "method": "grid", "bins": bins, "terms": args.terms, "residual": res, "convergence_gap": gap}
    else:
        probes = center[None] if args.probes is None else np.asarray(_json_arg(args.probes, "probes"), dtype=float)
        cfg = WalkConfig(horizon=args.horizon or 200, n_paths=args.paths or 2000, base_seed=_seed(args, 0))
        est = mc_harmonic(mu, space, f, probes, cfg, workers=args.threads)
        with open(out / "harmonic.csv", "w") as fh:
            fh.write(",".join([f"x{i}" for i in range(est.probes.shape[1])] + ["value", "stderr", "residual"]) + "\n")
            for p, v, se, r in zip(est.probes, est.values, est.stderr, est.residuals):
                fh.write(",".join(repr(float(c)) for c in [*p, v, se, r]) + "\n")
        summary = {"command": "harmonic", "method": "monte_carlo", "probes": len(probes), "residual": est.residual_sup}
    summary["csv"] = str(out / "harmonic.csv")
    _emit(summary, args)
    return EXIT_OK


def cmd_orbit(args) -> int:
    mu, space, x0 = _inputs(args)
    if x0 is None:
        raise UsageError("orbit needs --point")
    cloud = orbit_closure(mu, space, x0, max_words=args.max_words, use_inverses=args.inverses, eps=args.eps or 0.01)
    out = _out_dir(args)
    cloud.to_csv(out / "orbit.csv")
    _emit({"command": "orbit", **cloud.summary(mu.atoms), "csv": str(out / "orbit.csv")}, args)
    return EXIT_OK


COMMANDS = {"scenario": cmd_scenario, "walk": cmd_walk, "harmonic": cmd_harmonic, "orbit": cmd_orbit}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"liouville-lab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"liouville-lab: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (LiouvilleLabError, ValueError, OSError) as exc:
        print(f"liouville-lab: error: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
