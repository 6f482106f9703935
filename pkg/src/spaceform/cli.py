"""Command-line front end: ``spaceform curvature|check|jacobi``.

Exit codes: 0 success (``check``: the surface is a geodesic sphere), 1 the
check ran but the surface is not a geodesic sphere, 2 malformed config or
out-of-domain parameters, 3 a hypothesis precondition failed.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
import time
from dataclasses import replace

import numpy as np

from . import __version__
from .config import ConfigError, RunConfig
from .errors import GeometryError
from .hypersurface import curvature_report
from .jacobi import (
    JacobiParams,
    jacobi_derivative_at_one,
    jacobi_oracle_normalized,
    jacobi_scalar,
    predicted_radius,
)
from .reinhardt import CharacteristicField, reinhardt_theorem_check
from .theorem import verdict

EXIT_OK, EXIT_NOT_SPHERE, EXIT_CONFIG, EXIT_PRECONDITION = 0, 1, 2, 3

log = logging.getLogger("spaceform")


class UsageError(Exception):
    """Bad input: exit 2."""


class PreconditionError(Exception):
    """A hypothesis failed before the main computation: exit 3."""


def _jsonable(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not serializable: {type(obj).__name__}")


def dumps(payload) -> str:
    """Deterministic JSON: insertion-ordered keys, shortest round-trip floats."""
    return json.dumps(payload, indent=2, allow_nan=False, default=_jsonable) + "\n"


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x) if math.isfinite(x) else ""
    return str(x)


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    for row in rows:
        writer.writerow([_fmt(x) for x in row])
    return buf.getvalue()


def _envelope(command, cfg_echo, result, started, timing):
    out = {"tool": "spaceform", "version": __version__, "command": command,
           "config": cfg_echo, "result": result}
    if timing:
        out["timing_seconds"] = time.perf_counter() - started
    return out


# -- config handling -------------------------------------------------------

def _load_config(args) -> RunConfig:
    if not args.config:
        raise UsageError("--config is required")
    cfg = RunConfig.load(args.config)
    if args.grid is not None or args.tol is not None:
        raw = cfg.to_dict()
        if args.grid is not None:
            raw["grid"] = args.grid
        if args.tol is not None:
            raw["tolerances"]["constancy"] = args.tol
            raw["tolerances"]["sphere"] = args.tol
        cfg = RunConfig.from_dict(raw)
    return cfg


def _output_format(args, cfg=None, default="json") -> str:
    if args.format:
        return args.format
    if cfg is not None:
        return cfg.output.get("format", default)
    return default


def _output_path(args, cfg=None):
    if args.out:
        return args.out
    return None if cfg is None else cfg.output.get("path")


def _emit(text: str, path):
    if path:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _build(cfg: RunConfig):
    S = cfg.hypersurface()
    X = cfg.tangent_field()
    if not S.closed:
        log.warning("surface %s is not declared closed; compactness is unchecked", S.name)
    return S, X


# -- subcommands -----------------------------------------------------------

def cmd_curvature(args) -> int:
    started = time.perf_counter()
    cfg = _load_config(args)
    S, X = _build(cfg)
    tol = cfg.tolerance_obj()
    try:
        report = curvature_report(S, X, tol.constancy)
    except GeometryError as exc:
        raise PreconditionError(f"curvature not evaluable: {exc}") from exc
    fmt = _output_format(args, cfg)
    if fmt == "csv":
        dim = report.u.shape[1]
        rows = [["chart"] + [f"u_{i}" for i in range(dim)] + ["value"]]
        rows += [[int(c)] + [float(x) for x in u] + [float(v)]
                 for c, u, v in zip(report.chart_index, report.u, report.values)]
        text = _csv(rows)
    else:
        payload = report.to_dict(include_samples=args.samples_out)
        text = dumps(_envelope("curvature", cfg.to_dict(), payload, started, args.timing))
    _emit(text, _output_path(args, cfg))
    return EXIT_OK


def cmd_check(args) -> int:
    started = time.perf_counter()
    cfg = _load_config(args)
    S, X = _build(cfg)
    tol = cfg.tolerance_obj()
    q = cfg.point(S.space, cfg.q)
    surface = cfg.reinhardt()
    try:
        if surface is not None and isinstance(X, CharacteristicField):
            v = reinhardt_theorem_check(surface, tol, resolution=cfg.grid)
        else:
            v = verdict(S, q, X, tol)
    except GeometryError as exc:
        raise PreconditionError(str(exc)) from exc
    if not S.closed:
        v = replace(v, notes=v.notes + ("surface not declared closed",))

    fmt = _output_format(args, cfg)
    if fmt == "csv":
        rows = [["item", "passed", "residual", "detail"]]
        rows += [[name, r.passed, r.residual, r.detail] for name, r in v.hypotheses.items()]
        for e in v.extrema:
            rows.append([f"extremum_{e.kind}_distance", e.converged, float(e.distance), ""])
            rows.append([f"extremum_{e.kind}_second_variation", None, e.second_variation_residual, ""])
            if e.kind == "max":
                rows.append(["lower_bound_margin", None, e.lower_bound_margin, ""])
        rows.append(["predicted_radius", None, v.predicted_radius, ""])
        rows.append(["radius_spread", None, float(v.radius_spread), ""])
        rows.append(["is_geodesic_sphere", v.is_geodesic_sphere, None, ""])
        text = _csv(rows)
    else:
        text = dumps(_envelope("check", cfg.to_dict(), v.to_dict(), started, args.timing))
    _emit(text, _output_path(args, cfg))

    if not v.hypotheses.preconditions_passed:
        for name in v.hypotheses.failed():
            r = getattr(v.hypotheses, name)
            if name in v.hypotheses.PRECONDITIONS and r.residual is not None:
                log.error("hypothesis %s failed: %s (residual %s)", name, r.detail, _fmt(r.residual))
        return EXIT_PRECONDITION
    return EXIT_OK if v.is_geodesic_sphere else EXIT_NOT_SPHERE


def _c_grid(K: float, ell: float):
    """Curvature constants for the predicted-radius footer; includes u'(1)/ell when valid."""
    base = math.sqrt(-K) if K < 0 else 0.0
    grid = [base + c for c in (0.25, 0.5, 1.0, 2.0, 4.0)]
    c_star = jacobi_derivative_at_one(JacobiParams(K, ell)) / ell
    if c_star > base:
        grid.append(c_star)
    return sorted(set(grid))


def cmd_jacobi(args) -> int:
    started = time.perf_counter()
    if args.K is None or args.ell is None:
        raise UsageError("jacobi needs --K and --ell")
    if args.samples < 2:
        raise UsageError("--samples must be at least 2")
    try:
        params = JacobiParams(args.K, args.ell)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    intervals = args.samples - 1
    per = max(1, math.ceil(args.steps / intervals))
    _, u_oracle, _ = jacobi_oracle_normalized(args.K, args.ell, steps=intervals * per)
    u_oracle = u_oracle[::per]
    ts = np.linspace(0.0, 1.0, args.samples)
    u_closed = jacobi_scalar(params, ts)
    err = np.abs(u_closed - u_oracle)
    du1 = jacobi_derivative_at_one(params)
    radii = [(C, predicted_radius(args.K, C)) for C in _c_grid(args.K, args.ell)]

    if _output_format(args, default="csv") == "json":
        payload = {
            "K": float(args.K), "ell": float(args.ell), "a": params.a,
            "t": ts, "u_closed": u_closed, "u_oracle": u_oracle, "abs_err": err,
            "max_abs_err": float(np.max(err)),
            "u_dot_1": du1,
            "predicted_radius": [{"C": C, "radius": R} for C, R in radii],
        }
        echo = {"K": float(args.K), "ell": float(args.ell), "samples": args.samples,
                "steps": args.steps}
        text = dumps(_envelope("jacobi", echo, payload, started, args.timing))
    else:
        rows = [["t", "u_closed", "u_oracle", "abs_err"]]
        rows += [[float(t), float(a), float(b), float(e)]
                 for t, a, b, e in zip(ts, u_closed, u_oracle, err)]
        rows.append(["u_dot_1", du1, "", ""])
        rows += [["predicted_radius", C, R, ""] for C, R in radii]
        text = _csv(rows)
    _emit(text, args.out)
    return EXIT_OK


# -- entry point -----------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spaceform", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"spaceform {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, with_config=True):
        if with_config:
            p.add_argument("--config", help="JSON run configuration")
            p.add_argument("--grid", type=int, help="resolution per chart dimension (>= 8)")
            p.add_argument("--tol", type=float, help="constancy and sphere tolerance")
        p.add_argument("--out", help="write the result here instead of stdout")
        p.add_argument("--format", choices=("json", "csv"))
        p.add_argument("--timing", action="store_true",
                       help="include wall-clock time (breaks byte-identical output)")

    p = sub.add_parser("curvature", help="sample C^X over a hypersurface")
    common(p)
    p.add_argument("--samples-out", action="store_true", help="include every sample in the JSON")
    p.set_defaults(func=cmd_curvature)

    p = sub.add_parser("check", help="run the geodesic-sphere verdict")
    common(p)
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("jacobi", help="tabulate the normalized Jacobi field")
    common(p, with_config=False)
    p.add_argument("--K", type=float)
    p.add_argument("--ell", type=float)
    p.add_argument("--samples", type=int, default=1001)
    p.add_argument("--steps", type=int, default=10_000, help="oracle RK4 steps (>= 100)")
    p.set_defaults(func=cmd_jacobi)
    return parser


def main(argv=None) -> int:
    if not log.handlers:
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter("spaceform: %(levelname)s: %(message)s"))
        log.addHandler(handler)
        log.propagate = False
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except (ConfigError, UsageError) as exc:
        log.error("%s", exc)
        return EXIT_CONFIG
    except PreconditionError as exc:
        log.error("precondition failed: %s", exc)
        return EXIT_PRECONDITION
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
