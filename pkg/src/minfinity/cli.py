"""Command-line experiment runner.

Subcommands: eval, contour, optimize, compare, verify.  Structured results go
to stdout as JSON; bulk numeric output goes to CSV files.  Exit codes:
0 success, 1 verification violation, 2 usage error, 3 evaluation/numerical
failure, 4 output I/O error.  MINFINITY_SEED provides the default seed.
"""
from __future__ import annotations

import argparse
import io
import json
import os
import random
import sys

from . import augment, landscape, optimize, svgplot, verify
from .augment import AugConfig, AugPoint, POLICY_ERROR, POLICY_SATURATE, SaturationError
from .fields import FieldError, field_names, get_field
from .optimize import OptimizerSpec

EXIT_OK = 0
EXIT_VIOLATION = 1
EXIT_USAGE = 2
EXIT_NUMERIC = 3
EXIT_IO = 4


class UsageError(Exception):
    pass


def _default_seed() -> int:
    raw = os.environ.get("MINFINITY_SEED", "0")
    try:
        return int(raw)
    except ValueError:
        return 0


def _dump(doc: dict) -> None:
    sys.stdout.write(json.dumps(doc, indent=2, sort_keys=True) + "\n")


def _write_text(path: str, text: str) -> None:
    try:
        os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise _IOFailure(str(exc)) from exc


class _IOFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# eval
# ---------------------------------------------------------------------------

def _cmd_eval(args) -> int:
    field = get_field(args.field)
    if len(args.theta) != field.dim:
        raise UsageError(f"field {field.name} expects {field.dim} theta values, "
                         f"got {len(args.theta)}")
    cfg = AugConfig(lam=args.lam, saturation_policy=args.policy)
    point = AugPoint(tuple(args.theta), args.a, args.b)
    result = augment.evaluate(field, point, cfg)
    grad = augment.gradient(field, point, cfg)
    _dump({
        "field": field.name,
        "theta": list(point.theta),
        "a": point.a,
        "b": point.b,
        "u": result.u,
        "L": result.base,
        "L_tilde": result.value,
        "grad": {"theta": list(grad.d_theta), "a": grad.d_a, "b": grad.d_b},
        "saturated": bool(result.saturated or grad.saturated),
        "config": {"lambda": cfg.lam, "b_clamp": cfg.b_clamp,
                   "saturation_policy": cfg.saturation_policy},
    })
    return EXIT_OK


# ---------------------------------------------------------------------------
# contour
# ---------------------------------------------------------------------------

def _cmd_contour(args) -> int:
    if args.resolution < 2:
        raise UsageError("resolution must be at least 2 per axis")
    grid = landscape.sample_contour(
        args.l_slice, args.lam,
        a_range=tuple(args.a_range), b_range=tuple(args.b_range),
        resolution=args.resolution)
    minima = landscape.stationarity_scan(grid)
    doc = grid.as_dict()
    doc["interior_minima"] = [list(c) for c in minima]
    doc["grid_min"] = grid.grid_min()
    doc["config"] = {
        "l_slice": args.l_slice, "lambda": args.lam,
        "a_range": list(args.a_range), "b_range": list(args.b_range),
        "resolution": args.resolution, "svg": bool(args.svg),
    }
    csv_lines = []
    for row in grid.values:
        csv_lines.append(",".join(repr(v) for v in row))
    _write_text(os.path.join(args.out, "contour.csv"), "\n".join(csv_lines) + "\n")
    _write_text(os.path.join(args.out, "contour.json"),
                json.dumps(doc, indent=2, sort_keys=True) + "\n")
    if args.svg:
        levels = args.levels if args.levels else None
        _write_text(os.path.join(args.out, "contour.svg"),
                    svgplot.render_svg(grid, levels))
    _dump({"written": sorted(os.listdir(args.out)), "out": args.out,
           "interior_minima_count": len(minima), "grid_min": doc["grid_min"]})
    return EXIT_OK


# ---------------------------------------------------------------------------
# optimize / compare
# ---------------------------------------------------------------------------

_OPTIMIZER_KEYS = {"kind", "step_size", "max_steps", "grad_tol",
                   "momentum", "beta1", "beta2", "eps"}
_START_KEYS = {"mode", "theta", "a", "b", "index"}
_TOP_KEYS = {"field", "lambda", "seed", "out_dir", "formats", "optimizer", "start"}


def _load_config_file(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}")
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise UsageError("config file must hold a JSON object")
    _reject_unknown(doc, _TOP_KEYS, "config")
    _reject_unknown(doc.get("optimizer", {}), _OPTIMIZER_KEYS, "config.optimizer")
    _reject_unknown(doc.get("start", {}), _START_KEYS, "config.start")
    return doc


def _reject_unknown(doc: dict, allowed: set, where: str) -> None:
    if not isinstance(doc, dict):
        raise UsageError(f"{where} must be a JSON object")
    unknown = set(doc) - allowed
    if unknown:
        raise UsageError(f"unknown {where} keys: {', '.join(sorted(unknown))}")


def _resolve_run_config(args) -> dict:
    doc = _load_config_file(args.config) if args.config else {}
    opt = dict(doc.get("optimizer", {}))
    start = dict(doc.get("start", {}))

    def override(target, key, value):
        if value is not None:
            target[key] = value

    merged = {
        "field": args.field or doc.get("field"),
        "lambda": args.lam if args.lam is not None else doc.get("lambda", 1.0),
        "seed": args.seed if args.seed is not None else doc.get("seed", _default_seed()),
        "out_dir": args.out or doc.get("out_dir", "runs/latest"),
        "formats": doc.get("formats", ["csv", "json"]),
    }
    override(opt, "kind", args.optimizer)
    override(opt, "step_size", args.step_size)
    override(opt, "max_steps", args.max_steps)
    override(opt, "grad_tol", args.grad_tol)
    override(start, "mode", args.start_mode)
    override(start, "theta", list(args.theta) if args.theta is not None else None)
    override(start, "a", args.a)
    override(start, "b", args.b)
    override(start, "index", args.bad_min_index)
    opt.setdefault("kind", "gd")
    opt.setdefault("step_size", 1e-2)
    opt.setdefault("max_steps", 100000)
    start.setdefault("mode", "explicit")
    merged["optimizer"] = opt
    merged["start"] = start
    if not merged["field"]:
        raise UsageError("a field name is required (flag --field or config key)")
    if merged["field"] not in field_names():
        raise UsageError(f"unknown field {merged['field']!r}; "
                         f"available: {', '.join(field_names())}")
    if not isinstance(merged["formats"], list) or \
            not set(merged["formats"]) <= {"csv", "json"}:
        raise UsageError("formats must be a list drawn from ['csv', 'json']")
    return merged


def _resolve_start(field, start: dict, seed: int) -> AugPoint:
    mode = start.get("mode", "explicit")
    a = float(start.get("a", 0.1 if mode == "at-bad-minimum" else 0.0))
    b = float(start.get("b", 0.0))
    if mode == "explicit":
        theta = start.get("theta")
        if theta is None:
            raise UsageError("explicit start requires theta")
        if len(theta) != field.dim:
            raise UsageError(f"start theta needs {field.dim} values, got {len(theta)}")
        return AugPoint(tuple(float(t) for t in theta), a, b)
    if mode == "seeded-random":
        rng = random.Random(seed)
        theta = field.interior_sample(rng, margin=0.0)
        return AugPoint(theta,
                        rng.uniform(*landscape.SEED_A_RANGE),
                        rng.uniform(*landscape.SEED_B_RANGE))
    if mode == "at-bad-minimum":
        index = int(start.get("index", 0))
        if not (0 <= index < len(field.bad_minima)):
            raise UsageError(f"{field.name} has {len(field.bad_minima)} registered "
                             f"bad minima; index {index} out of range")
        return AugPoint(field.bad_minima[index].point, a, b)
    raise UsageError(f"unknown start mode {mode!r}")


def _spec_from(opt: dict) -> OptimizerSpec:
    try:
        return OptimizerSpec(**opt)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad optimizer spec: {exc}")


def _cmd_optimize(args) -> int:
    config = _resolve_run_config(args)
    field = get_field(config["field"])
    spec = _spec_from(config["optimizer"])
    start = _resolve_start(field, config["start"], config["seed"])
    cfg = AugConfig(lam=config["lambda"])
    traj = optimize.run_optimizer(field, start, spec, cfg)

    out_dir = config["out_dir"]
    if "csv" in config["formats"]:
        buf = io.StringIO()
        traj.write_csv(buf)
        _write_text(os.path.join(out_dir, "trajectory.csv"), buf.getvalue())
    if "json" in config["formats"]:
        _write_text(os.path.join(out_dir, "summary.json"),
                    optimize.summary_json(traj, config))
    _dump({"outcome": traj.outcome.as_dict(), "out_dir": out_dir,
           "total_steps": traj.total_steps, "config": config})
    return EXIT_NUMERIC if traj.outcome.kind == optimize.FAILED else EXIT_OK


def _cmd_compare(args) -> int:
    config = _resolve_run_config(args)
    field = get_field(config["field"])
    spec = _spec_from(config["optimizer"])
    start = _resolve_start(field, config["start"], config["seed"])
    cfg = AugConfig(lam=config["lambda"])
    plain, augmented = optimize.compare_baseline(
        field, start.theta, spec, cfg, a_start=start.a, b_start=start.b)

    out_dir = config["out_dir"]
    for name, traj in (("plain", plain), ("augmented", augmented)):
        if "csv" in config["formats"]:
            buf = io.StringIO()
            traj.write_csv(buf)
            _write_text(os.path.join(out_dir, f"trajectory_{name}.csv"), buf.getvalue())
    doc = {
        "field": field.name,
        "config": config,
        "plain": plain.summary(),
        "augmented": augmented.summary(),
    }
    if "json" in config["formats"]:
        _write_text(os.path.join(out_dir, "compare.json"),
                    json.dumps(doc, indent=2, sort_keys=True) + "\n")
    _dump(doc)
    failed = optimize.FAILED in (plain.outcome.kind, augmented.outcome.kind)
    return EXIT_NUMERIC if failed else EXIT_OK


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _cmd_verify(args) -> int:
    kwargs = {}
    if args.suite == "critical-points" and args.seeds:
        kwargs["n_seeds"] = args.seeds
    report = verify.run_suite(args.suite, args.seed, **kwargs)
    if args.out:
        _write_text(os.path.join(args.out, "verify.json"),
                    json.dumps(report, indent=2, sort_keys=True) + "\n")
    _dump(report)
    return EXIT_OK if report["violations_total"] == 0 else EXIT_VIOLATION


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="minfinity",
        description="Evaluate, optimize and verify the augmented loss "
                    "L(theta)*(1+(a*exp(b)-1)^2) + lambda*a^2.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_eval = sub.add_parser("eval", help="one-shot evaluation with gradient")
    p_eval.add_argument("--field", required=True, choices=field_names())
    p_eval.add_argument("--theta", type=float, nargs="+", required=True)
    p_eval.add_argument("--a", type=float, default=0.0)
    p_eval.add_argument("--b", type=float, default=0.0)
    p_eval.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_eval.add_argument("--policy", choices=[POLICY_ERROR, POLICY_SATURATE],
                        default=POLICY_ERROR)
    p_eval.set_defaults(func=_cmd_eval)

    p_cont = sub.add_parser("contour", help="sample an (a, b) contour grid")
    p_cont.add_argument("--l-slice", type=float, default=1.0)
    p_cont.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p_cont.add_argument("--a-range", type=float, nargs=2, default=(-2.0, 2.0))
    p_cont.add_argument("--b-range", type=float, nargs=2, default=(-2.0, 4.0))
    p_cont.add_argument("--resolution", type=int, default=101)
    p_cont.add_argument("--out", required=True)
    p_cont.add_argument("--svg", action="store_true")
    p_cont.add_argument("--levels", type=float, nargs="*", default=None)
    p_cont.set_defaults(func=_cmd_contour)

    for name, fn, help_text in (
            ("optimize", _cmd_optimize, "run one optimizer trajectory"),
            ("compare", _cmd_compare, "paired raw-vs-augmented runs")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", help="JSON run config; flags override")
        p.add_argument("--field", choices=field_names())
        p.add_argument("--lambda", dest="lam", type=float, default=None)
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out", default=None)
        p.add_argument("--optimizer", choices=["gd", "momentum", "adam"], default=None)
        p.add_argument("--step-size", type=float, default=None)
        p.add_argument("--max-steps", type=int, default=None)
        p.add_argument("--grad-tol", type=float, default=None)
        p.add_argument("--start-mode",
                       choices=["explicit", "seeded-random", "at-bad-minimum"],
                       default=None)
        p.add_argument("--theta", type=float, nargs="+", default=None)
        p.add_argument("--a", type=float, default=None)
        p.add_argument("--b", type=float, default=None)
        p.add_argument("--bad-min-index", type=int, default=None)
        p.set_defaults(func=fn)

    p_ver = sub.add_parser("verify", help="run a property suite")
    p_ver.add_argument("--suite", choices=list(verify.SUITES), default="all")
    p_ver.add_argument("--seed", type=int, default=None)
    p_ver.add_argument("--seeds", type=int, default=None,
                       help="finder starts per field (critical-points suite)")
    p_ver.add_argument("--out", default=None)
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seed", None) is None and hasattr(args, "seed"):
        args.seed = _default_seed()
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (KeyError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (FieldError, SaturationError) as exc:
        print(f"evaluation error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except _IOFailure as exc:
        print(f"output error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
