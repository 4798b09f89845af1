"""Command-line entry point.

Subcommands::

    icg solve --problem iq-shared-min --variant dy --seed 7
    icg bench --problems all --variants sd,fr,cd,dy,mdy --seeds 0..99
    icg profile --runs out/<stamp>/runs.csv
    icg list-problems

Exit codes: 0 success, 1 usage error, 2 runtime failure. Errors go to
stderr prefixed with ``ERROR:usage``, ``ERROR:problem`` or ``ERROR:solver``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import time
from pathlib import Path

from . import bench, cg, problems as P
from .linesearch import STRONG_ORIENTATION, WolfeMode

# settings shared by solve and bench, with their defaults
DEFAULTS = {
    "rho": 1e-3,
    "sigma": 0.1,
    "eps": 1e-6,
    "max_iter": 10000,
    "wolfe": "strong",
    "safeguard_mu": None,
    "no_restart": False,
    "out_dir": "out",
    "tag": None,
}
SOLVE_DEFAULTS = {"problem": "iq-convex-2", "variant": "sd", "seed": 0}
BENCH_DEFAULTS = {"problems": "all", "variants": "sd,fr,cd,dy,mdy", "seeds": "0..99", "parallelism": 1}

CASTS = {"rho": float, "sigma": float, "eps": float, "max_iter": int, "seed": int,
         "parallelism": int, "safeguard_mu": float,
         "no_restart": lambda s: str(s).strip().lower() in ("1", "true", "yes", "on")}


class UsageError(Exception):
    pass


class ProblemError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _add_solver_flags(p):
    p.add_argument("--rho", type=float, default=None, help="sufficient-decrease coefficient (default 0.001)")
    p.add_argument("--sigma", type=float, default=None, help="curvature coefficient (default 0.1)")
    p.add_argument("--eps", type=float, default=None, help="criticality tolerance (default 1e-6)")
    p.add_argument("--max-iter", dest="max_iter", type=int, default=None)
    p.add_argument("--wolfe", choices=["strong", "standard"], default=None)
    p.add_argument("--safeguard-mu", dest="safeguard_mu", type=float, default=None,
                   help="clamp beta to keep sufficient descent with constant 1-mu")
    p.add_argument("--no-restart", dest="no_restart", action="store_true", default=None,
                   help="fail instead of restarting on non-descent directions")
    p.add_argument("--out-dir", dest="out_dir", default=None)
    p.add_argument("--tag", default=None, help="output subdirectory name instead of a timestamp")
    p.add_argument("--config-file", dest="config_file", default=None,
                   help="key=value file; command-line flags take precedence")
    p.add_argument("--print-config", dest="print_config", action="store_true",
                   help="print the resolved configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="icg", description="Interval multiobjective conjugate gradient solver")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("solve", help="solve one problem from one random start")
    s.add_argument("--problem", default=None)
    s.add_argument("--variant", default=None, help="sd, fr, cd, dy or mdy")
    s.add_argument("--seed", type=int, default=None, help="start seed (env ICG_SEED overrides the default)")
    _add_solver_flags(s)

    b = sub.add_parser("bench", help="run a problem x variant x seed matrix")
    b.add_argument("--problems", default=None, help="comma list or 'all'")
    b.add_argument("--variants", default=None, help="comma list of sd,fr,cd,dy,mdy")
    b.add_argument("--seeds", default=None, help="'a..b' (inclusive) or comma list")
    b.add_argument("--parallelism", type=int, default=None)
    _add_solver_flags(b)

    pr = sub.add_parser("profile", help="performance profiles from runs.csv")
    pr.add_argument("--runs", required=True, help="path to runs.csv")
    pr.add_argument("--out-dir", dest="out_dir", default=None,
                    help="where to write profile files (default: next to runs.csv)")

    sub.add_parser("list-problems", help="list registered problems")
    return parser


def read_config_file(path) -> dict:
    out = {}
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from None
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (t.strip() for t in line.split("=", 1))
        key = key.replace("-", "_")
        cast = CASTS.get(key, str)
        try:
            out[key] = cast(value)
        except ValueError:
            raise UsageError(f"{path}:{lineno}: bad value for {key}: {value!r}") from None
    return out


def resolve(args, extra_defaults: dict) -> dict:
    """Defaults, then environment, then config file, then flags."""
    conf = dict(DEFAULTS)
    conf.update(extra_defaults)
    if "seed" in conf and os.environ.get("ICG_SEED"):
        try:
            conf["seed"] = int(os.environ["ICG_SEED"])
        except ValueError:
            raise UsageError(f"ICG_SEED must be an integer, got {os.environ['ICG_SEED']!r}") from None
    if getattr(args, "config_file", None):
        file_conf = read_config_file(args.config_file)
        unknown = set(file_conf) - set(conf)
        if unknown:
            raise UsageError(f"unknown config keys: {', '.join(sorted(unknown))}")
        conf.update(file_conf)
    for key in conf:
        val = getattr(args, key, None)
        if val is not None:
            conf[key] = val
    return conf


def solver_config(conf: dict, variant: str = "sd") -> cg.SolverConfig:
    try:
        return cg.SolverConfig(
            rho=conf["rho"], sigma=conf["sigma"], eps=conf["eps"], max_iter=conf["max_iter"],
            variant=cg.variant(variant), wolfe_mode=WolfeMode(conf["wolfe"]),
            safeguard_mu=conf["safeguard_mu"], restart_on_nondescent=not conf["no_restart"],
        )
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def parse_seeds(text: str) -> list[int]:
    text = str(text).strip()
    try:
        if ".." in text:
            a, b = text.split("..", 1)
            seeds = list(range(int(a), int(b) + 1))
        else:
            seeds = [int(s) for s in text.split(",") if s.strip()]
    except ValueError:
        raise UsageError(f"bad seed range {text!r}") from None
    if not seeds:
        raise UsageError(f"empty seed range {text!r}")
    return seeds


def parse_problems(text: str) -> list[str]:
    if text.strip() == "all":
        return P.names()
    names = [s.strip() for s in text.split(",") if s.strip()]
    for n in names:
        try:
            P.lookup(n)
        except P.UnknownProblem:
            raise ProblemError(f"unknown problem {n!r}; see 'icg list-problems'") from None
    if not names:
        raise UsageError("no problems given")
    return names


def parse_variants(text: str) -> list[str]:
    names = [s.strip().lower() for s in text.split(",") if s.strip()]
    bad = [n for n in names if n not in cg.REFERENCE_VARIANTS]
    if bad or not names:
        raise UsageError(f"unknown variant(s) {bad or text!r}; choose from sd,fr,cd,dy,mdy")
    return names


def output_dir(conf: dict) -> Path:
    root = Path(conf["out_dir"])
    name = conf.get("tag") or time.strftime("%Y%m%dT%H%M%S")
    path = root / name
    k = 1
    while path.exists() and not conf.get("tag"):
        path = root / f"{name}-{k}"
        k += 1
    (path / "runs").mkdir(parents=True, exist_ok=True)
    return path


def _dump_config(conf: dict, out=None):
    text = json.dumps(conf, indent=1, sort_keys=True, default=str)
    print(text, file=out or sys.stdout)


def cmd_solve(args) -> int:
    conf = resolve(args, SOLVE_DEFAULTS)
    cfg = solver_config(conf, conf["variant"])
    try:
        spec = P.lookup(conf["problem"])
    except P.UnknownProblem:
        raise ProblemError(f"unknown problem {conf['problem']!r}; see 'icg list-problems'") from None
    if args.print_config:
        _dump_config({**conf, "strong_curvature": STRONG_ORIENTATION})
    out = output_dir(conf)
    x0 = P.sample_start(spec, conf["seed"])
    try:
        rec = cg.run(spec.mo, x0, cfg, seed=conf["seed"])
    except Exception as exc:
        raise RuntimeError(f"{type(exc).__name__}: {exc}") from exc

    print(f"problem {spec.name}  variant {cfg.variant.describe()}  seed {conf['seed']}")
    print(f"{'k':>5} {'xi':>14} {'psi(v)':>14} {'psi(d)':>14} {'beta':>10} {'t':>10}")
    for k, (xi, pv) in enumerate(zip(rec.xi_trace, rec.psi_v_trace)):
        if k < rec.iterations:
            pd, b, t = rec.psi_d_trace[k], rec.beta_trace[k], rec.step_trace[k]
            print(f"{k:5d} {xi:14.6e} {pv:14.6e} {pd:14.6e} {b:10.4g} {t:10.4g}")
        else:
            print(f"{k:5d} {xi:14.6e} {pv:14.6e}")
    print(f"status {rec.status.value} after {rec.iterations} iterations, "
          f"{rec.wall_time:.3f}s, restarts {rec.restarts}")

    stem = f"{spec.name}_{cfg.variant.name}_seed{conf['seed']}"
    (out / "runs" / f"{stem}.json").write_text(rec.dumps() + "\n", encoding="utf-8")
    (out / "runs" / f"{stem}.trace.jsonl").write_text("\n".join(rec.trace_lines()) + "\n", encoding="utf-8")
    (out / "config.json").write_text(json.dumps(conf, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    print(f"wrote {out}")
    return 0


def cmd_bench(args) -> int:
    conf = resolve(args, BENCH_DEFAULTS)
    probs = parse_problems(conf["problems"])
    variants = parse_variants(conf["variants"])
    seeds = parse_seeds(conf["seeds"])
    cfg = solver_config(conf)
    if conf["parallelism"] < 1:
        raise UsageError("parallelism must be at least 1")
    if args.print_config:
        _dump_config(conf)
    matrix = bench.BenchMatrix(probs, variants, seeds, cfg)
    out = output_dir(conf)
    records = bench.run_matrix(matrix, conf["parallelism"])
    for rec in records:
        (out / "runs" / f"{rec.problem}_{rec.variant}_seed{rec.seed}.json").write_text(
            rec.dumps() + "\n", encoding="utf-8")
    bench.write_runs_csv(records, out / "runs.csv")
    summary = bench.aggregate(records)
    bench.write_summary_csv(summary, out / "summary.csv")
    (out / "config.json").write_text(json.dumps(conf, indent=1, sort_keys=True) + "\n", encoding="utf-8")
    fails = sum(c.failures for c in summary)
    print(f"{len(records)} runs, {fails} not critical; wrote {out}")
    return 0


def cmd_profile(args) -> int:
    runs = Path(args.runs)
    if not runs.is_file():
        raise UsageError(f"no such file: {runs}")
    out = Path(args.out_dir) if args.out_dir else runs.parent
    out.mkdir(parents=True, exist_ok=True)
    summary = bench.aggregate(bench.read_runs_csv(runs))
    for metric in bench.Metric:
        prof = bench.performance_profile(summary, metric)
        for path in bench.write_profile(prof, out):
            print(f"wrote {path}")
    return 0


def cmd_list(args) -> int:
    for spec in P.registry():
        print(P.describe(spec))
    return 0


COMMANDS = {"solve": cmd_solve, "bench": cmd_bench, "profile": cmd_profile, "list-problems": cmd_list}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not args.command:
            raise UsageError("a subcommand is required: solve, bench, profile or list-problems")
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"ERROR:usage {exc}", file=sys.stderr)
        return 1
    except ProblemError as exc:
        print(f"ERROR:problem {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures from the solver stack
        print(f"ERROR:solver {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
