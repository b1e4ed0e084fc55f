"""Command line interface: ``setcg solve | bench | list``.

Exit codes: 0 converged (or a finished bench/list), 1 configuration error,
2 line-search or subproblem failure, 3 iteration limit.
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

import numpy as np

from .bench import BenchmarkSpec, run_benchmark
from .cg import BetaRule, CGParams, SolveResult, Status, solve
from .cone import cone_from_config
from .errors import UnknownProblem
from .linesearch import LineSearchParams, WolfeVariant
from .problems import PROBLEM_NAMES, builtin_problem

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_FAILED = 2
EXIT_MAX_ITER = 3

STATUS_EXIT = {
    Status.CONVERGED: EXIT_OK,
    Status.LINE_SEARCH_FAILED: EXIT_FAILED,
    Status.SUBPROBLEM_FAILED: EXIT_FAILED,
    Status.MAX_ITERATIONS: EXIT_MAX_ITER,
}

CSV_HEADER = ("problem", "rule", "metric", "min", "mean", "max", "failures")

_FLOAT_KEYS = ("epsilon", "rho", "sigma", "alpha0", "alpha_max", "eta")
_INT_KEYS = ("max_iter", "starts", "seed")
_STR_KEYS = ("wolfe_variant", "problem", "beta", "rules", "x0", "ex4_second_vector", "cone",
             "dual_generators")


class ConfigError(ValueError):
    """Invalid command line or config file input."""


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def _real(v):
    if v is None:
        return None
    return float(format(float(v), ".17g"))


def _vec(v):
    return None if v is None else [_real(c) for c in np.asarray(v, dtype=float).ravel()]


def trace_to_dict(problem_name: str, params: CGParams, result: SolveResult) -> dict:
    """JSON-ready trace; reals are rounded through 17 significant digits."""
    records = [{
        "k": r.k, "x": _vec(r.x), "a": [int(i) for i in r.a], "u": _vec(r.u), "d": _vec(r.d),
        "beta": _real(r.beta), "alpha": _real(r.alpha), "phi": _real(r.phi),
        "F_u": _real(r.F_u), "F_d": _real(r.F_d), "restarted": bool(r.restarted),
        "zoutendijk_term": _real(r.zoutendijk_term),
    } for r in result.trace]
    return {
        "problem": problem_name,
        "rule": params.beta_rule.value,
        "params": {k: (_real(v) if isinstance(v, float) else v) for k, v in params.to_dict().items()},
        "status": result.status.value,
        "iterations": result.iterations,
        "x_final": _vec(result.x_final),
        "records": records,
    }


def _fmt(v) -> str:
    return format(float(v), ".17g")


def write_stats_csv(stats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_HEADER)
        for problem, rule, metric, lo, mean, hi, failures in stats.rows():
            w.writerow([problem, rule, metric, _fmt(lo), _fmt(mean), _fmt(hi), failures])


def read_stats_csv(path) -> list[dict]:
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for key in ("min", "mean", "max"):
            r[key] = float(r[key])
        r["failures"] = int(r["failures"])
    return rows


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

def read_config_file(path) -> dict:
    """Parse a ``key = value`` file; ``#`` starts a comment."""
    out = {}
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file: {exc}") from None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.replace("-", "_")
        if key not in _FLOAT_KEYS + _INT_KEYS + _STR_KEYS:
            raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
        out[key] = value
    return out


def _merged(args) -> dict:
    cfg = read_config_file(args.config) if getattr(args, "config", None) else {}
    for key in _FLOAT_KEYS + _INT_KEYS + _STR_KEYS:
        v = getattr(args, key, None)
        if v is not None:
            cfg[key] = v
    try:
        for key in _FLOAT_KEYS:
            if key in cfg:
                cfg[key] = float(cfg[key])
        for key in _INT_KEYS:
            if key in cfg:
                cfg[key] = int(cfg[key])
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    return cfg


def _parse_vector(text, name) -> tuple[float, ...]:
    try:
        return tuple(float(s) for s in str(text).replace(";", ",").split(",") if s.strip())
    except ValueError:
        raise ConfigError(f"{name}: expected comma-separated numbers, got {text!r}") from None


def build_params(cfg: dict, rule: str = "dy") -> CGParams:
    try:
        ls_kw = {k: cfg[k] for k in ("rho", "sigma", "alpha0", "alpha_max") if k in cfg}
        kw = {k: cfg[k] for k in ("epsilon", "eta", "max_iter") if k in cfg}
        if "wolfe_variant" in cfg:
            kw["wolfe_variant"] = WolfeVariant(cfg["wolfe_variant"])
        return CGParams(beta_rule=BetaRule(rule), linesearch=LineSearchParams(**ls_kw), **kw)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None


def _problem_options(cfg) -> dict:
    if "ex4_second_vector" in cfg:
        return {"ex4_second_vector": _parse_vector(cfg["ex4_second_vector"], "ex4_second_vector")}
    return {}


def _problem(cfg):
    name = cfg.get("problem")
    if not name:
        raise ConfigError("--problem is required")
    try:
        problem = builtin_problem(name, **_problem_options(cfg))
    except UnknownProblem as exc:
        raise ConfigError(exc.args[0]) from None
    if "cone" in cfg:
        try:
            gens = json.loads(cfg["dual_generators"]) if "dual_generators" in cfg else None
            problem = problem.with_cone(cone_from_config(cfg["cone"], gens))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"cone override: {exc}") from None
    return problem


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_solve(args) -> int:
    cfg = _merged(args)
    problem = _problem(cfg)
    if "x0" not in cfg:
        raise ConfigError("--x0 is required")
    x0 = np.array(_parse_vector(cfg["x0"], "x0"))
    if x0.shape != (problem.n,):
        raise ConfigError(f"x0 has {x0.size} entries, {problem.name} needs {problem.n}")
    rule = cfg.get("beta", "dy")
    params = build_params(cfg, rule)
    result = solve(problem, x0, params)
    u_final = np.linalg.norm(result.trace[-1].u) if result.trace else float("nan")
    print(f"status={result.status.value} iterations={result.iterations} |u|={u_final:.3e} "
          f"x={np.array2string(result.x_final, precision=6)}")
    if result.message:
        print(f"message: {result.message}")
    if args.json:
        Path(args.json).write_text(json.dumps(trace_to_dict(problem.name, params, result), indent=1))
    return STATUS_EXIT[result.status]


def cmd_bench(args) -> int:
    cfg = _merged(args)
    problem = _problem(cfg)
    rules = tuple(r.strip() for r in str(cfg.get("rules", "dy,prp,hs")).split(",") if r.strip())
    try:
        rules = tuple(BetaRule(r).value for r in rules)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    params = build_params(cfg, rules[0] if rules else "dy")
    try:
        spec = BenchmarkSpec(problem.name, rules, cfg.get("starts", 100), cfg.get("seed", 42),
                             params, _problem_options(cfg),
                             problem.cone if "cone" in cfg else None)
    except ValueError as exc:
        raise ConfigError(str(exc)) from None
    stats = run_benchmark(spec, keep_results=bool(args.json))

    print(f"{'rule':<6}{'metric':<12}{'min':>12}{'mean':>12}{'max':>12}{'failures':>10}")
    for _, rule, metric, lo, mean, hi, failures in stats.rows():
        print(f"{rule:<6}{metric:<12}{lo:>12.4g}{mean:>12.4g}{hi:>12.4g}{failures:>10}")
    if args.out:
        write_stats_csv(stats, args.out)
    if args.json:
        runs = [dict(trace_to_dict(problem.name, params.with_rule(o.rule), o.result),
                     start_index=o.start_index, x0=_vec(o.x0))
                for rule in stats.outcomes for o in stats.outcomes[rule]]
        Path(args.json).write_text(json.dumps({"problem": problem.name, "seed": spec.seed,
                                               "starts": spec.starts, "runs": runs}))
    return EXIT_OK


def cmd_list(args) -> int:
    for name in PROBLEM_NAMES:
        p = builtin_problem(name)
        box = " x ".join(f"[{lo:g}, {hi:g}]" for lo, hi in p.start_box)
        print(f"{name:<7} n={p.n} m={p.m} p={p.p} cone={p.cone.variant.value}  box={box}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------

def _add_solver_flags(sp):
    sp.add_argument("--problem", help="registered problem name (see 'list')")
    sp.add_argument("--config", help="key = value file; flags override it")
    sp.add_argument("--epsilon", type=float)
    sp.add_argument("--rho", type=float)
    sp.add_argument("--sigma", type=float)
    sp.add_argument("--alpha0", type=float)
    sp.add_argument("--alpha-max", dest="alpha_max", type=float)
    sp.add_argument("--eta", type=float, help="DY scaling factor")
    sp.add_argument("--wolfe-variant", dest="wolfe_variant", choices=[v.value for v in WolfeVariant])
    sp.add_argument("--max-iter", dest="max_iter", type=int)
    sp.add_argument("--ex4-second-vector", dest="ex4_second_vector",
                    help="override the second shift vector of ex4_*, e.g. '-1,1'")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="setcg", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    sp = sub.add_parser("solve", help="run one solve and optionally write its trace")
    _add_solver_flags(sp)
    sp.add_argument("--x0", help="comma-separated start point, e.g. '-10.4' or '0,0'")
    sp.add_argument("--beta", choices=[r.value for r in BetaRule])
    sp.add_argument("--json", help="write the trace to this path")
    sp.set_defaults(func=cmd_solve)

    bp = sub.add_parser("bench", help="multi-start benchmark with summary statistics")
    _add_solver_flags(bp)
    bp.add_argument("--rules", help="comma-separated rules (default dy,prp,hs)")
    bp.add_argument("--starts", type=int)
    bp.add_argument("--seed", type=int)
    bp.add_argument("--out", help="CSV output path")
    bp.add_argument("--json", help="per-run traces as JSON")
    bp.set_defaults(func=cmd_bench)

    lp = sub.add_parser("list", help="list registered problems")
    lp.set_defaults(func=cmd_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse usage errors
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
