"""Seeded multi-start benchmarks over the built-in problems.

Starts are drawn once per :class:`BenchmarkSpec` from a counter-based
Philox generator, so every rule sees the same start list on every platform.
Independent runs can be fanned out over worker processes; results are
always reduced in start order.
"""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .cg import BetaRule, CGParams, SolveResult, Status, solve, verify_trace
from .cone import OrderingCone
from .problems import PROBLEM_NAMES, builtin_problem

__all__ = ["BenchmarkSpec", "RuleStats", "RunStats", "RunOutcome", "sample_starts",
           "run_benchmark", "builtin_problem", "PROBLEM_NAMES", "worker_count"]


def sample_starts(box, count: int, seed: int) -> np.ndarray:
    """``count`` uniform points in ``box`` (``n`` rows of ``(lo, hi)``).

    Uses ``numpy.random.Philox`` keyed by ``seed``.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    box = np.asarray(box, dtype=float).reshape(-1, 2)
    rng = np.random.Generator(np.random.Philox(int(seed) & (2 ** 64 - 1)))
    u = rng.random((count, box.shape[0]))
    return box[:, 0] + u * (box[:, 1] - box[:, 0])


def worker_count() -> int:
    """Process count from ``SETCG_THREADS`` (``0`` or unset means all CPUs)."""
    raw = os.environ.get("SETCG_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError("SETCG_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


@dataclass(frozen=True)
class BenchmarkSpec:
    problem: str
    rules: tuple[str, ...] = ("dy", "prp", "hs")
    starts: int = 100
    seed: int = 42
    params: CGParams = field(default_factory=CGParams)
    problem_options: dict = field(default_factory=dict)
    #: Replaces the registered cone when given (dimension must match).
    cone: OrderingCone | None = None

    def __post_init__(self):
        if self.starts < 1:
            raise ValueError("starts must be >= 1")
        rules = tuple(BetaRule(r).value for r in self.rules)
        if not rules:
            raise ValueError("at least one rule is required")
        object.__setattr__(self, "rules", rules)
        if self.problem not in PROBLEM_NAMES:
            builtin_problem(self.problem)  # raises UnknownProblem
        if self.cone is not None:
            self.build_problem()  # validates the cone dimension

    def build_problem(self):
        problem = builtin_problem(self.problem, **self.problem_options)
        return problem if self.cone is None else problem.with_cone(self.cone)


@dataclass(frozen=True)
class RunOutcome:
    """Summary of one solve; ``result`` is kept only when requested."""

    rule: str
    start_index: int
    x0: np.ndarray
    status: str
    iterations: int
    wall_time: float
    x_final: np.ndarray
    violations: dict
    result: SolveResult | None = None


@dataclass(frozen=True)
class RuleStats:
    iterations: tuple[float, float, float]
    wall_time: tuple[float, float, float]
    failures: int
    runs: int


@dataclass(frozen=True)
class RunStats:
    problem: str
    per_rule: dict[str, RuleStats]
    outcomes: dict[str, list[RunOutcome]]

    def rows(self):
        """CSV-ready rows ``(problem, rule, metric, min, mean, max, failures)``."""
        for rule, st in self.per_rule.items():
            yield (self.problem, rule, "iterations", *st.iterations, st.failures)
            yield (self.problem, rule, "time_s", *st.wall_time, st.failures)


def _three_point(values) -> tuple[float, float, float]:
    if not values:
        return (float("nan"),) * 3
    a = np.asarray(values, dtype=float)
    return float(a.min()), float(a.mean()), float(a.max())


def _run_one(args) -> RunOutcome:
    spec, rule, params, idx, x0, keep, verify = args
    problem = spec.build_problem()
    p = params.with_rule(rule)
    res = solve(problem, x0, p)
    viol = verify_trace(problem, res, p) if verify else {}
    return RunOutcome(rule, idx, np.asarray(x0), res.status.value, res.iterations,
                      res.wall_time, res.x_final, viol, res if keep else None)


def run_benchmark(spec: BenchmarkSpec, *, workers: int | None = None, keep_results: bool = False,
                  verify: bool = False) -> RunStats:
    """Solve from every start with every rule and aggregate.

    Parameters
    ----------
    spec : BenchmarkSpec
    workers : int, optional
        Process count; defaults to :func:`worker_count`.  ``1`` runs inline.
    keep_results : bool
        Keep full :class:`SolveResult` objects (with traces) in the outcomes.
    verify : bool
        Re-check every accepted step with :func:`setcg.cg.verify_trace`.

    Failed runs count towards ``failures`` and are excluded from the
    min/mean/max statistics.
    """
    problem = spec.build_problem()
    starts = sample_starts(problem.start_box, spec.starts, spec.seed)
    jobs = [(spec, rule, spec.params, i, x0, keep_results, verify)
            for rule in spec.rules for i, x0 in enumerate(starts)]
    workers = worker_count() if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_one, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        outcomes = [_run_one(j) for j in jobs]

    per_rule, by_rule = {}, {}
    for rule in spec.rules:
        runs = [o for o in outcomes if o.rule == rule]
        ok = [o for o in runs if o.status == Status.CONVERGED.value]
        per_rule[rule] = RuleStats(_three_point([o.iterations for o in ok]),
                                   _three_point([o.wall_time for o in ok]),
                                   len(runs) - len(ok), len(runs))
        by_rule[rule] = runs
    return RunStats(spec.problem, per_rule, by_rule)

