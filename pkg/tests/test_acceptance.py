"""Acceptance checks, one PASS/FAIL line per criterion.

Run with ``pytest -v -s tests/test_acceptance.py`` or directly with
``python3 tests/test_acceptance.py``.  Benchmarks use the default protocol
(100 Philox-seeded starts, seed 42, strict Wolfe search, ``alpha_max = 100``)
and are computed once per process.
"""
from __future__ import annotations

import contextlib
import functools
import io
import json
import os
import sys
import time

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from oracles import (grid_points, min_norm_point_pg, point_to_hull_distance,  # noqa: E402
                     subproblem_values)
from setcg import cli  # noqa: E402
from setcg.bench import BenchmarkSpec, run_benchmark  # noqa: E402
from setcg.cg import quartile_increments  # noqa: E402
from setcg.cone import OrderingCone  # noqa: E402
from setcg.problems import PROBLEM_NAMES, ex1_hull_points  # noqa: E402
from setcg.subproblem import min_norm_point, solve_direction_for_a  # noqa: E402

RULES = ("dy", "prp", "hs")
K2 = [[-1.0, 3.0], [3.0, -1.0]]


def _cones():
    return {"orthant2": OrderingCone.orthant(2), "orthant3": OrderingCone.orthant(3),
            "k2": OrderingCone.polyhedral(K2), "soc3": OrderingCone.soc3()}


@functools.lru_cache(maxsize=None)
def suite(name: str, **options):
    """``(stats, seconds)`` for the default benchmark on ``name``."""
    spec = BenchmarkSpec(name, RULES, problem_options=dict(options))
    t0 = time.perf_counter()
    stats = run_benchmark(spec, workers=1, keep_results=True, verify=True)
    return stats, time.perf_counter() - t0


def _all_outcomes(names=PROBLEM_NAMES, rules=RULES):
    for name in names:
        stats, _ = suite(name)
        for rule in rules:
            yield name, rule, stats.outcomes[rule]


def _iter_summary(stats):
    return ", ".join(f"{r} mean {s.iterations[1]:.2f} max {s.iterations[2]:g} fail {s.failures}"
                     for r, s in stats.per_rule.items())


# ---------------------------------------------------------------------------
# criteria
# ---------------------------------------------------------------------------

def criterion_1():
    rng = np.random.default_rng(1)
    t0 = time.perf_counter()
    worst, bad = 0.0, 0
    for name, cone in _cones().items():
        m, e = cone.dim, cone.e
        Y = rng.normal(scale=3.0, size=(1000, m))
        Z = rng.normal(scale=3.0, size=(1000, m))
        A = rng.uniform(0.0, 10.0, size=1000)
        py, pz = cone.gerstewitz_rows(Y), cone.gerstewitz_rows(Z)
        # sublinearity and positive homogeneity
        worst = max(worst, np.max(cone.gerstewitz_rows(Y + Z) - py - pz))
        worst = max(worst, np.max(np.abs(cone.gerstewitz_rows(A[:, None] * Y) - A * py)))
        # monotonicity along cone directions
        K = Z[[cone.contains(z) for z in Z]]
        K = np.resize(K, (1000, m)) if len(K) else np.tile(e, (1000, 1))
        worst = max(worst, np.max(py - cone.gerstewitz_rows(Y + K)))
        bad += int(np.sum(cone.gerstewitz_rows(Y + 1e-3 * e + K) <= py))
        # representability: psi(y) is the least t with y in t e - K
        for y, t in zip(Y[:250], py[:250]):
            bad += int(not cone.contains(t * e - y))
            bad += int(cone.contains((t - 1e-6) * e - y))
        worst = max(worst, abs(cone.gerstewitz(e) - 1.0), abs(cone.gerstewitz(-e) + 1.0))
    elapsed = time.perf_counter() - t0
    ok = worst <= 1e-10 and bad == 0 and elapsed < 1.0
    return ok, f"max axiom residual {worst:.1e}, {bad} membership failures, {elapsed:.2f}s"


def criterion_2():
    cones = list(_cones().values())
    rng = np.random.default_rng(0)
    t0 = time.perf_counter()
    phi_err = dist_err = 0.0
    dist_bad, local_bad = 0, 0
    for i in range(50):
        cone = cones[i % 4]
        n, om = int(rng.integers(1, 3)), int(rng.integers(1, 4))
        J = rng.normal(size=(om, cone.dim, n))
        u, phi, _ = solve_direction_for_a(J, tuple(range(om)), cone)
        D, h = grid_points(n)
        vals = subproblem_values(J, cone, D)
        g = int(np.argmin(vals))
        phi_err = max(phi_err, abs(phi - vals[g]))
        dist = float(np.linalg.norm(u - D[g]))
        dist_err = max(dist_err, dist / h)
        dist_bad += dist > 2 * h
        # fine local sampling around the solver point
        ring = u + np.concatenate([r * rng.normal(size=(200, n)) for r in (1e-4, 1e-3, 1e-2, 1e-1)])
        local_bad += bool(subproblem_values(J, cone, ring).min() < phi - 1e-12)
    elapsed = time.perf_counter() - t0
    ok = phi_err <= 5e-2 and dist_bad == 0 and elapsed < 30.0
    return ok, (f"max |phi - phi_grid| {phi_err:.1e}, max |u - d_grid| {dist_err:.2f} grid steps "
                f"({dist_bad}/50 beyond 2), {elapsed:.1f}s; "
                f"local sampling found a better point in {local_bad}/50")


def criterion_3():
    rng = np.random.default_rng(3)
    cert = ref = 0.0
    for _ in range(200):
        k, n = int(rng.integers(1, 21)), int(rng.integers(1, 6))
        P = rng.normal(size=(k, n)) + rng.normal(size=n)
        _, v = min_norm_point(P)
        cert = max(cert, float(v @ v - np.min(P @ v)))
        ref = max(ref, float(np.linalg.norm(v - min_norm_point_pg(P)[1])))
    return cert <= 1e-9 and ref <= 1e-7, f"max certificate gap {cert:.1e}, max |v - v_ref| {ref:.1e}"


def criterion_4():
    steps = viol = 0
    for _, _, outs in _all_outcomes():
        for o in outs:
            steps += o.violations["steps"]
            viol += o.violations["wolfe"]
    return viol == 0, f"{viol} Wolfe violations in {steps} accepted steps"


def criterion_5():
    checked = viol = 0
    for _, _, outs in _all_outcomes(rules=("dy",)):
        for o in outs:
            for r in o.result.trace:
                if r.F_d is None:
                    continue
                checked += 1
                viol += not r.F_d <= r.F_u / 1.1 + 1e-9
    return viol == 0, f"{viol} violations in {checked} DY iterates"


def criterion_6():
    stats, elapsed = suite("ex1")
    hull = ex1_hull_points()
    finals = np.array([o.x_final for outs in stats.outcomes.values() for o in outs
                       if o.status == "Converged"])
    dist = float(np.max(point_to_hull_distance(finals, hull)))
    ok = (all(s.failures == 0 and s.iterations[2] <= 5 and s.iterations[1] <= 2.0
              for s in stats.per_rule.values()) and dist <= 1e-2 and elapsed < 120.0)
    return ok, f"{_iter_summary(stats)}; max hull distance {dist:.1e}; {elapsed:.1f}s"


def criterion_7():
    stats, elapsed = suite("ex4_k2")
    ok = (all(s.failures == 0 and s.iterations[1] <= 1.0 and s.iterations[2] <= 2
              for s in stats.per_rule.values()) and elapsed < 30.0)
    alt, _ = suite("ex4_k2", ex4_second_vector=(-1.0, 1.0))
    return ok, f"{_iter_summary(stats)}; {elapsed:.1f}s [with second vector (-1, 1): {_iter_summary(alt)}]"


def criterion_8():
    stats, elapsed = suite("ex5_k2")
    ok = (all(s.failures == 0 and s.iterations[1] <= 2.0 and s.iterations[2] <= 6
              for s in stats.per_rule.values()) and elapsed < 60.0)
    return ok, f"{_iter_summary(stats)}; {elapsed:.1f}s"


def criterion_9():
    parts, ok, elapsed = [], True, 0.0
    for name in ("ex2", "ex3"):
        stats, t = suite(name)
        elapsed += t
        for rule, s in stats.per_rule.items():
            ok &= (s.runs - s.failures) >= 0.95 * s.runs
        viol = sum(o.violations["wolfe"] + o.violations["descent"]
                   for outs in stats.outcomes.values() for o in outs)
        ok &= viol == 0
        parts.append(f"{name}: {_iter_summary(stats)}; {viol} violations")
    ex2 = suite("ex2")[0].per_rule
    ratio = ex2["prp"].iterations[1] / ex2["dy"].iterations[1]
    ok &= ratio <= 1.5 and elapsed < 600.0
    return bool(ok), " | ".join(parts) + f" | ex2 PRP/DY mean ratio {ratio:.2f}; {elapsed:.1f}s"


def criterion_10():
    checked = bad = 0
    for _, _, outs in _all_outcomes(names=("ex2", "ex3")):
        for o in outs:
            if o.iterations >= 20:
                checked += 1
                first, last = quartile_increments(o.result.trace)
                bad += last > first
    return bad == 0, f"{bad} of {checked} runs with >= 20 iterations violate the trend"


def criterion_11():
    steps = viol = 0
    for _, _, outs in _all_outcomes():
        for o in outs:
            steps += o.violations["steps"]
            viol += o.violations["monotone"]
    return viol == 0, f"{viol} violations in {steps} accepted steps"


def _bench_outputs(tmp, tag, name):
    csv_path, json_path = os.path.join(tmp, f"{tag}.csv"), os.path.join(tmp, f"{tag}.json")
    with contextlib.redirect_stdout(io.StringIO()):
        code = cli.main(["bench", "--problem", name, "--starts", "100", "--seed", "42",
                         "--out", csv_path, "--json", json_path])
    rows = [r for r in cli.read_stats_csv(csv_path) if r["metric"] == "iterations"]
    with open(json_path) as fh:
        return code, rows, json.load(fh)


def criterion_12(tmp=None):
    import tempfile

    diffs = []
    with tempfile.TemporaryDirectory(dir=tmp) as d:
        for name in ("ex2", "ex5_k2"):
            a, b = _bench_outputs(d, "a", name), _bench_outputs(d, "b", name)
            if a != b:
                diffs.append(name)
    # in-memory traces against the cached suite
    fresh = run_benchmark(BenchmarkSpec("ex4_k2", RULES), workers=1, keep_results=True)
    cached, _ = suite("ex4_k2")
    for rule in RULES:
        if fresh.per_rule[rule].iterations != cached.per_rule[rule].iterations:
            diffs.append(f"ex4_k2/{rule} stats")
        for oa, ob in zip(fresh.outcomes[rule], cached.outcomes[rule]):
            if not _same_trace(oa.result.trace, ob.result.trace):
                diffs.append(f"ex4_k2/{rule}/{oa.start_index}")
    return not diffs, "bit-identical" if not diffs else f"differences: {', '.join(diffs[:5])}"


def _same_trace(ta, tb):
    if len(ta) != len(tb):
        return False
    for ra, rb in zip(ta, tb):
        for f in ("x", "u", "d", "a", "beta", "alpha", "phi", "F_u", "F_d", "restarted"):
            va, vb = getattr(ra, f), getattr(rb, f)
            if (va is None) != (vb is None):
                return False
            if va is not None and not np.array_equal(np.asarray(va), np.asarray(vb)):
                return False
    return True


CRITERIA = {
    1: ("Gerstewitz axioms", criterion_1),
    2: ("subproblem grid oracle", criterion_2),
    3: ("min-norm point certificate", criterion_3),
    4: ("Wolfe post-hoc verification", criterion_4),
    5: ("DY sufficient descent", criterion_5),
    6: ("ex1 iterations and stationary hull", criterion_6),
    7: ("ex4_k2 iterations", criterion_7),
    8: ("ex5_k2 iterations", criterion_8),
    9: ("ex2/ex3 convergence and PRP vs DY", criterion_9),
    10: ("Zoutendijk trend", criterion_10),
    11: ("scalarized monotonicity", criterion_11),
    12: ("determinism", criterion_12),
}


def _line(number):
    title, fn = CRITERIA[number]
    ok, detail = fn()
    return ok, f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}: {detail}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, capsys):
    ok, line = _line(number)
    with capsys.disabled():
        print("\n" + line)
    assert ok, line


if __name__ == "__main__":
    results = [_line(n) for n in sorted(CRITERIA)]
    for _, line in results:
        print(line)
    sys.exit(0 if all(ok for ok, _ in results) else 1)
