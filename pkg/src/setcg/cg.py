"""Nonlinear conjugate gradient driver for set optimization.

Each iteration computes the minimal images at ``x_k``, solves the direction
subproblem for ``(a_k, u_k)``, stops when ``|u_k| < epsilon``, forms
``d_k = u_k + beta_k d_{k-1}`` (or restarts with ``d_k = u_k``) and takes a
Wolfe step.  ``F^k(y, d)`` below means ``max_j psi_e(grad f^{a_{k,j}}(y)^T d)``.
"""
from __future__ import annotations

import enum
import time
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import (DenominatorTooSmall, LineSearchFailed, NonFiniteValue, PartitionTooLarge,
                     SubproblemNotConverged)
from .linesearch import LineSearchParams, WolfeVariant, wolfe_search
from .minimal import PARTITION_CAP
from .subproblem import F_value, direction_from_arrays

DENOM_GUARD = 1e-12


class BetaRule(str, enum.Enum):
    DY = "dy"
    PRP = "prp"
    HS = "hs"
    ZERO = "zero"


class Status(str, enum.Enum):
    CONVERGED = "Converged"
    MAX_ITERATIONS = "MaxIterations"
    LINE_SEARCH_FAILED = "LineSearchFailed"
    SUBPROBLEM_FAILED = "SubproblemFailed"


def default_eta(sigma: float) -> float:
    """90% of the largest admissible DY scaling ``(1 - sigma) / (1 + sigma)``."""
    return 0.9 * (1.0 - sigma) / (1.0 + sigma)


@dataclass(frozen=True)
class CGParams:
    beta_rule: BetaRule = BetaRule.DY
    eta: float | None = None
    clip_nonnegative: bool | None = None
    epsilon: float = 1e-4
    max_iter: int = 500
    linesearch: LineSearchParams = field(default_factory=LineSearchParams)
    wolfe_variant: WolfeVariant = WolfeVariant.STRONG
    tol_sub: float | None = None
    denom_guard: float = DENOM_GUARD
    partition_cap: int = PARTITION_CAP
    soc_method: str = "column"
    #: When set, beta is projected into the sufficient-descent interval with this mu.
    beta_projection_mu: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "beta_rule", BetaRule(self.beta_rule))
        object.__setattr__(self, "wolfe_variant", WolfeVariant(self.wolfe_variant))
        if not 0.0 <= self.eta_value < 1.0:
            raise ValueError(f"eta must lie in [0, 1), got {self.eta_value}")
        if self.epsilon <= 0.0 or self.max_iter < 0:
            raise ValueError("epsilon must be positive and max_iter nonnegative")
        if self.beta_projection_mu is not None and not 0.0 < self.beta_projection_mu < 1.0:
            raise ValueError("beta_projection_mu must lie in (0, 1)")

    @property
    def eta_value(self) -> float:
        return default_eta(self.linesearch.sigma) if self.eta is None else float(self.eta)

    @property
    def clip_value(self) -> bool:
        if self.clip_nonnegative is None:
            return self.beta_rule in (BetaRule.PRP, BetaRule.HS)
        return bool(self.clip_nonnegative)

    @property
    def dy_guaranteed(self) -> bool:
        """Whether ``eta`` is inside the DY convergence range."""
        s = self.linesearch.sigma
        return self.eta_value < (1.0 - s) / (1.0 + s)

    def with_rule(self, rule) -> "CGParams":
        return replace(self, beta_rule=BetaRule(rule))

    def to_dict(self) -> dict:
        ls = self.linesearch
        return {
            "beta_rule": self.beta_rule.value, "eta": self.eta_value,
            "clip_nonnegative": self.clip_value, "epsilon": self.epsilon,
            "max_iter": self.max_iter, "wolfe_variant": self.wolfe_variant.value,
            "tol_sub": self.tol_sub, "denom_guard": self.denom_guard,
            "rho": ls.rho, "sigma": ls.sigma, "alpha0": ls.alpha0, "alpha_max": ls.alpha_max,
            "max_brackets": ls.max_brackets, "max_zoom": ls.max_zoom,
            "soc_method": self.soc_method, "beta_projection_mu": self.beta_projection_mu,
        }


@dataclass
class IterateRecord:
    k: int
    x: np.ndarray
    a: tuple[int, ...]
    u: np.ndarray
    phi: float
    F_u: float
    d: np.ndarray | None = None
    beta: float | None = None
    alpha: float | None = None
    F_d: float | None = None
    restarted: bool = False
    zoutendijk_term: float | None = None


@dataclass
class SolveResult:
    status: Status
    x_final: np.ndarray
    iterations: int
    trace: list[IterateRecord]
    wall_time: float
    message: str = ""

    @property
    def converged(self) -> bool:
        return self.status is Status.CONVERGED

    @property
    def beta_max(self) -> float:
        """Largest recorded ``|beta_k|`` (a boundedness diagnostic)."""
        betas = [abs(r.beta) for r in self.trace if r.beta is not None]
        return max(betas, default=0.0)


# ---------------------------------------------------------------------------
# conjugate gradient parameters
# ---------------------------------------------------------------------------

def _guarded(num: float, den: float, guard: float) -> float:
    if abs(den) <= guard:
        raise DenominatorTooSmall(f"|denominator| = {abs(den):.3g} <= {guard:g}")
    return num / den


def beta_dy(F_u_k: float, F_prev_at_xk: float, F_prev_at_xprev: float,
            denom_guard: float = DENOM_GUARD) -> float:
    """``-F^k(x_k, u_k) / (F^{k-1}(x_k, d_{k-1}) - F^{k-1}(x_{k-1}, d_{k-1}))``."""
    return _guarded(-F_u_k, F_prev_at_xk - F_prev_at_xprev, denom_guard)


def beta_prp(F_u_k: float, F_u_at_xprev: float, F_uprev_at_xprev: float,
             denom_guard: float = DENOM_GUARD) -> float:
    """``(-F^k(x_k, u_k) + F^k(x_{k-1}, u_k)) / (-F^{k-1}(x_{k-1}, u_{k-1}))``."""
    return _guarded(-F_u_k + F_u_at_xprev, -F_uprev_at_xprev, denom_guard)


def beta_hs(F_u_k: float, F_u_at_xprev: float, F_prev_at_xk: float, F_prev_at_xprev: float,
            denom_guard: float = DENOM_GUARD) -> float:
    """PRP numerator over the DY denominator."""
    return _guarded(-F_u_k + F_u_at_xprev, F_prev_at_xk - F_prev_at_xprev, denom_guard)


def restart_condition(F_prev_at_xk: float, F_curr_at_xk: float) -> bool:
    """True when ``|F^{k-1}(x_k, d_{k-1})| < F^k(x_k, d_{k-1})``."""
    return abs(F_prev_at_xk) < F_curr_at_xk


def project_beta(beta: float, F_u_k: float, F_curr_dprev: float, mu: float) -> float:
    """Clip ``beta`` into ``[0, -mu F^k(x_k,u_k) / F^k(x_k,d_{k-1})]`` (upper end only when positive)."""
    beta = max(beta, 0.0)
    if F_curr_dprev > 0.0:
        beta = min(beta, -mu * F_u_k / F_curr_dprev)
    return beta


# ---------------------------------------------------------------------------
# driver
# ---------------------------------------------------------------------------

def _compute_beta(rule: BetaRule, *, F_u, F_u_at_xprev, F_prev_at_xk, F_prev_at_xprev,
                  F_uprev_at_xprev, guard):
    if rule is BetaRule.DY:
        return beta_dy(F_u, F_prev_at_xk, F_prev_at_xprev, guard)
    if rule is BetaRule.PRP:
        return beta_prp(F_u, F_u_at_xprev, F_uprev_at_xprev, guard)
    if rule is BetaRule.HS:
        return beta_hs(F_u, F_u_at_xprev, F_prev_at_xk, F_prev_at_xprev, guard)
    return 0.0


def solve(problem, x0, params: CGParams = CGParams()) -> SolveResult:
    """Run the conjugate gradient scheme from ``x0``.

    Never raises for numerical failures; they are reported through
    :attr:`SolveResult.status`.
    """
    t0 = time.perf_counter()
    cone = problem.cone
    ls = params.linesearch
    x = np.array(x0, dtype=float).reshape(-1)
    if x.shape[0] != problem.n:
        raise ValueError(f"x0 has dimension {x.shape[0]}, problem {problem.name} needs {problem.n}")
    trace: list[IterateRecord] = []
    prev = None          # previous IterateRecord
    prev_jac = None      # Jacobians at x_{k-1}
    status, message = Status.MAX_ITERATIONS, ""

    k = 0
    while True:
        try:
            images = problem.values(x)
            jac = problem.jacobians(x)
            res = direction_from_arrays(images, jac, cone, params.tol_sub,
                                        params.partition_cap, params.soc_method)
        except (SubproblemNotConverged, PartitionTooLarge, NonFiniteValue) as exc:
            status, message = Status.SUBPROBLEM_FAILED, str(exc)
            break
        rec = IterateRecord(k=k, x=x.copy(), a=res.a, u=res.u, phi=res.phi, F_u=res.F_at_u)
        trace.append(rec)
        if np.linalg.norm(res.u) < params.epsilon:
            status = Status.CONVERGED
            break
        if k >= params.max_iter:
            status = Status.MAX_ITERATIONS
            break

        u = res.u
        d, beta, restarted = u, 0.0, True
        if prev is not None and params.beta_rule is not BetaRule.ZERO:
            F_prev_at_xk = F_value(jac, prev.a, cone, prev.d)
            F_curr_dprev = F_value(jac, res.a, cone, prev.d)
            if not restart_condition(F_prev_at_xk, F_curr_dprev):
                try:
                    beta = _compute_beta(
                        params.beta_rule, F_u=res.F_at_u,
                        F_u_at_xprev=F_value(prev_jac, res.a, cone, u),
                        F_prev_at_xk=F_prev_at_xk, F_prev_at_xprev=prev.F_d,
                        F_uprev_at_xprev=prev.F_u, guard=params.denom_guard)
                except DenominatorTooSmall:
                    beta = None
                if beta is not None:
                    if params.beta_rule is BetaRule.DY:
                        beta *= params.eta_value
                    if params.clip_value:
                        beta = max(beta, 0.0)
                    if params.beta_projection_mu is not None:
                        beta = project_beta(beta, res.F_at_u, F_curr_dprev,
                                            params.beta_projection_mu)
                    d, restarted = u + beta * prev.d, False
        F_d = F_value(jac, res.a, cone, d)
        if not restarted and not F_d < 0.0:
            # safeguard: a non-descent combination falls back to u_k
            d, beta, restarted = u, 0.0, True
            F_d = F_value(jac, res.a, cone, d)
        if restarted:
            beta = 0.0
        if not F_d < 0.0:
            status, message = Status.SUBPROBLEM_FAILED, f"u_k is not a descent direction (F = {F_d!r})"
            break

        rec.d, rec.beta, rec.F_d, rec.restarted = d, float(beta), float(F_d), restarted
        rec.zoutendijk_term = float(F_d * F_d / (d @ d))
        try:
            alpha = wolfe_search(problem, res.a, x, d, F_d, ls, params.wolfe_variant)
        except (LineSearchFailed, NonFiniteValue) as exc:
            status, message = Status.LINE_SEARCH_FAILED, str(exc)
            break
        rec.alpha = float(alpha)
        prev, prev_jac = rec, jac
        x = x + alpha * d
        k += 1

    return SolveResult(status, x, k, trace, time.perf_counter() - t0, message)


def zoutendijk_partial_sums(trace) -> list[float]:
    """Cumulative sums of ``F_d^2 / |d|^2`` over the records that took a step."""
    terms = [r.zoutendijk_term for r in trace if r.zoutendijk_term is not None]
    return [float(s) for s in np.cumsum(terms)] if terms else []


def quartile_increments(trace) -> tuple[float, float]:
    """Sums of the Zoutendijk terms over the first and last quarter of the steps."""
    terms = [r.zoutendijk_term for r in trace if r.zoutendijk_term is not None]
    q = max(1, len(terms) // 4)
    return float(sum(terms[:q])), float(sum(terms[-q:]))


def scalarized_min(problem, x) -> float:
    """``min_i psi_e(f^i(x))``; strictly decreases along accepted steps."""
    return float(np.min(problem.cone.gerstewitz_rows(problem.values(x))))


def verify_trace(problem, result: SolveResult, params: CGParams) -> dict:
    """Re-check every accepted step of a finished run.

    Returns counts of Wolfe, descent and monotonicity violations together
    with the number of checked steps.
    """
    from .linesearch import wolfe_holds

    out = {"steps": 0, "wolfe": 0, "descent": 0, "monotone": 0}
    for rec in result.trace:
        if rec.alpha is None:
            continue
        out["steps"] += 1
        if not wolfe_holds(problem, rec.a, rec.x, rec.d, rec.alpha, rec.F_d,
                           params.linesearch, params.wolfe_variant):
            out["wolfe"] += 1
        if not rec.F_d < 0.0:
            out["descent"] += 1
        x_next = rec.x + rec.alpha * rec.d
        if not scalarized_min(problem, x_next) < scalarized_min(problem, rec.x):
            out["monotone"] += 1
    return out

