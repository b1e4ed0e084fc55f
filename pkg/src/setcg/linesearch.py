"""Set-valued Wolfe line searches along a K-descent direction.

For the active partition element ``a`` at ``x`` and a direction ``d`` with
``F_xd = F^a(x, d) < 0``, a step ``alpha`` is accepted when

* (sufficient decrease) every ``f^{a_j}(x + alpha d)`` is below
  ``f^{a_j}(x) + rho * alpha * F_xd * e`` in the cone order, and
* (curvature) ``F^a(x + alpha d, d) >= sigma * F_xd`` (standard) or
  ``|F^a(x + alpha d, d)| <= sigma * |F_xd|`` (strong).

The sufficient-decrease test is evaluated through the scalar surrogate
``h(alpha) = max_j psi_e(f^{a_j}(x + alpha d) - f^{a_j}(x) - rho alpha F_xd e)``
which is ``<= 0`` exactly when the cone inequalities hold.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import LineSearchFailed, NonFiniteValue
from .subproblem import F_value


class WolfeVariant(str, enum.Enum):
    STANDARD = "standard"
    STRONG = "strong"


@dataclass(frozen=True)
class LineSearchParams:
    rho: float = 1e-4
    sigma: float = 0.1
    alpha0: float = 1.0
    alpha_max: float = 100.0
    max_brackets: int = 30
    max_zoom: int = 60
    #: Slack on ``h(alpha) <= 0``; zero keeps the decrease strict.
    armijo_tol: float = 0.0

    def __post_init__(self):
        if not 0.0 < self.rho < self.sigma < 1.0:
            raise ValueError(f"need 0 < rho < sigma < 1, got rho={self.rho}, sigma={self.sigma}")
        if not 0.0 < self.alpha0 < self.alpha_max:
            raise ValueError(f"need 0 < alpha0 < alpha_max, got {self.alpha0}, {self.alpha_max}")
        if self.max_brackets < 1 or self.max_zoom < 0:
            raise ValueError("evaluation budgets must be positive")


def armijo_value(problem, a, x, d, alpha, rho, F_xd, fx=None) -> float:
    """The surrogate ``h(alpha)``; sufficient decrease holds iff it is ``<= 0``."""
    idx = list(a)
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    cone = problem.cone
    f0 = problem.values(x)[idx] if fx is None else fx[idx]
    f1 = problem.values(x + alpha * d)[idx]
    return float(np.max(cone.gerstewitz_rows(f1 - f0 - rho * alpha * F_xd * cone.e)))


def armijo_holds(problem, a, x, d, alpha, rho, F_xd, tol: float = 0.0) -> bool:
    """Cone-valued sufficient decrease at step ``alpha``."""
    return armijo_value(problem, a, x, d, alpha, rho, F_xd) <= tol


def curvature_value(problem, a, x, d, alpha) -> float:
    """``F^a(x + alpha d, d)``: the slope term of the curvature condition."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    return F_value(problem.jacobians(x + alpha * d), a, problem.cone, d)


def curvature_holds(c: float, F_xd: float, sigma: float, variant: WolfeVariant | str) -> bool:
    if WolfeVariant(variant) is WolfeVariant.STRONG:
        return abs(c) <= sigma * abs(F_xd)
    return c >= sigma * F_xd


def wolfe_holds(problem, a, x, d, alpha, F_xd, params: LineSearchParams,
                variant: WolfeVariant | str) -> bool:
    """Re-check both Wolfe predicates from scratch."""
    if not alpha > 0.0:
        return False
    if not armijo_holds(problem, a, x, d, alpha, params.rho, F_xd, params.armijo_tol):
        return False
    return curvature_holds(curvature_value(problem, a, x, d, alpha), F_xd, params.sigma, variant)


def wolfe_search(problem, a, x, d, F_xd, params: LineSearchParams = LineSearchParams(),
                 variant: WolfeVariant | str = WolfeVariant.STRONG) -> float:
    """Bracketing + bisection search for a Wolfe step.

    The bracketing phase doubles the trial step from ``alpha0`` up to
    ``alpha_max`` while sufficient decrease holds and the slope
    ``F^a(x + alpha d, d)`` stays too negative.  The first trial that fails
    sufficient decrease or overshoots the slope bound closes a bracket,
    which is then bisected.  The returned step is re-verified before it is
    returned.

    Raises
    ------
    ValueError
        If ``F_xd >= 0`` (``d`` is not a descent direction).
    LineSearchFailed
        If the evaluation budget is exhausted.
    """
    variant = WolfeVariant(variant)
    if not F_xd < 0.0:
        raise ValueError(f"direction is not K-descent: F(x, d) = {F_xd!r} >= 0")
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    fx = problem.values(x)
    rho, sigma = params.rho, params.sigma

    def h(alpha):
        # an overflowing trial point is treated as failing sufficient decrease
        try:
            return armijo_value(problem, a, x, d, alpha, rho, F_xd, fx)
        except NonFiniteValue:
            return np.inf

    def curv(alpha):
        return curvature_value(problem, a, x, d, alpha)

    def accept(alpha):
        if wolfe_holds(problem, a, x, d, alpha, F_xd, params, variant):
            return alpha
        raise LineSearchFailed(f"step {alpha!r} failed re-verification")

    def too_steep(c):
        return c < -sigma * abs(F_xd) if variant is WolfeVariant.STRONG else c < sigma * F_xd

    def zoom(lo, hi):
        # lo: sufficient decrease holds and the slope is still too negative;
        # hi: sufficient decrease fails or the slope overshoots.  The slope
        # is continuous in alpha, so an acceptable step lies in between.
        for _ in range(params.max_zoom):
            mid = 0.5 * (lo + hi)
            if h(mid) > params.armijo_tol:
                hi = mid
                continue
            c = curv(mid)
            if curvature_holds(c, F_xd, sigma, variant):
                return accept(mid)
            if too_steep(c):
                lo = mid
            else:
                hi = mid
        raise LineSearchFailed(f"zoom did not find a Wolfe step in {params.max_zoom} bisections")

    prev = 0.0
    alpha = params.alpha0
    for _ in range(params.max_brackets):
        if h(alpha) > params.armijo_tol:
            return zoom(prev, alpha)
        c = curv(alpha)
        if curvature_holds(c, F_xd, sigma, variant):
            return accept(alpha)
        if not too_steep(c):
            return zoom(prev, alpha)
        if alpha >= params.alpha_max:
            break
        prev = alpha
        alpha = min(2.0 * alpha, params.alpha_max)
    raise LineSearchFailed(f"no Wolfe step up to alpha_max = {params.alpha_max}")
