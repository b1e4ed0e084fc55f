"""Direction subproblem: minimize ``F^a(x, d) + |d|^2 / 2`` over ``P_x x R^n``.

For a fixed partition element ``a`` the objective is strongly convex.  Its
dual is the minimum-norm point of the convex hull of the scalarized
gradients ``J_{a_j}^T w`` (``w`` ranging over the normalized dual generator
set), and the primal minimizer is ``u = -v``.

* Polyhedral cones: the generator set is finite and Wolfe's min-norm-point
  algorithm solves the dual exactly.
* Second-order cone: the generator set is the disk ``{(c, s, 1): c^2+s^2<=1}``.
  The default ``"column"`` method starts from a 64-point discretization of
  the boundary circle and adds the exact maximizing generator of every
  violated ``j`` until the duality gap closes.  ``"subgradient"`` polishes
  the same warm start with a proximal subgradient iteration instead.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .cone import ConeVariant, OrderingCone, disk_generators
from .errors import SubproblemNotConverged
from .minimal import PARTITION_CAP, MinimalDecomposition, enumerate_partition, minimal_elements

TOL_POLY = 1e-10
TOL_SOC = 1e-8
SOC_WARM_GENERATORS = 64
_TIE = 1e-12


# ---------------------------------------------------------------------------
# minimum-norm point
# ---------------------------------------------------------------------------

def _affine_minimizer(P: np.ndarray) -> np.ndarray:
    """Weights ``mu`` (summing to 1) of the min-norm point of ``aff(P)``."""
    if P.shape[0] == 1:
        return np.ones(1)
    B = (P[1:] - P[0]).T
    c, *_ = np.linalg.lstsq(B, -P[0], rcond=None)
    return np.concatenate([[1.0 - c.sum()], c])


def min_norm_point(vectors, tol: float = TOL_POLY, max_iter: int = 1000):
    """Point of minimum Euclidean norm in ``conv(vectors)``.

    Wolfe's corral algorithm.  Terminates when the optimality certificate
    ``min_i vectors[i] @ v >= |v|^2 - tol * scale`` holds, where ``scale`` is
    ``max(1, max_i |vectors[i]|^2)``.

    Parameters
    ----------
    vectors : array_like, shape (N, n)
    tol : float
    max_iter : int
        Budget of major iterations.

    Returns
    -------
    weights : ndarray, shape (N,)
        Convex weights (nonnegative, summing to one).
    v : ndarray, shape (n,)
        ``weights @ vectors``.

    Raises
    ------
    SubproblemNotConverged
    """
    P = np.atleast_2d(np.asarray(vectors, dtype=float))
    N = P.shape[0]
    if N == 0:
        raise ValueError("min_norm_point needs at least one vector")
    sq = np.einsum("ij,ij->i", P, P)
    thresh = tol * max(1.0, float(sq.max()))
    eps = 1e-14

    S = [int(np.argmin(sq))]
    lam = np.ones(1)
    v = P[S[0]].copy()
    for _ in range(max_iter):
        dots = P @ v
        j = int(np.argmin(dots))
        vv = float(v @ v)
        if vv - dots[j] <= thresh or j in S:
            break
        S.append(j)
        lam = np.append(lam, 0.0)
        while True:
            mu = _affine_minimizer(P[S])
            if np.all(mu > eps):
                lam = mu
                break
            # move from lam towards mu until the first weight hits zero
            neg = mu <= eps
            step = lam[neg] / np.maximum(lam[neg] - mu[neg], eps)
            theta = float(np.clip(step.min(), 0.0, 1.0))
            lam = lam + theta * (mu - lam)
            lam[np.flatnonzero(neg)[int(np.argmin(step))]] = 0.0
            keep = lam > eps
            S = [s for s, k in zip(S, keep) if k]
            lam = lam[keep] / lam[keep].sum()
        v_new = lam @ P[S]
        v = v_new
        if float(v_new @ v_new) >= vv:
            # no progress in floating point
            break
    else:
        raise SubproblemNotConverged(f"min-norm point: no certificate after {max_iter} iterations")

    weights = np.zeros(N)
    weights[S] = lam
    return weights, weights @ P


# ---------------------------------------------------------------------------
# per-partition-element subproblem
# ---------------------------------------------------------------------------

def F_value(jac: np.ndarray, a, cone: OrderingCone, d) -> float:
    """``max_j psi_e(J_{a_j} d)`` for Jacobians ``jac`` of shape ``(p, m, n)``."""
    Y = jac[list(a)] @ np.asarray(d, dtype=float)
    return float(np.max(cone.gerstewitz_rows(Y)))


def _scalarized_gradients(Ja: np.ndarray, W: np.ndarray) -> np.ndarray:
    # rows J_j^T w_l for every (j, l)
    return np.einsum("jmn,lm->jln", Ja, W).reshape(-1, Ja.shape[2])


def _soc_column(Ja: np.ndarray, tol: float, max_rounds: int = 200):
    pts = _scalarized_gradients(Ja, disk_generators(SOC_WARM_GENERATORS))
    scale = max(1.0, float(np.max(np.einsum("ij,ij->i", pts, pts))))
    for _ in range(max_rounds):
        weights, v = min_norm_point(pts, tol=min(tol, TOL_POLY))
        u = -v
        Y = Ja @ u
        r = np.hypot(Y[:, 0], Y[:, 1])
        psi = Y[:, 2] + r
        uu = float(u @ u)
        gap = psi + uu
        # the gap must also stay below |u|^2 / 2 so that u remains a descent direction
        viol = np.flatnonzero(gap > min(tol * scale, 0.5 * uu) + _TIE * scale)
        if viol.size == 0:
            return u, weights
        safe = np.where(r > 0.0, r, 1.0)
        W = np.column_stack([np.where(r > 0, Y[:, 0] / safe, 0.0),
                             np.where(r > 0, Y[:, 1] / safe, 0.0),
                             np.ones(len(r))])
        new = np.einsum("jmn,jm->jn", Ja[viol], W[viol])
        pts = np.vstack([pts, new])
    raise SubproblemNotConverged(f"SOC column generation: gap above {tol:g} after {max_rounds} rounds")


def _soc_subgradient(Ja: np.ndarray, tol: float, max_iter: int = 50_000):
    pts = _scalarized_gradients(Ja, disk_generators(SOC_WARM_GENERATORS))
    _, v = min_norm_point(pts)
    d, _, _, ok = _kernels.soc_prox_subgradient(Ja, -v, max_iter=max_iter, tol=tol,
                                                offset=float(SOC_WARM_GENERATORS))
    if not ok:
        raise SubproblemNotConverged(f"proximal subgradient: no convergence in {max_iter} iterations")
    return d, np.empty(0)


def solve_direction_for_a(jac: np.ndarray, a, cone: OrderingCone, tol_sub: float | None = None,
                          soc_method: str = "column"):
    """Minimizer ``u`` of ``F^a(x, .) + |.|^2/2`` and the optimal value.

    Returns ``(u, phi_a, weights)``; ``weights`` are the dual simplex weights
    over the scalarized gradients (empty for the subgradient method).
    """
    Ja = np.asarray(jac, dtype=float)[list(a)]
    if cone.variant is ConeVariant.POLYHEDRAL:
        tol = TOL_POLY if tol_sub is None else tol_sub
        weights, v = min_norm_point(_scalarized_gradients(Ja, cone.dual_generators), tol=tol)
        u = -v
    else:
        tol = TOL_SOC if tol_sub is None else tol_sub
        if soc_method == "column":
            u, weights = _soc_column(Ja, tol)
        elif soc_method == "subgradient":
            u, weights = _soc_subgradient(Ja, tol)
        else:
            raise ValueError(f"unknown soc_method {soc_method!r}")
    phi = F_value(jac, a, cone, u) + 0.5 * float(u @ u)
    return u, phi, weights


# ---------------------------------------------------------------------------
# full direction over the partition set
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DirectionResult:
    a: tuple[int, ...]
    u: np.ndarray
    phi: float
    F_at_u: float
    weights: np.ndarray = field(repr=False)
    decomposition: MinimalDecomposition | None = field(default=None, repr=False)


def direction_from_arrays(images: np.ndarray, jac: np.ndarray, cone: OrderingCone,
                          tol_sub: float | None = None, cap: int = PARTITION_CAP,
                          soc_method: str = "column") -> DirectionResult:
    """:func:`compute_direction` on precomputed images and Jacobians."""
    decomp = minimal_elements(images, cone)
    best = None
    for a in enumerate_partition(decomp, cap):
        u, phi, weights = solve_direction_for_a(jac, a, cone, tol_sub, soc_method)
        if best is None or phi < best[2] - _TIE:
            best = (a, u, phi, weights)
    a, u, phi, weights = best
    return DirectionResult(a, u, phi, F_value(jac, a, cone, u), weights, decomp)


def compute_direction(problem, x, tol_sub: float | None = None, cap: int = PARTITION_CAP,
                      soc_method: str = "column") -> DirectionResult:
    """Solve the direction subproblem at ``x``.

    Enumerates the partition set in lexicographic order and keeps the first
    element whose optimal value is smaller than all earlier ones by more
    than ``1e-12``.
    """
    return direction_from_arrays(problem.values(x), problem.jacobians(x), problem.cone,
                                 tol_sub, cap, soc_method)
