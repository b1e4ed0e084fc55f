"""Hot numeric kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``SETCG_DISABLE_NUMBA`` is unset or falsy.  Both paths are always
importable under explicit names (``*_numba`` / ``*_numpy``) so they can be
benchmarked and cross-checked against each other.
"""
import math
import os

import numpy as np

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    _HAVE_NUMBA = False


def _flag_disabled(value):
    return value.strip().lower() in ("1", "true", "yes", "on")


USE_NUMBA = _HAVE_NUMBA and not _flag_disabled(os.environ.get("SETCG_DISABLE_NUMBA", ""))


def _njit(fn):
    if not _HAVE_NUMBA:
        return fn
    return numba.njit(cache=True, fastmath=False)(fn)


# --------------------------------------------------------------------------
# pairwise Gerstewitz values: G[i, k] = psi_e(Y[k] - Y[i])
# --------------------------------------------------------------------------

def pairwise_gerstewitz_poly_numpy(Y, W):
    diff = Y[None, :, :] - Y[:, None, :]
    return (diff @ W.T).max(axis=-1)


def _pairwise_poly_loop(Y, W):
    p, m = Y.shape
    L = W.shape[0]
    G = np.empty((p, p))
    # psi(Y_k - Y_i) = max_l (w_l.Y_k - w_l.Y_i); precompute projections
    proj = np.empty((p, L))
    for i in range(p):
        for l in range(L):
            s = 0.0
            for r in range(m):
                s += W[l, r] * Y[i, r]
            proj[i, l] = s
    for i in range(p):
        for k in range(p):
            best = -np.inf
            for l in range(L):
                v = proj[k, l] - proj[i, l]
                if v > best:
                    best = v
            G[i, k] = best
    return G


def pairwise_gerstewitz_soc_numpy(Y):
    diff = Y[None, :, :] - Y[:, None, :]
    return diff[..., 2] + np.hypot(diff[..., 0], diff[..., 1])


def _pairwise_soc_loop(Y):
    p = Y.shape[0]
    G = np.empty((p, p))
    for i in range(p):
        for k in range(p):
            a = Y[k, 0] - Y[i, 0]
            b = Y[k, 1] - Y[i, 1]
            c = Y[k, 2] - Y[i, 2]
            G[i, k] = c + math.hypot(a, b)
    return G


pairwise_gerstewitz_poly_numba = _njit(_pairwise_poly_loop)
pairwise_gerstewitz_soc_numba = _njit(_pairwise_soc_loop)


# --------------------------------------------------------------------------
# proximal subgradient on d -> max_j psi_soc(J_j d) + 0.5 |d|^2
# --------------------------------------------------------------------------

def _soc_objective_numpy(J, d):
    Y = J @ d
    vals = Y[:, 2] + np.hypot(Y[:, 0], Y[:, 1])
    j = int(np.argmax(vals))
    return vals[j] + 0.5 * float(d @ d), j, Y[j]


def soc_prox_subgradient_numpy(J, d0, max_iter, tol, offset):
    """Reference loop; see :func:`soc_prox_subgradient` for the contract."""
    d = np.array(d0, dtype=float)
    obj, j, y = _soc_objective_numpy(J, d)
    best_d, best_obj = d.copy(), obj
    for t in range(max_iter):
        r = math.hypot(y[0], y[1])
        w = np.array([y[0] / r, y[1] / r, 1.0]) if r > 0.0 else np.array([0.0, 0.0, 1.0])
        s = J[j].T @ w
        eta = 1.0 / (t + offset)
        d = (d - eta * s) / (1.0 + eta)
        new_obj, j, y = _soc_objective_numpy(J, d)
        if new_obj < best_obj:
            best_obj = new_obj
            best_d = d.copy()
        if abs(new_obj - obj) < tol:
            return best_d, best_obj, t + 1, True
        obj = new_obj
    return best_d, best_obj, max_iter, False


def _soc_prox_loop(J, d0, max_iter, tol, offset):
    w_count, _, n = J.shape
    d = d0.copy()
    y = np.empty(3)
    s = np.empty(n)

    def objective(d, y):
        best = -np.inf
        jbest = 0
        for j in range(w_count):
            y0 = 0.0
            y1 = 0.0
            y2 = 0.0
            for c in range(n):
                y0 += J[j, 0, c] * d[c]
                y1 += J[j, 1, c] * d[c]
                y2 += J[j, 2, c] * d[c]
            v = y2 + math.hypot(y0, y1)
            if v > best:
                best = v
                jbest = j
                y[0] = y0
                y[1] = y1
                y[2] = y2
        sq = 0.0
        for c in range(n):
            sq += d[c] * d[c]
        return best + 0.5 * sq, jbest

    obj, j = objective(d, y)
    best_d = d.copy()
    best_obj = obj
    for t in range(max_iter):
        r = math.hypot(y[0], y[1])
        if r > 0.0:
            w0 = y[0] / r
            w1 = y[1] / r
        else:
            w0 = 0.0
            w1 = 0.0
        for c in range(n):
            s[c] = J[j, 0, c] * w0 + J[j, 1, c] * w1 + J[j, 2, c]
        eta = 1.0 / (t + offset)
        for c in range(n):
            d[c] = (d[c] - eta * s[c]) / (1.0 + eta)
        new_obj, j = objective(d, y)
        if new_obj < best_obj:
            best_obj = new_obj
            best_d[:] = d
        if abs(new_obj - obj) < tol:
            return best_d, best_obj, t + 1, True
        obj = new_obj
    return best_d, best_obj, max_iter, False


soc_prox_subgradient_numba = _njit(_soc_prox_loop)


# --------------------------------------------------------------------------
# dispatch
# --------------------------------------------------------------------------

def pairwise_gerstewitz_poly(Y, W):
    """Matrix ``G[i, k] = max_l W[l] . (Y[k] - Y[i])``."""
    Y = np.ascontiguousarray(Y, dtype=float)
    W = np.ascontiguousarray(W, dtype=float)
    if USE_NUMBA:
        return pairwise_gerstewitz_poly_numba(Y, W)
    return pairwise_gerstewitz_poly_numpy(Y, W)


def pairwise_gerstewitz_soc(Y):
    """Matrix ``G[i, k] = psi(Y[k] - Y[i])`` for the 3-D ice-cream cone."""
    Y = np.ascontiguousarray(Y, dtype=float)
    if USE_NUMBA:
        return pairwise_gerstewitz_soc_numba(Y)
    return pairwise_gerstewitz_soc_numpy(Y)


def soc_prox_subgradient(J, d0, max_iter=50_000, tol=1e-8, offset=1.0):
    """Proximal subgradient iteration for the second-order-cone subproblem.

    Minimizes ``max_j (J_j d)_3 + hypot((J_j d)_1, (J_j d)_2) + |d|^2 / 2``
    with steps ``1 / (t + offset)``; the quadratic is handled exactly by its
    prox.  Returns ``(d_best, obj_best, iterations, converged)`` where
    ``converged`` means two successive objectives differed by less than
    ``tol``.
    """
    J = np.ascontiguousarray(J, dtype=float)
    d0 = np.ascontiguousarray(d0, dtype=float)
    if USE_NUMBA:
        d, obj, it, ok = soc_prox_subgradient_numba(J, d0, int(max_iter), float(tol), float(offset))
        return d, float(obj), int(it), bool(ok)
    return soc_prox_subgradient_numpy(J, d0, int(max_iter), float(tol), float(offset))
