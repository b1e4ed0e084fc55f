"""Built-in test instances with analytic Jacobians.

=========  ===  ===  ===  ==========================  ======================
name        n    m    p   cone                        start box
=========  ===  ===  ===  ==========================  ======================
ex1         2    3   100  R^3_+                       [-50, 50]^2
ex2         2    2   100  R^2_+                       [-pi, pi]^2
ex3         3    3   100  R^3_+                       [-500, 500]^3
ex4_k1      1    2    5   R^2_+                       [-5 pi, 5 pi]
ex4_k2      1    2    5   {-y1+3y2>=0, 3y1-y2>=0}     [-5 pi, 5 pi]
ex5_k1      1    3    5   R^3_+                       [-15.5, -8]
ex5_k2      1    3    5   3-D second-order cone       [-15.5, -8]
=========  ===  ===  ===  ==========================  ======================
"""
from __future__ import annotations

import numpy as np

from .cone import OrderingCone
from .errors import UnknownProblem
from .problem import SetValuedProblem

# ---------------------------------------------------------------------------
# ex1: robust facility location
# ---------------------------------------------------------------------------

EX1_LOCATIONS = np.array([[0.0, 0.0], [0.0, 8.0], [8.0, 0.0]])
EX1_U1 = np.array([-1.0, -0.7778, -0.5556, -0.3333, -0.1111,
                   0.1111, 0.3333, 0.5556, 0.7778, 1.0])
# row-major enumeration of U1 x U1
EX1_SHIFTS = np.array([[a, b] for a in EX1_U1 for b in EX1_U1])


def ex1_hull_points() -> np.ndarray:
    """All 300 points ``l_r + u_i``; their hull is the stationary set."""
    return (EX1_LOCATIONS[:, None, :] + EX1_SHIFTS[None, :, :]).reshape(-1, 2)


def _ex1():
    centers = EX1_LOCATIONS[None, :, :] + EX1_SHIFTS[:, None, :]  # (p, 3, 2)

    def values(x):
        diff = x - centers
        return 0.5 * np.einsum("prn,prn->pr", diff, diff)

    def jac(x):
        return x - centers

    return SetValuedProblem("ex1", 2, 3, 100, values, jac, OrderingCone.orthant(3),
                            [[-50.0, 50.0], [-50.0, 50.0]])


# ---------------------------------------------------------------------------
# ex2: trigonometric family
# ---------------------------------------------------------------------------

def _ex2():
    t = np.arange(100.0)
    c = np.cos(np.pi * t / 25.0) * np.sin(np.pi * t / 100.0) ** 2
    s = np.sin(np.pi * t / 25.0) * np.cos(np.pi * t / 100.0) ** 2

    def values(x):
        x1, x2 = x
        f1 = np.sin(x1) + x1 ** 2 * (1.0 + np.cos(x2)) + 2.0 * x1 * np.cos(x2) * c
        f2 = np.cos(x2) + x2 ** 2 * (2.0 + np.cos(x1)) + x1 * np.sin(x2) * s
        return np.column_stack([f1, f2])

    def jac(x):
        x1, x2 = x
        J = np.empty((100, 2, 2))
        J[:, 0, 0] = np.cos(x1) + 2.0 * x1 * (1.0 + np.cos(x2)) + 2.0 * np.cos(x2) * c
        J[:, 0, 1] = -x1 ** 2 * np.sin(x2) - 2.0 * x1 * np.sin(x2) * c
        J[:, 1, 0] = -x2 ** 2 * np.sin(x1) + np.sin(x2) * s
        J[:, 1, 1] = -np.sin(x2) + 2.0 * x2 * (2.0 + np.cos(x1)) + x1 * np.cos(x2) * s
        return J

    return SetValuedProblem("ex2", 2, 2, 100, values, jac, OrderingCone.orthant(2),
                            [[-np.pi, np.pi], [-np.pi, np.pi]])


# ---------------------------------------------------------------------------
# ex3: MOP7-based family
# ---------------------------------------------------------------------------

def _ex3():
    theta = 2.0 * np.pi * np.arange(100.0) / 100.0
    s3 = np.sin(theta) ** 3
    ct = np.cos(theta)

    def values(x):
        x1, x2, x3 = x
        g = np.array([
            0.5 * (x1 - 2.0) ** 4 + (x2 + 1.0) ** 2 / 13.0 + 3.0,
            (x1 + x2 - 3.0) ** 2 / 36.0 + (-x1 + x2 + 2.0) ** 2 / 18.0 - 17.0,
            (x1 + 2.0 * x2 - 1.0) ** 2 / 175.0 + (-x1 + 2.0 * x2) ** 2 / 17.0,
        ])
        with np.errstate(over="ignore", invalid="ignore"):
            h1 = np.exp(x1 / 2.0) * np.cos(x2) + x1 * np.cos(x2) * s3 - x2 * np.sin(x2) * ct
            h2 = np.exp(x2 / 100.0) * np.sin(x1) + x1 * np.sin(x2) * s3 + x2 * np.cos(x2) * ct
        h3 = np.sin(x3) ** 2 * s3
        return g + np.column_stack([h1, h2, h3]) / 100.0

    def jac(x):
        x1, x2, x3 = x
        G = np.array([
            [2.0 * (x1 - 2.0) ** 3, 2.0 * (x2 + 1.0) / 13.0, 0.0],
            [(x1 + x2 - 3.0) / 18.0 - (-x1 + x2 + 2.0) / 9.0,
             (x1 + x2 - 3.0) / 18.0 + (-x1 + x2 + 2.0) / 9.0, 0.0],
            [2.0 * (x1 + 2.0 * x2 - 1.0) / 175.0 - 2.0 * (-x1 + 2.0 * x2) / 17.0,
             4.0 * (x1 + 2.0 * x2 - 1.0) / 175.0 + 4.0 * (-x1 + 2.0 * x2) / 17.0, 0.0],
        ])
        H = np.zeros((100, 3, 3))
        c2, s2 = np.cos(x2), np.sin(x2)
        with np.errstate(over="ignore", invalid="ignore"):
            e1 = np.exp(x1 / 2.0)
            H[:, 0, 0] = 0.5 * e1 * c2 + c2 * s3
            H[:, 0, 1] = -e1 * s2 - x1 * s2 * s3 - (s2 + x2 * c2) * ct
        H[:, 1, 0] = np.exp(x2 / 100.0) * np.cos(x1) + s2 * s3
        H[:, 1, 1] = np.exp(x2 / 100.0) * np.sin(x1) / 100.0 + x1 * c2 * s3 + (c2 - x2 * s2) * ct
        H[:, 2, 2] = np.sin(2.0 * x3) * s3
        return G[None, :, :] + H / 100.0

    return SetValuedProblem("ex3", 3, 3, 100, values, jac, OrderingCone.orthant(3),
                            [[-500.0, 500.0]] * 3)


# ---------------------------------------------------------------------------
# ex4: one-dimensional family in R^2
# ---------------------------------------------------------------------------

EX4_FIRST_VECTOR = (1.0, -1.0)
EX4_SECOND_VECTOR = (1.0, -1.0)

EX4_K2_GENERATORS = [[-1.0, 3.0], [3.0, -1.0]]


def _ex4(cone, name, second_vector=EX4_SECOND_VECTOR):
    lam = np.arange(5.0) / 4.0
    shift = lam[:, None] * np.asarray(EX4_FIRST_VECTOR) + (1.0 - lam)[:, None] * np.asarray(second_vector, dtype=float)

    def values(x):
        (t,) = x
        base = np.array([t, 0.5 * t * np.sin(t)])
        return base[None, :] + np.sin(t) ** 2 * shift

    def jac(x):
        (t,) = x
        base = np.array([1.0, 0.5 * np.sin(t) + 0.5 * t * np.cos(t)])
        return (base[None, :] + np.sin(2.0 * t) * shift)[:, :, None]

    box = [[-5.0 * np.pi, 5.0 * np.pi]]
    return SetValuedProblem(name, 1, 2, 5, values, jac, cone, box,
                            {"ex4_second_vector": tuple(float(v) for v in second_vector)})


# ---------------------------------------------------------------------------
# ex5: one-dimensional family in R^3
# ---------------------------------------------------------------------------

def _ex5(cone, name):
    k = np.arange(1.0, 6.0) - 3.0  # i - 3

    def values(x):
        (t,) = x
        s2, c2 = np.sin(t) ** 2, np.cos(t) ** 2
        return np.column_stack([
            0.5 * t * np.sin(t) + c2 * k / 2.0,
            0.5 * np.cos(2.0 * t) - s2 * k / 4.0,
            t * np.sin(2.0 * t) - s2 * k / 2.0,
        ])

    def jac(x):
        (t,) = x
        s2t = np.sin(2.0 * t)
        return np.column_stack([
            0.5 * np.sin(t) + 0.5 * t * np.cos(t) - s2t * k / 2.0,
            -s2t - s2t * k / 4.0,
            s2t + 2.0 * t * np.cos(2.0 * t) - s2t * k / 2.0,
        ])[:, :, None]

    return SetValuedProblem(name, 1, 3, 5, values, jac, cone, [[-15.5, -8.0]])


_REGISTRY = {
    "ex1": _ex1,
    "ex2": _ex2,
    "ex3": _ex3,
    "ex4_k1": lambda **kw: _ex4(OrderingCone.orthant(2), "ex4_k1", **kw),
    "ex4_k2": lambda **kw: _ex4(OrderingCone.polyhedral(EX4_K2_GENERATORS), "ex4_k2", **kw),
    "ex5_k1": lambda: _ex5(OrderingCone.orthant(3), "ex5_k1"),
    "ex5_k2": lambda: _ex5(OrderingCone.soc3(), "ex5_k2"),
}

PROBLEM_NAMES = tuple(_REGISTRY)


def builtin_problem(name: str, **options) -> SetValuedProblem:
    """Construct a registered problem.

    ``ex4_*`` accept ``ex4_second_vector`` to replace the second vector of
    the shift term (by default identical to the first).
    """
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise UnknownProblem(f"unknown problem {name!r}; known: {', '.join(PROBLEM_NAMES)}") from None
    if name.startswith("ex4") and options.get("ex4_second_vector") is not None:
        return factory(second_vector=options["ex4_second_vector"])
    return factory()
