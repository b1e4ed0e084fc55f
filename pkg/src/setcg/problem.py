"""Set-valued objectives ``F(x) = {f^1(x), ..., f^p(x)}``.

Problems evaluate all ``p`` component functions at once: ``values(x)`` has
shape ``(p, m)`` and ``jacobians(x)`` has shape ``(p, m, n)`` with row ``r``
of ``jacobians(x)[i]`` the gradient of ``f^i_r``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .cone import OrderingCone
from .errors import NonFiniteValue

#: Central finite-difference step.
H_FD = 1e-6


def fd_jacobian(fun: Callable[[np.ndarray], np.ndarray], x, h: float = H_FD) -> np.ndarray:
    """Central-difference Jacobian of ``fun`` at ``x`` (last axis is ``n``)."""
    x = np.asarray(x, dtype=float)
    cols = []
    for c in range(x.shape[0]):
        step = np.zeros_like(x)
        step[c] = h
        cols.append((np.asarray(fun(x + step)) - np.asarray(fun(x - step))) / (2.0 * h))
    return np.stack(cols, axis=-1)


@dataclass(frozen=True)
class VectorFunction:
    """One component ``f: R^n -> R^m``; ``jacobian`` falls back to finite differences."""

    eval: Callable[[np.ndarray], np.ndarray]
    jacobian: Callable[[np.ndarray], np.ndarray] | None = None

    @property
    def analytic(self) -> bool:
        return self.jacobian is not None

    def jac(self, x) -> np.ndarray:
        if self.jacobian is not None:
            return np.asarray(self.jacobian(x), dtype=float)
        return fd_jacobian(self.eval, x)


def _check_finite(arr: np.ndarray, what: str, x) -> np.ndarray:
    if not np.all(np.isfinite(arr)):
        raise NonFiniteValue(f"non-finite {what} at x = {np.asarray(x).tolist()}")
    return arr


@dataclass(frozen=True, eq=False)
class SetValuedProblem:
    """A finite family of vector functions ordered by a cone.

    Parameters
    ----------
    name : str
    n, m, p : int
        Decision dimension, image dimension and number of functions.
    values_fn : callable
        ``x -> (p, m)`` array of all images.
    jacobians_fn : callable or None
        ``x -> (p, m, n)`` array; ``None`` means central differences of
        ``values_fn``.
    cone : OrderingCone
    start_box : array_like, shape (n, 2)
        ``(lo, hi)`` per coordinate, used for benchmark starts.
    """

    name: str
    n: int
    m: int
    p: int
    values_fn: Callable[[np.ndarray], np.ndarray]
    jacobians_fn: Callable[[np.ndarray], np.ndarray] | None
    cone: OrderingCone
    start_box: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        box = np.asarray(self.start_box, dtype=float).reshape(self.n, 2)
        if np.any(box[:, 0] >= box[:, 1]):
            raise ValueError("start_box needs lo < hi in every coordinate")
        object.__setattr__(self, "start_box", box)
        if self.cone.dim != self.m:
            raise ValueError(f"cone dimension {self.cone.dim} != image dimension {self.m}")
        if self.p < 1:
            raise ValueError("need at least one function")

    @classmethod
    def from_functions(cls, name: str, functions: Sequence[VectorFunction], n: int,
                       cone: OrderingCone, start_box) -> "SetValuedProblem":
        functions = tuple(functions)
        m = cone.dim

        def values(x):
            return np.stack([np.asarray(f.eval(x), dtype=float).reshape(m) for f in functions])

        def jacobians(x):
            return np.stack([f.jac(x).reshape(m, n) for f in functions])

        return cls(name, n, m, len(functions), values, jacobians, cone, start_box,
                   {"functions": functions})

    def with_cone(self, cone: OrderingCone, name: str | None = None) -> "SetValuedProblem":
        return SetValuedProblem(name or self.name, self.n, self.m, self.p, self.values_fn,
                                self.jacobians_fn, cone, self.start_box, dict(self.meta))

    def _as_point(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float).reshape(-1)
        if x.shape[0] != self.n:
            raise ValueError(f"{self.name}: expected a point of dimension {self.n}, got {x.shape[0]}")
        return x

    def values(self, x) -> np.ndarray:
        x = self._as_point(x)
        return _check_finite(np.asarray(self.values_fn(x), dtype=float).reshape(self.p, self.m),
                             "image", x)

    def jacobians(self, x) -> np.ndarray:
        x = self._as_point(x)
        if self.jacobians_fn is None:
            J = fd_jacobian(self.values_fn, x)
        else:
            J = np.asarray(self.jacobians_fn(x), dtype=float)
        return _check_finite(J.reshape(self.p, self.m, self.n), "Jacobian", x)

    def fd_jacobians(self, x, h: float = H_FD) -> np.ndarray:
        x = self._as_point(x)
        return fd_jacobian(self.values_fn, x, h).reshape(self.p, self.m, self.n)


def evaluate_images(problem: SetValuedProblem, x) -> np.ndarray:
    """All images ``(f^1(x), ..., f^p(x))`` as a ``(p, m)`` array."""
    return problem.values(x)


def jacobians(problem: SetValuedProblem, x) -> np.ndarray:
    """All Jacobians as a ``(p, m, n)`` array."""
    return problem.jacobians(x)
