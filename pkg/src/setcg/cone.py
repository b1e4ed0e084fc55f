"""Ordering cones and the Gerstewitz scalarization.

Two variants are supported.  A polyhedral cone is described by a finite
generator set of its dual cone, normalized so that every generator ``w``
satisfies ``w @ e == 1``; the Gerstewitz function is then the finite max
``max_w w @ y``.  The second-order ("ice-cream") cone in R^3,
``{y : y_3 >= hypot(y_1, y_2)}``, is supported with ``e = (0, 0, 1)``, where
``psi_e(y) = y_3 + hypot(y_1, y_2)``.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import _kernels
from .errors import DegenerateGenerator

#: Membership band for floating point cone tests.
TAU_MEM = 1e-10

_DEGENERATE_TOL = 1e-12


class ConeVariant(str, enum.Enum):
    POLYHEDRAL = "polyhedral"
    SECOND_ORDER = "soc3"


def normalize_dual_generators(raw, e) -> np.ndarray:
    """Scale each dual generator so that ``w @ e == 1``.

    Parameters
    ----------
    raw : array_like, shape (L, m)
        Nonzero elements of the dual cone.
    e : array_like, shape (m,)
        Interior element of the primal cone.

    Returns
    -------
    ndarray, shape (L, m)

    Raises
    ------
    DegenerateGenerator
        If some ``w @ e <= 1e-12``, i.e. ``e`` is not interior with respect
        to the supplied generators.
    """
    W = np.atleast_2d(np.asarray(raw, dtype=float))
    e = np.asarray(e, dtype=float)
    if W.shape[1] != e.shape[0]:
        raise ValueError(f"generators have dimension {W.shape[1]}, e has {e.shape[0]}")
    scale = W @ e
    bad = np.flatnonzero(scale <= _DEGENERATE_TOL)
    if bad.size:
        raise DegenerateGenerator(
            f"generator(s) {bad.tolist()} have w.e <= {_DEGENERATE_TOL:g}; e is not interior"
        )
    return W / scale[:, None]


@dataclass(frozen=True, eq=False)
class OrderingCone:
    """A closed convex pointed solid cone with a fixed interior element.

    Use :meth:`polyhedral`, :meth:`orthant` or :meth:`soc3` to build one.
    """

    variant: ConeVariant
    e: np.ndarray
    dual_generators: np.ndarray = field(default_factory=lambda: np.empty((0, 0)))

    @property
    def dim(self) -> int:
        return int(self.e.shape[0])

    # construction -----------------------------------------------------------

    @classmethod
    def polyhedral(cls, dual_generators, e=None) -> "OrderingCone":
        W = np.atleast_2d(np.asarray(dual_generators, dtype=float))
        if W.size == 0:
            raise ValueError("a polyhedral cone needs at least one dual generator")
        if np.any(np.all(W == 0.0, axis=1)):
            raise ValueError("zero vector among dual generators")
        e = np.ones(W.shape[1]) if e is None else np.asarray(e, dtype=float)
        W = normalize_dual_generators(W, e)
        W.setflags(write=False)
        e = e.copy()
        e.setflags(write=False)
        return cls(ConeVariant.POLYHEDRAL, e, W)

    @classmethod
    def orthant(cls, m: int) -> "OrderingCone":
        """The nonnegative orthant of R^m with ``e = (1, ..., 1)``."""
        return cls.polyhedral(np.eye(m))

    @classmethod
    def soc3(cls) -> "OrderingCone":
        """``{y in R^3 : y_3 >= hypot(y_1, y_2)}`` with ``e = (0, 0, 1)``."""
        e = np.array([0.0, 0.0, 1.0])
        e.setflags(write=False)
        return cls(ConeVariant.SECOND_ORDER, e)

    # scalarization ----------------------------------------------------------

    def gerstewitz(self, y) -> float:
        """``min {t : t e in y + K}`` for a single vector ``y``."""
        y = np.asarray(y, dtype=float)
        if self.variant is ConeVariant.POLYHEDRAL:
            return float(np.max(self.dual_generators @ y))
        return float(y[2] + np.hypot(y[0], y[1]))

    def gerstewitz_rows(self, Y) -> np.ndarray:
        """Vectorized :meth:`gerstewitz` over the last axis of ``Y``."""
        Y = np.asarray(Y, dtype=float)
        if self.variant is ConeVariant.POLYHEDRAL:
            return (Y @ self.dual_generators.T).max(axis=-1)
        return Y[..., 2] + np.hypot(Y[..., 0], Y[..., 1])

    def pairwise_gerstewitz(self, Y) -> np.ndarray:
        """Matrix ``G[i, k] = psi_e(Y[k] - Y[i])`` over the rows of ``Y``."""
        if self.variant is ConeVariant.POLYHEDRAL:
            return _kernels.pairwise_gerstewitz_poly(Y, self.dual_generators)
        return _kernels.pairwise_gerstewitz_soc(Y)

    def contains(self, y, tol: float = TAU_MEM) -> bool:
        """``y in K`` up to the membership band."""
        return self.gerstewitz(-np.asarray(y, dtype=float)) <= tol

    def strictly_contains(self, y, tol: float = TAU_MEM) -> bool:
        """``y in int K`` up to the membership band."""
        return self.gerstewitz(-np.asarray(y, dtype=float)) < -tol

    def lipschitz_bound(self) -> float:
        """A Lipschitz constant of ``psi_e`` in the Euclidean norm."""
        if self.variant is ConeVariant.POLYHEDRAL:
            return float(np.max(np.linalg.norm(self.dual_generators, axis=1)))
        return float(np.sqrt(2.0))

    def describe(self) -> str:
        return self.variant.value

    def to_dict(self) -> dict:
        out = {"cone": self.variant.value, "e": self.e.tolist()}
        if self.variant is ConeVariant.POLYHEDRAL:
            out["dual_generators"] = self.dual_generators.tolist()
        return out


def gerstewitz(cone: OrderingCone, y) -> float:
    return cone.gerstewitz(y)


def contains(cone: OrderingCone, y, tol: float = TAU_MEM) -> bool:
    return cone.contains(y, tol)


def strictly_contains(cone: OrderingCone, y, tol: float = TAU_MEM) -> bool:
    return cone.strictly_contains(y, tol)


def disk_generators(count: int) -> np.ndarray:
    """``count`` points on the boundary circle of the SOC dual generator disk."""
    theta = 2.0 * np.pi * np.arange(count) / count
    return np.column_stack([np.cos(theta), np.sin(theta), np.ones(count)])


def cone_from_config(kind: str, dual_generators: Sequence[Sequence[float]] | None = None,
                     e: Sequence[float] | None = None) -> OrderingCone:
    kind = kind.strip().lower()
    if kind == "polyhedral":
        if dual_generators is None:
            raise ValueError("cone = polyhedral requires dual_generators")
        return OrderingCone.polyhedral(dual_generators, e)
    if kind == "soc3":
        if e is not None and not np.allclose(e, [0.0, 0.0, 1.0]):
            raise ValueError("soc3 supports only e = (0, 0, 1)")
        return OrderingCone.soc3()
    raise ValueError(f"unknown cone kind {kind!r}; expected 'polyhedral' or 'soc3'")
