"""Minimal elements of a finite image set and the induced partition set.

Indices are 0-based throughout: index ``i`` refers to ``f^{i+1}``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .cone import TAU_MEM, OrderingCone
from .errors import PartitionTooLarge

#: Image-equality band used to group indices sharing a minimal value.
TAU_EQ = 1e-9
#: Default cap on the size of the partition set.
PARTITION_CAP = 4096


@dataclass(frozen=True)
class MinimalDecomposition:
    """Distinct minimal values and the function indices attaining each."""

    minimal_values: np.ndarray  # (omega, m)
    groups: tuple[tuple[int, ...], ...]

    @property
    def omega(self) -> int:
        return len(self.groups)

    @property
    def active(self) -> tuple[int, ...]:
        return tuple(sorted(i for g in self.groups for i in g))


def _equal_matrix(Y: np.ndarray, G: np.ndarray, tau_eq: float, tau_mem: float) -> np.ndarray:
    dist = np.linalg.norm(Y[:, None, :] - Y[None, :, :], axis=-1)
    # mutual domination within the membership band is numerical equality
    mutual = (G <= tau_mem) & (G.T <= tau_mem)
    return (dist <= tau_eq) | mutual


def minimal_elements(images, cone: OrderingCone, tau_eq: float = TAU_EQ,
                     tau_mem: float = TAU_MEM) -> MinimalDecomposition:
    """Pairwise-comparison computation of ``Min(A, K)`` with index groups.

    ``images[i]`` is dominated when some image that differs from it by more
    than ``tau_eq`` lies in ``images[i] - K``.  Surviving images that agree
    within ``tau_eq`` share one group; groups are ordered by their smallest
    index.
    """
    Y = np.atleast_2d(np.asarray(images, dtype=float))
    if Y.shape[0] == 0:
        raise ValueError("image set is empty")
    G = cone.pairwise_gerstewitz(Y)
    eq = _equal_matrix(Y, G, tau_eq, tau_mem)
    dominated = np.any((G <= tau_mem) & ~eq, axis=1)

    groups: list[list[int]] = []
    for i in np.flatnonzero(~dominated):
        for g in groups:
            if eq[g[0], i]:
                g.append(int(i))
                break
        else:
            groups.append([int(i)])
    values = Y[[g[0] for g in groups]]
    return MinimalDecomposition(values, tuple(tuple(g) for g in groups))


def weakly_minimal_elements(images, cone: OrderingCone, tau_mem: float = TAU_MEM) -> list[int]:
    """Indices ``i`` with no image strictly below ``images[i]``."""
    Y = np.atleast_2d(np.asarray(images, dtype=float))
    G = cone.pairwise_gerstewitz(Y)
    return [int(i) for i in np.flatnonzero(~np.any(G < -tau_mem, axis=1))]


def partition_size(groups: Sequence[Sequence[int]]) -> int:
    return math.prod(len(g) for g in groups)


def enumerate_partition(decomp: MinimalDecomposition | Sequence[Sequence[int]],
                        cap: int = PARTITION_CAP) -> list[tuple[int, ...]]:
    """Cartesian product of the index groups in lexicographic order.

    Raises
    ------
    PartitionTooLarge
        If the product has more than ``cap`` elements.
    """
    if cap < 1:
        raise ValueError("cap must be >= 1")
    groups = decomp.groups if isinstance(decomp, MinimalDecomposition) else decomp
    groups = [sorted(g) for g in groups]
    size = partition_size(groups)
    if size > cap:
        raise PartitionTooLarge(f"partition set has {size} elements (cap {cap})")
    return list(itertools.product(*groups))
