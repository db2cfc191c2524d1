"""Qudit systems of odd prime dimension and their discrete phase space.

An ``n``-qudit system with local dimension ``d`` carries a phase space
``(Z_d x Z_d)^n``.  A phase point is a sequence of ``n`` pairs
``(a1, a2)``; ``a1`` is the boost (Z) exponent and ``a2`` the shift (X)
exponent.  Points are flattened to a single index in row-major order over
the ``2n`` components, so the last qudit's coordinates vary fastest and the
flat index of a joint point ``u (+) v`` is ``index(u) * d**(2*n_v) + index(v)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .config import MAX_DENSE_DIM


def is_odd_prime(m: int) -> bool:
    """Deterministic trial-division primality check, restricted to odd primes."""
    if m < 3 or m % 2 == 0:
        return False
    f = 3
    while f * f <= m:
        if m % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class QuditSystem:
    """``n`` qudits of odd prime dimension ``d``."""

    d: int
    n: int = 1

    def __post_init__(self):
        if not isinstance(self.d, int) or not isinstance(self.n, int):
            raise TypeError("d and n must be integers")
        if not is_odd_prime(self.d):
            raise ValueError(f"local dimension must be an odd prime, got d={self.d}")
        if self.n < 1:
            raise ValueError(f"qudit count must be >= 1, got n={self.n}")
        if self.d ** self.n > MAX_DENSE_DIM:
            raise ValueError(
                f"dim d**n = {self.d ** self.n} exceeds the dense-matrix budget "
                f"of {MAX_DENSE_DIM}"
            )

    @property
    def dim(self) -> int:
        return self.d ** self.n

    @property
    def num_points(self) -> int:
        """Number of phase points, d**(2n)."""
        return self.d ** (2 * self.n)

    def combine(self, other: "QuditSystem") -> "QuditSystem":
        """System obtained by appending ``other``'s qudits after this one's."""
        if other.d != self.d:
            raise ValueError("cannot combine systems of different local dimension")
        return QuditSystem(self.d, self.n + other.n)

    def drop_last(self) -> "QuditSystem":
        if self.n < 2:
            raise ValueError("cannot drop the last qudit of a single-qudit system")
        return QuditSystem(self.d, self.n - 1)

    def labels(self) -> np.ndarray:
        """All phase points as a read-only (num_points, 2n) integer array."""
        return _labels(self.d, self.n)

    def point_index(self, u) -> int:
        """Flat index of a phase point given as pairs or a flat label."""
        lab = self.point_label(u)
        idx = 0
        for c in lab:
            idx = idx * self.d + int(c)
        return idx

    def point_label(self, u) -> tuple[int, ...]:
        """Normalize a phase point to a flat tuple of 2n components mod d."""
        if isinstance(u, PhasePoint):
            flat = [c for pair in u.pairs for c in pair]
        else:
            seq = list(u)
            if len(seq) == self.n and all(hasattr(x, "__len__") for x in seq):
                flat = [c for pair in seq for c in pair]
            else:
                flat = seq
        if len(flat) != 2 * self.n:
            raise ValueError(
                f"phase point needs {2 * self.n} components, got {len(flat)}"
            )
        return tuple(int(c) % self.d for c in flat)

    def point_pairs(self, index: int) -> tuple[tuple[int, int], ...]:
        """Inverse of :meth:`point_index`."""
        if not 0 <= index < self.num_points:
            raise ValueError(f"point index {index} out of range")
        comps = []
        rem = index
        for _ in range(2 * self.n):
            comps.append(rem % self.d)
            rem //= self.d
        comps.reverse()
        return tuple((comps[2 * k], comps[2 * k + 1]) for k in range(self.n))


@dataclass(frozen=True)
class PhasePoint:
    """A point of discrete phase space: one ``(a1, a2)`` pair per qudit."""

    pairs: tuple[tuple[int, int], ...]

    @classmethod
    def of(cls, sys: QuditSystem, u) -> "PhasePoint":
        lab = sys.point_label(u)
        return cls(tuple((lab[2 * k], lab[2 * k + 1]) for k in range(sys.n)))

    def index(self, sys: QuditSystem) -> int:
        return sys.point_index(self)


@lru_cache(maxsize=None)
def _labels(d: int, n: int) -> np.ndarray:
    arr = np.array(list(itertools.product(range(d), repeat=2 * n)), dtype=np.int64)
    arr.setflags(write=False)
    return arr


def labels_to_indices(sys: QuditSystem, labels: np.ndarray) -> np.ndarray:
    """Flat indices of an array of labels with shape (..., 2n)."""
    labels = np.asarray(labels) % sys.d
    weights = sys.d ** np.arange(2 * sys.n - 1, -1, -1, dtype=np.int64)
    return labels @ weights


def symplectic_product(sys: QuditSystem, u, v) -> int:
    """Symplectic form ``[u, v] = sum_k (a1_k b2_k - a2_k b1_k) mod d``."""
    a = sys.point_label(u)
    b = sys.point_label(v)
    total = 0
    for k in range(sys.n):
        total += a[2 * k] * b[2 * k + 1] - a[2 * k + 1] * b[2 * k]
    return total % sys.d
