"""Permutation arithmetic and the projection onto permutation matrices.

A permutation on ``m`` items is stored as its map array: ``map[r] = c`` means
the matrix representation has a one at row ``r``, column ``c``.  Matrix
products, transposes and Frobenius inner products all reduce to integer
gather/compare operations on map arrays, which keeps every solver O(m) per
block instead of O(m^2).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import lap_max


@dataclass(frozen=True, eq=False)
class Permutation:
    """A bijection on ``{0, ..., m-1}`` in matrix convention ``P[r, map[r]] = 1``.

    Immutable after construction; the backing array is made read-only.
    """

    map: np.ndarray = field()

    def __post_init__(self) -> None:
        arr = np.asarray(self.map, dtype=np.int64)
        if arr.ndim != 1 or arr.size == 0:
            raise ValueError("permutation map must be a nonempty 1-d array")
        m = arr.size
        counts = np.bincount(arr, minlength=m) if arr.min() >= 0 and arr.max() < m else None
        if counts is None or not np.all(counts == 1):
            raise ValueError(f"map {arr.tolist()} is not a bijection of range({m})")
        arr = arr.copy()
        arr.flags.writeable = False
        object.__setattr__(self, "map", arr)

    @property
    def size(self) -> int:
        return int(self.map.size)

    @classmethod
    def identity(cls, m: int) -> "Permutation":
        return cls(np.arange(m, dtype=np.int64))

    def matrix(self) -> np.ndarray:
        """Dense m-by-m 0/1 matrix representation."""
        m = self.size
        out = np.zeros((m, m), dtype=np.float64)
        out[np.arange(m), self.map] = 1.0
        return out

    def transpose(self) -> "Permutation":
        """Matrix transpose, which is the group inverse."""
        return Permutation(np.argsort(self.map, kind="stable"))

    inverse = transpose

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Permutation):
            return NotImplemented
        return self.size == other.size and bool(np.array_equal(self.map, other.map))

    def __hash__(self) -> int:
        return hash(self.map.tobytes())

    def __repr__(self) -> str:
        return f"Permutation({self.map.tolist()})"


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Matrix product ``p @ q`` as a permutation."""
    if p.size != q.size:
        raise ValueError(f"size mismatch: {p.size} vs {q.size}")
    return Permutation(q.map[p.map])


def correlation_affinity(p: Permutation, q: Permutation) -> float:
    """Frobenius correlation ``<P, Q>/m``: the fraction of agreeing rows.

    Lies on the grid ``{0, 1/m, ..., 1}``, equals 1 iff ``p == q``, and
    satisfies ``||P - Q||_F^2 = 2m(1 - <P, Q>/m)``.
    """
    if p.size != q.size:
        raise ValueError(f"size mismatch: {p.size} vs {q.size}")
    return float(np.count_nonzero(p.map == q.map)) / p.size


def project_to_permutation(block: np.ndarray) -> Permutation:
    """Closest permutation to ``block``: argmax of ``<P, block>`` over all P.

    Equivalently the Frobenius projection argmin ``||P - block||_F``.  Ties
    are broken toward the lexicographically smallest map array.
    """
    sigma, _ = lap_max(block)
    return Permutation(sigma)
