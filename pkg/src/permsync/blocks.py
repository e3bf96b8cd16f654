"""Edge-indexed containers and blockwise operators for synchronization problems.

Everything is stored per unordered edge ``(i, j)`` with ``i < j``; the block
for the reversed orientation is the transpose.  Dense ``nm x nm`` matrices are
assembled only where an eigensolver or a matrix power genuinely needs them.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .perms import Permutation

# Weighted path masses at or below this threshold are treated as "no path".
TAU_WEIGHT = 1e-12


def canonical_edges(pairs: Iterable[tuple[int, int]] | np.ndarray) -> np.ndarray:
    """Normalise an edge collection to a sorted (E, 2) int64 array with i < j.

    Rejects self-loops and duplicate edges (in either orientation).
    """
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs, dtype=np.int64)
    if arr.size == 0:
        return np.zeros((0, 2), dtype=np.int64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("edges must be pairs of node indices")
    if np.any(arr[:, 0] == arr[:, 1]):
        raise ValueError("self-loops are not allowed")
    lo = np.minimum(arr[:, 0], arr[:, 1])
    hi = np.maximum(arr[:, 0], arr[:, 1])
    order = np.lexsort((hi, lo))
    out = np.stack([lo[order], hi[order]], axis=1)
    if len(out) > 1 and np.any(np.all(out[1:] == out[:-1], axis=1)):
        raise ValueError("duplicate edges are not allowed")
    return out


def _union_find_connected(n: int, edges: np.ndarray) -> bool:
    if n <= 1:
        return True
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    comps = n
    for i, j in edges:
        ri, rj = find(int(i)), find(int(j))
        if ri != rj:
            parent[ri] = rj
            comps -= 1
    return comps == 1


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Undirected graph with one nonnegative weight per unordered edge."""

    n: int
    edges: np.ndarray  # (E, 2) int64, canonical
    weights: np.ndarray  # (E,) float64, >= 0

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, WeightedGraph):
            return NotImplemented
        return (self.n == other.n and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    def __post_init__(self) -> None:
        edges = canonical_edges(self.edges)
        weights = np.asarray(self.weights, dtype=np.float64).copy()
        if weights.shape != (len(edges),):
            raise ValueError("need exactly one weight per edge")
        if not np.all(np.isfinite(weights)) or np.any(weights < 0):
            raise ValueError("weights must be finite and nonnegative")
        if len(edges) and int(edges.max()) >= self.n:
            raise ValueError("edge endpoint out of range")
        edges.flags.writeable = False
        weights.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "weights", weights)

    @classmethod
    def unit(cls, n: int, edges: Iterable[tuple[int, int]] | np.ndarray) -> "WeightedGraph":
        edges = canonical_edges(edges)
        return cls(n, edges, np.ones(len(edges)))

    def with_weights(self, weights: np.ndarray) -> "WeightedGraph":
        return WeightedGraph(self.n, self.edges, weights)

    def weight_matrix(self) -> np.ndarray:
        """Dense symmetric n-by-n weight matrix (zero off the edge set)."""
        w = np.zeros((self.n, self.n))
        ei, ej = self.edges[:, 0], self.edges[:, 1]
        w[ei, ej] = self.weights
        w[ej, ei] = self.weights
        return w

    def degrees(self) -> np.ndarray:
        d = np.zeros(self.n)
        np.add.at(d, self.edges[:, 0], self.weights)
        np.add.at(d, self.edges[:, 1], self.weights)
        return d

    def is_connected(self) -> bool:
        return _union_find_connected(self.n, self.edges)


@dataclass(frozen=True, eq=False)
class BlockMeasurement:
    """Relative permutations on the edges of a graph.

    ``maps[e]`` is the map array of the block oriented ``edges[e, 0] ->
    edges[e, 1]``; the reverse block is implicitly the transpose, so the
    operator is symmetric by construction.
    """

    n: int
    m: int
    edges: np.ndarray  # (E, 2) int64, canonical
    maps: np.ndarray  # (E, m) int64

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockMeasurement):
            return NotImplemented
        return (self.n == other.n and self.m == other.m
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.maps, other.maps))

    __hash__ = None

    def __post_init__(self) -> None:
        edges = canonical_edges(self.edges)
        maps = np.asarray(self.maps, dtype=np.int64).copy()
        if maps.shape != (len(edges), self.m):
            raise ValueError(f"maps must have shape ({len(edges)}, {self.m})")
        if len(edges):
            if int(edges.max()) >= self.n:
                raise ValueError("edge endpoint out of range")
            ok = (maps.min(axis=1) == 0) & (maps.max(axis=1) == self.m - 1)
            ok &= (np.sort(maps, axis=1) == np.arange(self.m)).all(axis=1)
            if not ok.all():
                bad = int(np.flatnonzero(~ok)[0])
                raise ValueError(f"block on edge {tuple(edges[bad])} is not a bijection")
        edges.flags.writeable = False
        maps.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "maps", maps)

    @classmethod
    def from_blocks(cls, n: int, m: int, blocks: Mapping[tuple[int, int], Permutation]) -> "BlockMeasurement":
        """Build from ``{(i, j): block}`` where the block is oriented i -> j."""
        edges = canonical_edges(list(blocks))
        maps = np.empty((len(edges), m), dtype=np.int64)
        for e, (i, j) in enumerate(map(tuple, edges)):
            perm = blocks.get((i, j))
            if perm is None:
                perm = blocks[(j, i)].transpose()
            if perm.size != m:
                raise ValueError("block size mismatch")
            maps[e] = perm.map
        return cls(n, m, edges, maps)

    @property
    def num_edges(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): e for e, (i, j) in enumerate(self.edges)}

    @cached_property
    def inv_maps(self) -> np.ndarray:
        return np.argsort(self.maps, axis=1)

    @cached_property
    def oriented(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Both orientations: arrays ``(src, dst, maps)`` of length 2E."""
        src = np.concatenate([self.edges[:, 0], self.edges[:, 1]])
        dst = np.concatenate([self.edges[:, 1], self.edges[:, 0]])
        omaps = np.concatenate([self.maps, self.inv_maps], axis=0)
        return src, dst, omaps

    @cached_property
    def adjacency_bool(self) -> np.ndarray:
        adj = np.zeros((self.n, self.n), dtype=bool)
        adj[self.edges[:, 0], self.edges[:, 1]] = True
        adj[self.edges[:, 1], self.edges[:, 0]] = True
        return adj

    def adjacency(self) -> WeightedGraph:
        return WeightedGraph.unit(self.n, self.edges)

    def has_edge(self, i: int, j: int) -> bool:
        return (min(i, j), max(i, j)) in self.edge_index

    def block(self, i: int, j: int) -> Permutation:
        """Block oriented i -> j (transposed automatically for i > j)."""
        e = self.edge_index.get((min(i, j), max(i, j)))
        if e is None:
            raise KeyError(f"no measurement on edge ({i}, {j})")
        perm = Permutation(self.maps[e])
        return perm if i < j else perm.transpose()

    @cached_property
    def dense_unit(self) -> np.ndarray:
        """Cached unweighted dense assembly (built on first use only)."""
        return self.dense()

    def dense(self, weight_matrix: np.ndarray | None = None) -> np.ndarray:
        """Assemble the nm-by-nm block matrix, optionally edge-weighted.

        Diagonal blocks are zero; absent edges are zero blocks.
        """
        n, m = self.n, self.m
        out = np.zeros((n * m, n * m))
        src, dst, omaps = self.oriented
        rows = (src * m)[:, None] + np.arange(m)[None, :]
        cols = (dst * m)[:, None] + omaps
        if weight_matrix is None:
            vals = np.ones(src.size * m)
        else:
            vals = np.repeat(weight_matrix[src, dst], m)
        out[rows.ravel(), cols.ravel()] = vals
        return out

    def is_connected(self) -> bool:
        return _union_find_connected(self.n, self.edges)


@dataclass(frozen=True, eq=False)
class EdgeTable:
    """One scalar per unordered edge, aligned with a canonical edge array."""

    n: int
    edges: np.ndarray
    values: np.ndarray

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, EdgeTable):
            return NotImplemented
        return (type(self) is type(other) and self.n == other.n
                and np.array_equal(self.edges, other.edges)
                and np.array_equal(self.values, other.values))

    __hash__ = None

    def __post_init__(self) -> None:
        edges = canonical_edges(self.edges)
        values = np.asarray(self.values, dtype=np.float64).copy()
        if values.shape != (len(edges),):
            raise ValueError("need exactly one value per edge")
        self._validate_values(values)
        edges.flags.writeable = False
        values.flags.writeable = False
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "values", values)

    def _validate_values(self, values: np.ndarray) -> None:
        if not np.all(np.isfinite(values)):
            raise ValueError("edge values must be finite")

    @cached_property
    def edge_index(self) -> dict[tuple[int, int], int]:
        return {(int(i), int(j)): e for e, (i, j) in enumerate(self.edges)}

    def value(self, i: int, j: int) -> float:
        return float(self.values[self.edge_index[(min(i, j), max(i, j))]])

    def matrix(self) -> np.ndarray:
        out = np.zeros((self.n, self.n))
        ei, ej = self.edges[:, 0], self.edges[:, 1]
        out[ei, ej] = self.values
        out[ej, ei] = self.values
        return out


class AffinityMatrix(EdgeTable):
    """Per-edge correlation affinities, constrained to [0, 1].

    Tiny floating-point overshoot is clipped; anything materially outside the
    range is rejected.
    """

    def _validate_values(self, values: np.ndarray) -> None:
        super()._validate_values(values)
        if values.size and (values.min() < -1e-9 or values.max() > 1 + 1e-9):
            raise ValueError("affinities must lie in [0, 1]")
        np.clip(values, 0.0, 1.0, out=values)


@dataclass(frozen=True)
class GcwOperator:
    """Graph connection weight operator: block (i, j) is ``w_ij * X_ij``."""

    graph: WeightedGraph
    meas: BlockMeasurement

    def __post_init__(self) -> None:
        if self.graph.n != self.meas.n:
            raise ValueError("graph and measurement node counts differ")
        missing = [e for e in map(tuple, self.graph.edges) if not self.meas.has_edge(*e)]
        if missing:
            raise ValueError(f"edge {missing[0]} carries weight but no measurement")

    @cached_property
    def weight_matrix(self) -> np.ndarray:
        return self.graph.weight_matrix()

    def block(self, i: int, j: int) -> np.ndarray:
        w = self.weight_matrix[i, j]
        return w * self.meas.block(i, j).matrix()

    def dense(self) -> np.ndarray:
        return self.meas.dense(self.weight_matrix)


def build_gcw(graph: WeightedGraph, meas: BlockMeasurement) -> GcwOperator:
    """Weight each measured block: the operator ``(W (x) 1_m) .* X``."""
    return GcwOperator(graph, meas)


def block_inner_dense(a: np.ndarray, b: np.ndarray, n: int, m: int) -> np.ndarray:
    """Blockwise Frobenius inner products of two dense nm-by-nm matrices."""
    return (a * b).reshape(n, m, n, m).sum(axis=(1, 3))


def block_inner(op: GcwOperator, meas: BlockMeasurement) -> EdgeTable:
    """Per-edge Frobenius inner product ``<A[i,j], B[i,j]>`` over meas edges."""
    if op.meas.n != meas.n or op.meas.m != meas.m:
        raise ValueError("operand shapes do not match")
    if not np.array_equal(op.meas.edges, meas.edges):
        raise ValueError("operands must share the same edge support")
    table = block_inner_dense(op.dense(), meas.dense(), meas.n, meas.m)
    ei, ej = meas.edges[:, 0], meas.edges[:, 1]
    return EdgeTable(meas.n, meas.edges, table[ei, ej])


@dataclass(frozen=True)
class BlockTable:
    """Per-edge square blocks plus a mask of edges where they are defined."""

    edges: np.ndarray
    blocks: np.ndarray  # (E, m, m)
    has_path: np.ndarray  # (E,) bool


def gcw_power_dense(gcw: GcwOperator, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Dense ``S^l`` and ``W^l`` for the weighted operator (``l >= 1``)."""
    s = gcw.dense()
    w = gcw.weight_matrix
    sl, wl = s, w
    for _ in range(l - 1):
        sl = sl @ s
        wl = wl @ w
    return sl, wl


def squared_gcw_ratio(gcw: GcwOperator, l: int = 2, fallback: np.ndarray | None = None) -> BlockTable:
    """Per-edge blocks of ``S^l ./ (W^l (x) 1_m)``.

    Each defined block is the W-weighted average over length-``l`` paths of
    the measurement products along the path, so its entries lie in [0, 1] and
    its rows sum to one.  Edges whose weighted path mass is at most
    ``TAU_WEIGHT`` get the caller-supplied ``fallback`` block (zeros if none)
    and are flagged in ``has_path``.
    """
    if l < 2:
        raise ValueError("path power l must be >= 2")
    meas = gcw.meas
    n, m = meas.n, meas.m
    sl, wl = gcw_power_dense(gcw, l)
    ei, ej = meas.edges[:, 0], meas.edges[:, 1]
    denom = wl[ei, ej]
    has_path = denom > TAU_WEIGHT
    blocks = sl.reshape(n, m, n, m)[ei, :, ej, :].copy()
    blocks[has_path] /= denom[has_path, None, None]
    if fallback is not None:
        fb = np.asarray(fallback, dtype=np.float64)
        if fb.shape != (m, m):
            raise ValueError("fallback block must be m x m")
        blocks[~has_path] = fb
    else:
        blocks[~has_path] = 0.0
    return BlockTable(meas.edges, blocks, has_path)
