"""Graph containers shared by every other module: raw edge lists, CSR, BFS trees."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from functools import cached_property

import numba
import numpy as np

#: parent value of a vertex the traversal never reached
UNSET = -1
#: level value of a vertex outside the root's component
UNREACHED = -1

MAX_VERTICES = 1 << 48


class GraphError(ValueError):
    """Malformed graph input."""


class TreeError(ValueError):
    """A parent array that is not a tree rooted at its root."""


class VertexType(IntEnum):
    CORE_INTERNAL = 0
    CORE_EDGE = 1
    TREE_INTERNAL = 2
    TREE_LEAF = 3
    VERTEX_ZERO = 4

    @property
    def short(self) -> str:
        return ("CI", "CE", "TI", "TL", "VZ")[self]


@dataclass(frozen=True)
class RawEdgeList:
    """Edge tuples as produced by a generator or read from disk.

    Duplicates and self-loops are allowed here; ``build_csr`` cleans them.
    """

    src: np.ndarray
    dst: np.ndarray
    vertex_count: int

    def __post_init__(self):
        object.__setattr__(self, "src", np.ascontiguousarray(self.src, dtype=np.int64))
        object.__setattr__(self, "dst", np.ascontiguousarray(self.dst, dtype=np.int64))
        if self.src.shape != self.dst.shape or self.src.ndim != 1:
            raise GraphError("src and dst must be 1-d arrays of equal length")
        if not 0 <= self.vertex_count <= MAX_VERTICES:
            raise GraphError(f"vertex_count {self.vertex_count} outside [0, 2^48]")

    @classmethod
    def from_pairs(cls, pairs, vertex_count: int) -> RawEdgeList:
        arr = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
        return cls(arr[:, 0], arr[:, 1], vertex_count)

    def __len__(self) -> int:
        return int(self.src.size)

    def pairs(self) -> list[tuple[int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist()))

    def check_range(self) -> None:
        n = self.vertex_count
        bad = (self.src < 0) | (self.src >= n) | (self.dst < 0) | (self.dst >= n)
        if bad.any():
            i = int(np.argmax(bad))
            raise GraphError(
                f"edge {i} ({int(self.src[i])}, {int(self.dst[i])}) has an endpoint "
                f"outside [0, {n})"
            )


@dataclass(frozen=True, eq=False)
class CsrGraph:
    """Undirected graph in compressed sparse row form.

    Every undirected edge is stored in both directions, so ``col_indices`` holds
    ``2 * edge_count`` entries. ``dropped_edges`` is the number of input tuples
    that did not contribute a new edge (self-loops and duplicates).
    """

    row_offsets: np.ndarray
    col_indices: np.ndarray
    dropped_edges: int = 0

    def __post_init__(self):
        object.__setattr__(self, "row_offsets", np.ascontiguousarray(self.row_offsets, dtype=np.int64))
        object.__setattr__(self, "col_indices", np.ascontiguousarray(self.col_indices, dtype=np.int64))
        if self.row_offsets.ndim != 1 or self.row_offsets.size < 1:
            raise GraphError("row_offsets needs at least one entry")
        if self.row_offsets[0] != 0 or self.row_offsets[-1] != self.col_indices.size:
            raise GraphError("row_offsets must start at 0 and end at len(col_indices)")

    @property
    def vertex_count(self) -> int:
        return int(self.row_offsets.size - 1)

    @property
    def edge_count(self) -> int:
        """Number of undirected edges."""
        return int(self.col_indices.size // 2)

    @cached_property
    def degrees(self) -> np.ndarray:
        return np.diff(self.row_offsets)

    def neighbors(self, v: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[v] : self.row_offsets[v + 1]]

    def to_edge_list(self) -> RawEdgeList:
        """Each undirected edge once, as (low, high)."""
        src = np.repeat(np.arange(self.vertex_count, dtype=np.int64), self.degrees)
        keep = src < self.col_indices
        return RawEdgeList(src[keep], self.col_indices[keep], self.vertex_count)

    def adjacency_lists(self) -> list[list[int]]:
        col = self.col_indices.tolist()
        row = self.row_offsets.tolist()
        return [col[row[v] : row[v + 1]] for v in range(self.vertex_count)]

    def __eq__(self, other):
        if not isinstance(other, CsrGraph):
            return NotImplemented
        return np.array_equal(self.row_offsets, other.row_offsets) and np.array_equal(
            self.col_indices, other.col_indices
        )

    __hash__ = None


@numba.njit(cache=True)
def _csr_from_sorted_pairs(n, lo, hi):
    # lo < hi and pairs sorted by (lo, hi): the first pass writes, for each row,
    # its smaller neighbors in ascending order, the second its larger ones.
    deg = np.zeros(n, dtype=np.int64)
    for i in range(lo.size):
        deg[lo[i]] += 1
        deg[hi[i]] += 1
    row = np.zeros(n + 1, dtype=np.int64)
    for v in range(n):
        row[v + 1] = row[v] + deg[v]
    fill = row[:-1].copy()
    col = np.empty(row[n], dtype=np.int64)
    for i in range(lo.size):
        col[fill[hi[i]]] = lo[i]
        fill[hi[i]] += 1
    for i in range(lo.size):
        col[fill[lo[i]]] = hi[i]
        fill[lo[i]] += 1
    return row, col


def build_csr(edges: RawEdgeList) -> CsrGraph:
    """Symmetrize, drop self-loops and duplicates, and pack into CSR with sorted rows."""
    edges.check_range()
    n = edges.vertex_count
    lo = np.minimum(edges.src, edges.dst)
    hi = np.maximum(edges.src, edges.dst)
    proper = lo != hi
    lo, hi = lo[proper], hi[proper]
    if n <= 3_037_000_499:  # n * n fits in int64
        keys = np.unique(lo * n + hi)
        lo, hi = keys // n, keys % n
    else:
        order = np.lexsort((hi, lo))
        lo, hi = lo[order], hi[order]
        first = np.ones(lo.size, dtype=bool)
        first[1:] = (lo[1:] != lo[:-1]) | (hi[1:] != hi[:-1])
        lo, hi = lo[first], hi[first]
    row, col = _csr_from_sorted_pairs(n, lo, hi)
    return CsrGraph(row, col, dropped_edges=len(edges) - int(lo.size))


@numba.njit(cache=True)
def _gather_rows(row, col, new2old, old2new, new_row):
    out = np.empty(col.size, dtype=np.int64)
    for i in range(new2old.size):
        v = new2old[i]
        base = new_row[i]
        for k in range(row[v + 1] - row[v]):
            out[base + k] = old2new[col[row[v] + k]]
        out[base : new_row[i + 1]] = np.sort(out[base : new_row[i + 1]])
    return out


def inverse_permutation(perm: np.ndarray) -> np.ndarray:
    inv = np.empty_like(perm)
    inv[perm] = np.arange(perm.size, dtype=perm.dtype)
    return inv


def permute_graph(graph: CsrGraph, new2old: np.ndarray) -> CsrGraph:
    """Relabel vertices so that new vertex ``i`` is old vertex ``new2old[i]``.

    Neighbor lists of the result are sorted ascending in the new labels.
    """
    new2old = np.asarray(new2old, dtype=np.int64)
    if new2old.size != graph.vertex_count:
        raise GraphError("permutation length differs from vertex count")
    old2new = inverse_permutation(new2old)
    new_row = np.zeros(graph.vertex_count + 1, dtype=np.int64)
    np.cumsum(graph.degrees[new2old], out=new_row[1:])
    col = _gather_rows(graph.row_offsets, graph.col_indices, new2old, old2new, new_row)
    return CsrGraph(new_row, col, graph.dropped_edges)


def chain_to_root(parent: np.ndarray, root: int):
    """Pointer-jumping walk of every parent chain.

    Returns ``(levels, broken)``: ``levels[v]`` is the hop count from ``v`` to the
    root along parent links, and ``broken`` marks reached vertices whose chain
    loops or ends somewhere other than the root.
    """
    n = parent.size
    idx = np.arange(n, dtype=np.int64)
    reached = parent != UNSET
    in_range = (parent >= 0) & (parent < n)
    anc = np.where(reached & in_range, parent, idx)
    dist = np.where(reached & in_range, 1, 0).astype(np.int64)
    anc[root] = root
    dist[root] = 0
    rounds = max(1, int(n).bit_length() + 1)
    for _ in range(rounds):
        dist = dist + dist[anc]
        anc = anc[anc]
    broken = reached & ((anc != root) | ~in_range)
    levels = np.where(reached & ~broken, dist, UNREACHED)
    if 0 <= root < n and parent[root] == root:
        levels[root] = 0
    return levels, broken


def derive_levels(parent, root: int) -> np.ndarray:
    """Hop distance of every vertex from ``root`` along parent links.

    Raises TreeError if ``parent[root] != root`` or some chain does not reach the root.
    """
    parent = np.asarray(parent, dtype=np.int64)
    if not 0 <= root < parent.size or parent[root] != root:
        raise TreeError(f"parent[root] must equal root ({root})")
    levels, broken = chain_to_root(parent, root)
    if broken.any():
        v = int(np.argmax(broken))
        raise TreeError(f"parent chain from vertex {v} does not terminate at root {root}")
    return levels


@dataclass
class BfsTree:
    parent: np.ndarray
    root: int
    #: direction used at each level ("td" / "bu"), when the kernel records it
    directions: tuple = field(default=())

    def levels(self) -> np.ndarray:
        return derive_levels(self.parent, self.root)

    @property
    def reached(self) -> np.ndarray:
        return self.parent != UNSET

    @property
    def vertex_count(self) -> int:
        return int(self.parent.size)
