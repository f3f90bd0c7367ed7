"""Graph preparation: edge-tree classification, relayout, edge-tree edgelist,
degree-aware neighbor splitting, round-robin shuffling, segment partitioning.

All vertex types are stored as ``int8`` arrays holding ``VertexType`` values.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numba
import numpy as np

from etbfs.graph import CsrGraph, GraphError, VertexType, inverse_permutation, permute_graph

CI = np.int8(VertexType.CORE_INTERNAL)
CE = np.int8(VertexType.CORE_EDGE)
TI = np.int8(VertexType.TREE_INTERNAL)
TL = np.int8(VertexType.TREE_LEAF)
VZ = np.int8(VertexType.VERTEX_ZERO)

#: core_edge value of edge-tree entries whose tree is a whole component
NO_CORE = -1


class LayoutError(GraphError):
    """The graph or type array does not have the shape the operation assumes."""


# --------------------------------------------------------------------------
# classification


@numba.njit(cache=True)
def _classify(row, col, mh):
    n = row.size - 1
    types = np.full(n, CI, dtype=np.int8)
    pre = np.empty(n, dtype=np.int64)
    for v in range(n):
        pre[v] = row[v + 1] - row[v]
    new = pre.copy()
    flag = False
    for v in range(n):
        if pre[v] == 0:
            types[v] = VZ
        elif pre[v] == 1:
            types[v] = TL
            for e in range(row[v], row[v + 1]):
                new[col[e]] -= 1
            flag = True

    rounds = 0
    height = 1
    while flag and (mh == -1 or height <= mh):
        flag = False
        pre[:] = new
        # new[] is decremented in place during the sweep, so a vertex can be
        # stripped by a neighbor marked earlier in the same sweep
        for v in range(n):
            if types[v] == CI and (pre[v] == 0 or new[v] == 1):
                types[v] = TI
                for e in range(row[v], row[v + 1]):
                    new[col[e]] -= 1
                flag = True
        if flag:
            rounds += 1
        height += 1

    for v in range(n):
        if types[v] == CI and new[v] != row[v + 1] - row[v]:
            types[v] = CE
    return types, rounds


def classify_vertices(graph: CsrGraph, mh: int = -1) -> np.ndarray:
    """Label every vertex CI/CE/TI/TL/VZ.

    ``mh`` bounds the number of tree-internal peeling sweeps; ``-1`` peels to
    the fixpoint and ``0`` marks leaves only.
    """
    if mh < -1:
        raise ValueError(f"mh must be -1 or >= 0, got {mh}")
    types, _ = _classify(graph.row_offsets, graph.col_indices, mh)
    return types


def compute_peak_height(graph: CsrGraph) -> int:
    """Number of peeling sweeps that still find new tree-internal vertices."""
    _, rounds = _classify(graph.row_offsets, graph.col_indices, -1)
    return int(rounds)


def type_counts(types: np.ndarray) -> dict[str, int]:
    counts = np.bincount(types.astype(np.int64), minlength=5)
    return {t.short: int(counts[t]) for t in VertexType}


def is_tree(types: np.ndarray) -> np.ndarray:
    return (types == TI) | (types == TL)


def is_core(types: np.ndarray) -> np.ndarray:
    return (types == CI) | (types == CE)


# --------------------------------------------------------------------------
# edge-tree orientation


@numba.njit(cache=True)
def _orient_trees(row, col, types, seeds):
    """BFS over tree vertices, first outward from each core-edge seed, then
    from the lowest-numbered vertex of every tree left unattached.

    Returns (order, parent, core_edge, bad): tree vertices in discovery order,
    their parent toward the core (the root itself for unattached trees), the
    core-edge vertex they hang from, and the first vertex found with a second
    path to the core (-1 if none).
    """
    n = row.size - 1
    parent = np.full(n, -2, dtype=np.int64)
    core_edge = np.full(n, -1, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    queue = np.empty(n + seeds.size, dtype=np.int64)
    count = 0

    head = 0
    tail = 0
    for s in seeds:
        queue[tail] = s
        tail += 1
    for start in range(-1, n):
        if start >= 0:
            if not (types[start] == TI or types[start] == TL) or parent[start] != -2:
                continue
            parent[start] = start
            order[count] = start
            count += 1
            queue[tail] = start
            tail += 1
        while head < tail:
            u = queue[head]
            head += 1
            u_tree = types[u] == TI or types[u] == TL
            for e in range(row[u], row[u + 1]):
                w = col[e]
                if types[w] == TI or types[w] == TL:
                    if parent[w] == -2:
                        parent[w] = u
                        core_edge[w] = core_edge[u] if u_tree else u
                        order[count] = w
                        count += 1
                        queue[tail] = w
                        tail += 1
                    elif not u_tree or w != parent[u]:
                        return order[:count], parent, core_edge, w
                elif u_tree and w != parent[u]:
                    return order[:count], parent, core_edge, u
    return order[:count], parent, core_edge, -1


# --------------------------------------------------------------------------
# relayout


@dataclass(frozen=True, eq=False)
class ClassifiedGraph:
    """A graph relabelled so core vertices occupy ``[0, core_vertex_count)``.

    ``vertex_type`` is indexed by new label. Within every neighbor list core
    neighbors come first, since rows are sorted ascending.
    """

    graph: CsrGraph
    vertex_type: np.ndarray
    new2old: np.ndarray
    old2new: np.ndarray
    core_vertex_count: int
    mh: int

    @property
    def vertex_count(self) -> int:
        return self.graph.vertex_count

    @cached_property
    def core_graph(self) -> CsrGraph:
        """The subgraph induced by the core block."""
        row, col = _core_prefix(self.graph.row_offsets, self.graph.col_indices, self.core_vertex_count)
        return CsrGraph(row, col)

    @cached_property
    def core_split(self) -> DegreeSplitAdjacency:
        return split_degree_aware(self.core_graph)

    @cached_property
    def edge_tree_list(self) -> EdgeTreeList:
        return extract_edge_tree_list(self)

    def to_original(self, parent: np.ndarray) -> np.ndarray:
        """Translate a parent array from new labels to original labels."""
        out = np.full_like(parent, -1)
        set_ = parent >= 0
        mapped = np.where(set_, self.new2old[np.where(set_, parent, 0)], -1)
        out[self.new2old] = mapped
        return out


@numba.njit(cache=True)
def _core_prefix(row, col, c):
    new_row = np.zeros(c + 1, dtype=np.int64)
    for v in range(c):
        k = row[v]
        while k < row[v + 1] and col[k] < c:
            k += 1
        new_row[v + 1] = new_row[v] + (k - row[v])
    new_col = np.empty(new_row[c], dtype=np.int64)
    for v in range(c):
        d = new_row[v + 1] - new_row[v]
        new_col[new_row[v] : new_row[v] + d] = col[row[v] : row[v] + d]
    return new_row, new_col


def degree_order(degrees: np.ndarray, ids: np.ndarray | None = None) -> np.ndarray:
    """``ids`` sorted by descending degree, ties by ascending id."""
    if ids is None:
        ids = np.arange(degrees.size, dtype=np.int64)
    return ids[np.lexsort((ids, -degrees[ids]))]


def relayout_csr(graph: CsrGraph, types: np.ndarray, mh: int = -1, segments: int = 1) -> ClassifiedGraph:
    """Relabel ``graph`` into core block, tree block, isolated block.

    Core vertices are sorted by descending degree (then round-robin shuffled
    over ``segments`` if > 1). Tree vertices are numbered breadth-first outward
    from the core, so every tree vertex has a larger label than its parent.
    """
    types = np.asarray(types, dtype=np.int8)
    if types.size != graph.vertex_count:
        raise LayoutError(f"{types.size} types for {graph.vertex_count} vertices")
    core = degree_order(graph.degrees, np.flatnonzero(is_core(types)))
    if segments > 1:
        core, _ = srrs_shuffle(core, segments)
    seeds = core[types[core] == CE]
    tree_order, _, _, bad = _orient_trees(graph.row_offsets, graph.col_indices, types, seeds)
    if bad >= 0:
        raise LayoutError(f"vertex {bad} is classified as a tree vertex but has two paths to the core")
    zero = np.flatnonzero(types == VZ)
    new2old = np.concatenate([core, tree_order, zero]).astype(np.int64)
    if new2old.size != graph.vertex_count:
        raise LayoutError("types do not partition the vertex set")
    return ClassifiedGraph(
        graph=permute_graph(graph, new2old),
        vertex_type=types[new2old],
        new2old=new2old,
        old2new=inverse_permutation(new2old),
        core_vertex_count=int(core.size),
        mh=mh,
    )


def classify_and_relayout(graph: CsrGraph, mh: int = -1, segments: int = 1) -> ClassifiedGraph:
    return relayout_csr(graph, classify_vertices(graph, mh), mh=mh, segments=segments)


# --------------------------------------------------------------------------
# edge-tree edgelist


@dataclass(frozen=True)
class EdgeTreeList:
    """One ``(src, dst, core_edge)`` record per tree vertex, ascending ``dst``.

    ``src`` is the parent of ``dst`` toward the core. For a tree that is a whole
    component its root appears as ``(root, root, NO_CORE)``.
    """

    src: np.ndarray
    dst: np.ndarray
    core_edge: np.ndarray

    def __len__(self) -> int:
        return int(self.dst.size)

    def entries(self) -> list[tuple[int, int, int]]:
        return list(zip(self.src.tolist(), self.dst.tolist(), self.core_edge.tolist()))

    def tree_size_stats(self) -> dict[str, float]:
        """Tree vertices hanging from each core-edge vertex: count/mean/max/min/total."""
        attached = self.core_edge[self.core_edge >= 0]
        if attached.size == 0:
            return {"count": 0, "mean": 0.0, "max": 0, "min": 0, "total": 0}
        _, sizes = np.unique(attached, return_counts=True)
        return {
            "count": int(sizes.size),
            "mean": float(sizes.mean()),
            "max": int(sizes.max()),
            "min": int(sizes.min()),
            "total": int(sizes.sum()),
        }


def extract_edge_tree_list(cg: ClassifiedGraph) -> EdgeTreeList:
    types = cg.vertex_type
    seeds = np.flatnonzero(types == CE)
    g = cg.graph
    _, parent, core_edge, bad = _orient_trees(g.row_offsets, g.col_indices, types, seeds)
    if bad >= 0:
        raise LayoutError(f"tree vertex {bad} has an ambiguous parent")
    dst = np.flatnonzero(is_tree(types))
    return EdgeTreeList(src=parent[dst], dst=dst, core_edge=core_edge[dst])


# --------------------------------------------------------------------------
# static round-robin shuffle


def srrs_shuffle(sorted_ids, segment_count: int):
    """Deal degree-sorted ids round-robin into ``segment_count`` contiguous segments.

    Segment ``k`` receives positions ``k, k + s, k + 2s, ...``; when the length is
    not a multiple of ``s`` the leftover low-degree tail continues the same
    stride, so the first ``len % s`` segments are one longer.
    Returns ``(shuffled_ids, new2old)`` where ``new2old[i]`` is the input position
    of output slot ``i``.
    """
    if segment_count < 1:
        raise ValueError("segment_count must be >= 1")
    sorted_ids = np.asarray(sorted_ids)
    pos = np.arange(sorted_ids.size, dtype=np.int64)
    new2old = np.concatenate([pos[k::segment_count] for k in range(segment_count)]) if pos.size else pos
    return sorted_ids[new2old], new2old


def segment_bounds(n: int, segment_count: int) -> np.ndarray:
    """Start offsets of SRRS segments (length ``segment_count + 1``)."""
    sizes = np.full(segment_count, n // segment_count, dtype=np.int64)
    sizes[: n % segment_count] += 1
    return np.concatenate([[0], np.cumsum(sizes)])


def round_robin_relabel(graph: CsrGraph, segment_count: int) -> tuple[CsrGraph, np.ndarray]:
    """Degree-sort the vertices, SRRS-shuffle them, and relabel the graph."""
    order = degree_order(graph.degrees)
    shuffled, _ = srrs_shuffle(order, segment_count)
    return permute_graph(graph, shuffled), shuffled


# --------------------------------------------------------------------------
# degree-aware split


@dataclass(frozen=True)
class DegreeSplitAdjacency:
    """``in_plus[w]`` is w's highest-degree neighbor (-1 if isolated); the rest of
    w's neighbors, by descending degree, are ``minus_col[minus_row[w]:minus_row[w+1]]``."""

    in_plus: np.ndarray
    minus_row: np.ndarray
    minus_col: np.ndarray

    def in_minus(self, w: int) -> np.ndarray:
        return self.minus_col[self.minus_row[w] : self.minus_row[w + 1]]


@numba.njit(parallel=True, cache=True)
def _split(row, col, deg, minus_row):
    n = row.size - 1
    in_plus = np.full(n, -1, dtype=np.int64)
    minus_col = np.empty(max(0, col.size - (n - np.sum(deg == 0))), dtype=np.int64)
    big = np.int64(n) + 1
    maxdeg = np.int64(0)
    for v in range(n):
        maxdeg = max(maxdeg, deg[v])
    for w in numba.prange(n):
        d = row[w + 1] - row[w]
        if d == 0:
            continue
        keys = np.empty(d, dtype=np.int64)
        for k in range(d):
            v = col[row[w] + k]
            keys[k] = (maxdeg - deg[v]) * big + v
        keys.sort()
        in_plus[w] = keys[0] % big
        for k in range(1, d):
            minus_col[minus_row[w] + k - 1] = keys[k] % big
    return in_plus, minus_col


def split_degree_aware(graph: CsrGraph) -> DegreeSplitAdjacency:
    deg = graph.degrees
    minus_row = np.zeros(graph.vertex_count + 1, dtype=np.int64)
    np.cumsum(np.maximum(deg - 1, 0), out=minus_row[1:])
    in_plus, minus_col = _split(graph.row_offsets, graph.col_indices, deg, minus_row)
    return DegreeSplitAdjacency(in_plus, minus_row, minus_col)


# --------------------------------------------------------------------------
# segment partitioning and isolated-vertex removal


@dataclass(frozen=True)
class SegmentPartition:
    """Per-segment vertex ranges with the out/in adjacency each segment owns.

    ``out_adjacency[k]`` is a ``(row, col)`` pair over all vertices keeping only
    neighbors inside segment k. ``in_adjacency[k]`` is a ``(row, col)`` pair over
    the segment's own vertices with their full neighbor lists.
    """

    bounds: np.ndarray
    out_adjacency: list
    in_adjacency: list

    @property
    def segment_count(self) -> int:
        return int(self.bounds.size - 1)

    def vertices(self, k: int) -> range:
        return range(int(self.bounds[k]), int(self.bounds[k + 1]))


def partition_segments(graph: CsrGraph, segment_count: int) -> SegmentPartition:
    n = graph.vertex_count
    if segment_count < 1:
        raise ValueError("segment count must be >= 1")
    if segment_count > n:
        raise ValueError(f"{segment_count} segments for {n} vertices")
    bounds = np.array([k * n // segment_count for k in range(segment_count + 1)], dtype=np.int64)
    row, col = graph.row_offsets, graph.col_indices
    rowid = np.repeat(np.arange(n, dtype=np.int64), graph.degrees)
    out_adj, in_adj = [], []
    for k in range(segment_count):
        lo, hi = bounds[k], bounds[k + 1]
        inside = (col >= lo) & (col < hi)
        out_row = np.zeros(n + 1, dtype=np.int64)
        np.cumsum(np.bincount(rowid[inside], minlength=n), out=out_row[1:])
        out_adj.append((out_row, col[inside]))
        in_adj.append((row[lo : hi + 1] - row[lo], col[row[lo] : row[hi]]))
    return SegmentPartition(bounds, out_adj, in_adj)


def remove_zero_vertices(graph: CsrGraph) -> tuple[CsrGraph, np.ndarray]:
    """Drop degree-0 vertices. Returns the compacted graph and ``kept`` with
    ``kept[new] = old``."""
    kept = np.flatnonzero(graph.degrees > 0).astype(np.int64)
    old2new = np.full(graph.vertex_count, -1, dtype=np.int64)
    old2new[kept] = np.arange(kept.size, dtype=np.int64)
    row = np.concatenate([[0], np.cumsum(graph.degrees[kept])]).astype(np.int64)
    return CsrGraph(row, old2new[graph.col_indices], graph.dropped_edges), kept
