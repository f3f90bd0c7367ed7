"""BFS kernels: top-down, bottom-up, hybrid, degree-aware, block-search, and
the edge-tree traversal (ET-BFS with TEET / TEOLV edgelist replay).

Every kernel writes a parent array (UNSET = -1 for unreached vertices). Parallel
loops use numba ``prange``; the worker count is set with ``worker_threads``.
Concurrent top-down claims of the same vertex all come from the same frontier
level, so whichever parent wins the race is a valid one and levels never depend
on the thread count.
"""

from __future__ import annotations

import logging
import math
import os
from contextlib import contextmanager
from dataclasses import dataclass

import numba
import numpy as np

from etbfs.graph import UNSET, BfsTree, CsrGraph
from etbfs.preprocess import (
    CE,
    NO_CORE,
    TI,
    TL,
    VZ,
    ClassifiedGraph,
    DegreeSplitAdjacency,
    EdgeTreeList,
    split_degree_aware,
)

log = logging.getLogger(__name__)

TOP_DOWN = "td"
BOTTOM_UP = "bu"
BLOCK = 64

KERNEL_NAMES = ("top-down", "hybrid", "degree-aware", "block-search", "et-bfs")


def max_workers() -> int:
    return int(numba.config.NUMBA_NUM_THREADS)


@contextmanager
def worker_threads(count: int):
    """Run the enclosed kernels with ``count`` numba workers."""
    if not 1 <= count <= max_workers():
        raise ValueError(f"worker count must be in [1, {max_workers()}], got {count}")
    previous = numba.get_num_threads()
    numba.set_num_threads(count)
    try:
        yield
    finally:
        numba.set_num_threads(previous)


numba.set_num_threads(min(max_workers(), os.cpu_count() or 1))


@dataclass(frozen=True)
class HybridPolicy:
    """Direction switch heuristic for direction-optimizing BFS.

    Go bottom-up once the frontier's edges exceed ``unexplored_edges / alpha``;
    return to top-down once the frontier holds fewer than ``n / beta`` vertices.
    ``alpha=0`` never leaves top-down; ``alpha=beta=inf`` stays bottom-up.
    """

    alpha: float = 14.0
    beta: float = 24.0

    def next_direction(self, mode, frontier_edges, unexplored_edges, frontier_vertices, vertex_count):
        if mode == TOP_DOWN:
            if self.alpha > 0 and frontier_edges > unexplored_edges / self.alpha:
                return BOTTOM_UP
            return TOP_DOWN
        if frontier_vertices < vertex_count / self.beta:
            return TOP_DOWN
        return BOTTOM_UP


NEVER_SWITCH = HybridPolicy(alpha=0.0)


# --------------------------------------------------------------------------
# level steps


@numba.njit(parallel=True, cache=True)
def _top_down_step(row, col, frontier, visited, parent, next_map):
    for i in numba.prange(frontier.size):
        v = frontier[i]
        for e in range(row[v], row[v + 1]):
            w = col[e]
            if visited[w] == 0:
                visited[w] = 1
                parent[w] = v
                next_map[w] = 1


@numba.njit(parallel=True, cache=True)
def _bottom_up_step(row, col, frontier_map, visited, parent, next_map):
    found = 0
    for w in numba.prange(visited.size):
        if visited[w] == 0:
            for e in range(row[w], row[w + 1]):
                v = col[e]
                if frontier_map[v] != 0:
                    parent[w] = v
                    next_map[w] = 1
                    found += 1
                    break
    return found


@numba.njit(parallel=True, cache=True)
def _degree_aware_step(in_plus, minus_row, minus_col, frontier_map, visited, parent, next_map):
    for w in numba.prange(visited.size):
        if visited[w] == 0:
            v = in_plus[w]
            if v >= 0 and frontier_map[v] != 0:
                parent[w] = v
                next_map[w] = 1
    for w in numba.prange(visited.size):
        if visited[w] == 0 and next_map[w] == 0:
            for e in range(minus_row[w], minus_row[w + 1]):
                v = minus_col[e]
                if frontier_map[v] != 0:
                    parent[w] = v
                    next_map[w] = 1
                    break


@numba.njit(inline="always")
def _popcount64(x):
    x = x - ((x >> np.uint64(1)) & np.uint64(0x5555555555555555))
    x = (x & np.uint64(0x3333333333333333)) + ((x >> np.uint64(2)) & np.uint64(0x3333333333333333))
    x = (x + (x >> np.uint64(4))) & np.uint64(0x0F0F0F0F0F0F0F0F)
    return (x * np.uint64(0x0101010101010101)) >> np.uint64(56)


@numba.njit(inline="always")
def _lowest_unvisited(block_no_visit):
    bit = block_no_visit & (~block_no_visit + np.uint64(1))
    pos = _popcount64(bit - np.uint64(1))
    return np.int64(pos), block_no_visit & ~bit


@numba.njit(cache=True)
def _block_search_unvisited(block_no_visit):
    return _lowest_unvisited(block_no_visit)


@numba.njit(parallel=True, cache=True)
def _block_search_many(words, pos, rest):
    for i in numba.prange(words.size):
        pos[i], rest[i] = _lowest_unvisited(words[i])


def block_search_unvisited(block_no_visit: int) -> tuple[int, int]:
    """Position of the lowest set bit of a not-visited mask, and the mask with it cleared.

    The mask must be non-zero.
    """
    pos, rest = _block_search_unvisited(np.uint64(block_no_visit))
    return int(pos), int(rest)


def block_search_unvisited_array(words: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    words = np.ascontiguousarray(words, dtype=np.uint64)
    pos = np.empty(words.size, dtype=np.int64)
    rest = np.empty(words.size, dtype=np.uint64)
    _block_search_many(words, pos, rest)
    return pos, rest


@numba.njit(parallel=True, cache=True)
def _block_search_step(in_plus, minus_row, minus_col, visit, visit_new, parent):
    found = 0
    probes = 0
    one = np.uint64(1)
    for i in numba.prange(visit.size):
        block_visit = visit[i]
        block_no_visit = ~block_visit
        while block_no_visit != 0:
            pos, block_no_visit = _lowest_unvisited(block_no_visit)
            probes += 1
            w = i * BLOCK + pos
            v = in_plus[w]
            if v >= 0 and (visit[v >> 6] >> np.uint64(v & 63)) & one:
                block_visit |= one << np.uint64(pos)
                parent[w] = v
                found += 1
            else:
                for e in range(minus_row[w], minus_row[w + 1]):
                    v = minus_col[e]
                    if (visit[v >> 6] >> np.uint64(v & 63)) & one:
                        block_visit |= one << np.uint64(pos)
                        parent[w] = v
                        found += 1
                        break
        visit_new[i] = block_visit
    return found, probes


def pack_visited(visited: np.ndarray) -> np.ndarray:
    """Byte-per-vertex visited flags to 64-bit words; padding bits read as visited."""
    n = visited.size
    words = -(-n // BLOCK)
    bits = np.ones(words * BLOCK, dtype=np.uint8)
    bits[:n] = visited != 0
    return np.packbits(bits, bitorder="little").view("<u8").astype(np.uint64, copy=False)


def unpack_visited(words: np.ndarray, n: int) -> np.ndarray:
    return np.unpackbits(words.view(np.uint8), bitorder="little")[:n]


def block_search_level(split: DegreeSplitAdjacency, visit: np.ndarray, visit_new: np.ndarray,
                       parent: np.ndarray) -> tuple[int, int]:
    """One block-search bottom-up level over bitmap ``visit``; writes ``visit_new``.

    Returns ``(found, probes)``: vertices newly parented, and unvisited
    vertices examined (fully visited blocks cost no probes).
    """
    found, probes = _block_search_step(split.in_plus, split.minus_row, split.minus_col,
                                       visit, visit_new, parent)
    return int(found), int(probes)


# --------------------------------------------------------------------------
# single-level public API


@dataclass
class FrontierState:
    """Visited flags (one byte per vertex) and parents of a traversal in progress."""

    visited: np.ndarray
    parent: np.ndarray

    @classmethod
    def start(cls, vertex_count: int, root: int) -> FrontierState:
        visited = np.zeros(vertex_count, dtype=np.uint8)
        parent = np.full(vertex_count, UNSET, dtype=np.int64)
        visited[root] = 1
        parent[root] = root
        return cls(visited, parent)


def bfs_top_down_step(graph: CsrGraph, frontier: np.ndarray, state: FrontierState) -> np.ndarray:
    """Expand ``frontier`` (vertex ids); returns the next frontier as a byte map."""
    next_map = np.zeros(graph.vertex_count, dtype=np.uint8)
    _top_down_step(graph.row_offsets, graph.col_indices, np.asarray(frontier, dtype=np.int64),
                   state.visited, state.parent, next_map)
    return next_map


def bfs_bottom_up(graph: CsrGraph, frontier_map: np.ndarray, state: FrontierState) -> np.ndarray:
    """Every unvisited vertex adopts its first neighbor found in ``frontier_map``."""
    next_map = np.zeros(graph.vertex_count, dtype=np.uint8)
    _bottom_up_step(graph.row_offsets, graph.col_indices, np.asarray(frontier_map, dtype=np.uint8),
                    state.visited, state.parent, next_map)
    state.visited |= next_map
    return next_map


# --------------------------------------------------------------------------
# traversal driver


def _check_root(n, root):
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside [0, {n})")


def _traverse(row, col, root, policy, bottom_up="plain", split=None, parent=None):
    n = row.size - 1
    _check_root(n, root)
    if parent is None:
        parent = np.empty(n, dtype=np.int64)
    parent.fill(UNSET)
    visited = np.zeros(n, dtype=np.uint8)
    parent[root] = root
    visited[root] = 1
    deg = np.diff(row)

    frontier = np.array([root], dtype=np.int64)
    frontier_map = None
    n_f = 1
    m_f = int(deg[root])
    unexplored = int(row[-1]) - m_f
    mode = TOP_DOWN
    directions = []
    while n_f > 0:
        mode = policy.next_direction(mode, m_f, unexplored, n_f, n)
        directions.append(mode)
        next_map = np.zeros(n, dtype=np.uint8)
        if mode == TOP_DOWN:
            if frontier is None:
                frontier = np.flatnonzero(frontier_map)
            _top_down_step(row, col, frontier, visited, parent, next_map)
        elif bottom_up == "block-search":
            visit_new = np.empty(-(-n // BLOCK), dtype=np.uint64)
            _block_search_step(split.in_plus, split.minus_row, split.minus_col,
                               pack_visited(visited), visit_new, parent)
            now = unpack_visited(visit_new, n)
            next_map = now & ~visited
            visited = now
        else:
            if frontier_map is None:
                frontier_map = np.zeros(n, dtype=np.uint8)
                frontier_map[frontier] = 1
            if bottom_up == "degree-aware":
                _degree_aware_step(split.in_plus, split.minus_row, split.minus_col,
                                   frontier_map, visited, parent, next_map)
            else:
                _bottom_up_step(row, col, frontier_map, visited, parent, next_map)
            visited |= next_map
        frontier = np.flatnonzero(next_map)
        frontier_map = next_map
        n_f = int(frontier.size)
        m_f = int(deg[frontier].sum())
        unexplored -= m_f
    log.debug("root %d directions %s", root, "".join("T" if d == TOP_DOWN else "B" for d in directions))
    return parent, visited, tuple(directions)


def bfs_top_down(graph: CsrGraph, root: int) -> BfsTree:
    parent, _, dirs = _traverse(graph.row_offsets, graph.col_indices, root, NEVER_SWITCH)
    return BfsTree(parent, root, dirs)


def bfs_hybrid(graph: CsrGraph, root: int, policy: HybridPolicy | None = None) -> BfsTree:
    parent, _, dirs = _traverse(graph.row_offsets, graph.col_indices, root, policy or HybridPolicy())
    return BfsTree(parent, root, dirs)


def bfs_degree_aware(graph: CsrGraph, split: DegreeSplitAdjacency | None, root: int,
                     policy: HybridPolicy | None = None) -> BfsTree:
    """Hybrid BFS whose bottom-up levels probe ``in_plus`` first, then ``in_minus``."""
    split = split or split_degree_aware(graph)
    parent, _, dirs = _traverse(graph.row_offsets, graph.col_indices, root, policy or HybridPolicy(),
                                "degree-aware", split)
    return BfsTree(parent, root, dirs)


@numba.njit(cache=True)
def _block_search_fixpoint(in_plus, minus_row, minus_col, visit, parent):
    visit_new = np.empty_like(visit)
    while True:
        found, _ = _block_search_step(in_plus, minus_row, minus_col, visit, visit_new, parent)
        visit, visit_new = visit_new, visit
        if found == 0:
            return


def bfs_block_search(graph: CsrGraph, split: DegreeSplitAdjacency | None, root: int,
                     policy: HybridPolicy | None = None) -> BfsTree:
    """Block-search bottom-up BFS.

    Without a policy every level after the root runs bottom-up over 64-vertex
    visit words until a level finds nothing. With a policy, block search is the
    bottom-up phase of a hybrid traversal.
    """
    split = split or split_degree_aware(graph)
    n = graph.vertex_count
    if policy is not None:
        parent, _, dirs = _traverse(graph.row_offsets, graph.col_indices, root, policy,
                                    "block-search", split)
        return BfsTree(parent, root, dirs)
    _check_root(n, root)
    parent = np.full(n, UNSET, dtype=np.int64)
    parent[root] = root
    visited = np.zeros(n, dtype=np.uint8)
    visited[root] = 1
    _block_search_fixpoint(split.in_plus, split.minus_row, split.minus_col, pack_visited(visited), parent)
    return BfsTree(parent, root)


# --------------------------------------------------------------------------
# edge-tree traversal


@numba.njit(cache=True)
def _walk_tree(row, col, types, start, parent):
    queue = np.empty(row.size, dtype=np.int64)
    queue[0] = start
    head, tail = 0, 1
    parent[start] = start
    core_edge = -1
    while head < tail:
        u = queue[head]
        head += 1
        for e in range(row[u], row[u + 1]):
            w = col[e]
            if parent[w] != -1:
                continue
            t = types[w]
            if t == TI or t == TL:
                parent[w] = u
                queue[tail] = w
                tail += 1
            elif t == CE:
                parent[w] = u
                core_edge = w
    return core_edge


def traverse_return_core_edge(cg: ClassifiedGraph, start: int, parent: np.ndarray) -> int:
    """Parent the edge tree holding ``start`` outward from it.

    Returns the tree's core-edge vertex (parented to its tree neighbor), or
    ``NO_CORE`` when the tree is a whole component.
    """
    t = cg.vertex_type[start]
    if t != TI and t != TL:
        raise ValueError(f"start {start} is not an edge-tree vertex")
    g = cg.graph
    return int(_walk_tree(g.row_offsets, g.col_indices, cg.vertex_type, start, parent))


@numba.njit(parallel=True, cache=True)
def _teet(src, dst, core_edge, visited, parent):
    nv = visited.size
    for i in numba.prange(dst.size):
        c = core_edge[i]
        if c >= 0 and c < nv and visited[c] != 0 and parent[dst[i]] == -1:
            parent[dst[i]] = src[i]


@numba.njit(parallel=True, cache=True)
def _teolv(src, dst, visited, parent):
    nv = visited.size
    for i in numba.prange(dst.size):
        s = src[i]
        if s >= 0 and s < nv and visited[s] != 0 and parent[dst[i]] == -1:
            parent[dst[i]] = s


def teet(etl: EdgeTreeList, visited: np.ndarray, parent: np.ndarray) -> np.ndarray:
    """Replay the edge-tree edgelist: parent every entry whose core-edge vertex
    was visited. Parents already set are kept."""
    _teet(etl.src, etl.dst, etl.core_edge, np.asarray(visited, dtype=np.uint8), parent)
    return parent


def teolv(edges, visited: np.ndarray, parent: np.ndarray) -> np.ndarray:
    """Leaf-only replay: the guard reads the visited flag of ``src`` itself.

    ``edges`` is an EdgeTreeList or a pair of (src, dst) arrays.
    """
    if isinstance(edges, EdgeTreeList):
        src, dst = edges.src, edges.dst
    else:
        src, dst = (np.asarray(a, dtype=np.int64) for a in edges)
    _teolv(src, dst, np.asarray(visited, dtype=np.uint8), parent)
    return parent


CORE_BOTTOM_UP = {
    "top-down": "plain",
    "hybrid": "plain",
    "degree-aware": "degree-aware",
    "block-search": "block-search",
}


def et_bfs(cg: ClassifiedGraph, etl: EdgeTreeList | None, start: int, core_kernel: str = "hybrid",
           tree_pass: str | None = None, policy: HybridPolicy | None = None) -> BfsTree:
    """Edge-tree BFS over a relayouted graph; the result is in relayouted labels.

    The core kernel runs on the core block only; edge trees are then parented
    by a sequential edgelist replay (``teet``, or ``teolv`` for leaf-only
    layouts). ``tree_pass`` defaults to ``teolv`` when ``cg.mh == 0``.
    """
    n = cg.vertex_count
    _check_root(n, start)
    if core_kernel not in CORE_BOTTOM_UP:
        raise ValueError(f"unknown core kernel {core_kernel!r}")
    if tree_pass is None:
        tree_pass = "teolv" if cg.mh == 0 else "teet"
    if tree_pass not in ("teet", "teolv"):
        raise ValueError(f"unknown tree pass {tree_pass!r}")
    if tree_pass == "teolv" and cg.mh != 0:
        raise ValueError("teolv needs a leaf-only (mh=0) layout")
    etl = etl if etl is not None else cg.edge_tree_list

    parent = np.full(n, UNSET, dtype=np.int64)
    t = cg.vertex_type[start]
    if t == VZ:
        parent[start] = start
        return BfsTree(parent, start)
    root = start
    saved = UNSET
    if t == TI or t == TL:
        root = traverse_return_core_edge(cg, start, parent)
        if root == NO_CORE:
            return BfsTree(parent, start)
        saved = parent[root]

    c = cg.core_vertex_count
    core = cg.core_graph
    if core_kernel == "top-down":
        pol = NEVER_SWITCH
    else:
        pol = policy or HybridPolicy()
    split = cg.core_split if CORE_BOTTOM_UP[core_kernel] != "plain" else None
    core_parent = parent[:c]
    _, visited, dirs = _traverse(core.row_offsets, core.col_indices, root, pol,
                                 CORE_BOTTOM_UP[core_kernel], split, parent=core_parent)
    if saved != UNSET:
        parent[root] = saved
    if tree_pass == "teet":
        _teet(etl.src, etl.dst, etl.core_edge, visited, parent)
    else:
        _teolv(etl.src, etl.dst, visited, parent)
    return BfsTree(parent, start, dirs)
