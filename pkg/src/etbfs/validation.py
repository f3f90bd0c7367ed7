"""Graph500-style BFS tree validation and the reference (oracle) BFS."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numba
import numpy as np

from etbfs.graph import UNREACHED, UNSET, BfsTree, CsrGraph, chain_to_root

RULE_ROOT = 1
RULE_CHAIN = 2
RULE_EDGE = 3
RULE_LEVEL = 4
RULE_COMPONENT = 5

RULE_NAMES = {
    RULE_ROOT: "parent[root] == root",
    RULE_CHAIN: "parent chains reach the root without cycles",
    RULE_EDGE: "every tree edge is a graph edge",
    RULE_LEVEL: "graph edges span at most one level",
    RULE_COMPONENT: "reached set equals the root's component",
}

#: failures recorded per rule; further ones are counted but not listed
MAX_LISTED = 10


def oracle_bfs(graph: CsrGraph, root: int) -> list[int]:
    """Textbook queue BFS; UNREACHED (-1) outside the root's component."""
    n = graph.vertex_count
    if not 0 <= root < n:
        raise ValueError(f"root {root} outside [0, {n})")
    adj = graph.adjacency_lists()
    level = [UNREACHED] * n
    level[root] = 0
    queue = deque([root])
    while queue:
        u = queue.popleft()
        for w in adj[u]:
            if level[w] == UNREACHED:
                level[w] = level[u] + 1
                queue.append(w)
    return level


@dataclass
class ValidationReport:
    passed: bool
    failures: list = field(default_factory=list)
    reached_count: int = 0
    traversed_edge_count: int = 0
    failure_counts: dict = field(default_factory=dict)

    @property
    def failed_rules(self) -> set[int]:
        return set(self.failure_counts)

    def summary(self) -> str:
        lines = [
            f"passed: {self.passed}",
            f"reached_count: {self.reached_count}",
            f"traversed_edge_count: {self.traversed_edge_count}",
        ]
        for rule, count in sorted(self.failure_counts.items()):
            lines.append(f"rule {rule} ({RULE_NAMES[rule]}): {count} failure(s)")
        for rule, item, msg in self.failures:
            lines.append(f"  [{rule}] {item}: {msg}")
        return "\n".join(lines)


@numba.njit(parallel=True, cache=True)
def _edge_checks(row, col, parent, levels, not_edge, bad_level, missing):
    n = row.size - 1
    for v in numba.prange(n):
        p = parent[v]
        if p >= 0 and p < n and p != v:
            hit = False
            for e in range(row[v], row[v + 1]):
                if col[e] == p:
                    hit = True
                    break
            not_edge[v] = not hit
        lv = levels[v]
        for e in range(row[v], row[v + 1]):
            w = col[e]
            lw = levels[w]
            if lv >= 0 and lw >= 0:
                if lv - lw > 1 or lw - lv > 1:
                    bad_level[v] = True
            elif parent[w] != -1 and parent[v] == -1:
                missing[v] = True


def validate_bfs_tree(graph: CsrGraph, tree: BfsTree) -> ValidationReport:
    """Check a BFS parent tree against ``graph`` (both in the same labels).

    Failures are reported per rule, never raised.
    """
    n = graph.vertex_count
    parent = np.asarray(tree.parent, dtype=np.int64)
    root = tree.root
    failures = []
    counts = {}

    def fail(rule, items, message):
        items = np.asarray(items).ravel()
        if items.size == 0:
            return
        counts[rule] = counts.get(rule, 0) + int(items.size)
        for item in items[:MAX_LISTED].tolist():
            failures.append((rule, item, message))

    if parent.size != n:
        fail(RULE_ROOT, [parent.size], f"parent array has {parent.size} entries, graph has {n} vertices")
        return ValidationReport(False, failures, failure_counts=counts)
    if not 0 <= root < n or parent[root] != root:
        fail(RULE_ROOT, [root], "parent[root] != root")

    out_of_range = (parent != UNSET) & ((parent < 0) | (parent >= n))
    fail(RULE_EDGE, np.flatnonzero(out_of_range), "parent is not a vertex id")

    if 0 <= root < n:
        levels, broken = chain_to_root(parent, root)
        if parent[root] != root:
            levels[:] = UNREACHED
        fail(RULE_CHAIN, np.flatnonzero(broken & ~out_of_range), "parent chain does not reach the root")
    else:
        levels = np.full(n, UNREACHED, dtype=np.int64)

    not_edge = np.zeros(n, dtype=np.bool_)
    bad_level = np.zeros(n, dtype=np.bool_)
    missing = np.zeros(n, dtype=np.bool_)
    _edge_checks(graph.row_offsets, graph.col_indices, parent, levels, not_edge, bad_level, missing)
    fail(RULE_EDGE, np.flatnonzero(not_edge), "parent is not a neighbor")
    fail(RULE_LEVEL, np.flatnonzero(bad_level), "incident edge spans more than one level")
    fail(RULE_COMPONENT, np.flatnonzero(missing), "reachable vertex has no parent")

    reached = parent != UNSET
    return ValidationReport(
        passed=not failures,
        failures=failures,
        reached_count=int(reached.sum()),
        traversed_edge_count=int(graph.degrees[reached].sum() // 2),
        failure_counts=counts,
    )
