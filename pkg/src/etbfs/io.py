"""Graph and BFS-tree file formats.

Binary graph (``.etg``): magic ``ETG1``, then little-endian u64 vertex_count,
u64 edge_count, and edge_count (src, dst) pairs of little-endian u64.

Text graph: one ``src dst`` pair per line; ``#`` starts a comment. A
``# vertices N`` comment sets the vertex count, otherwise it is inferred.

Binary tree (``.ett``): magic ``ETT1``, little-endian u64 root, u64
vertex_count, then vertex_count little-endian i64 parents (-1 = unset).
"""

from __future__ import annotations

import re
from pathlib import Path

import numpy as np

from etbfs.graph import BfsTree, GraphError, RawEdgeList

GRAPH_MAGIC = b"ETG1"
TREE_MAGIC = b"ETT1"
_HEADER = 4 + 8 + 8
_VERTICES_RE = re.compile(r"#\s*vertices[:\s]\s*(\d+)", re.IGNORECASE)


class GraphFormatError(GraphError):
    def __init__(self, message, *, offset=None, line=None):
        where = f" at byte offset {offset}" if offset is not None else f" at line {line}"
        super().__init__(message + where)
        self.offset = offset
        self.line = line


def infer_format(path) -> str:
    return "binary" if Path(path).suffix in (".etg", ".bin") else "text"


def encode_graph(edges: RawEdgeList) -> bytes:
    header = GRAPH_MAGIC + np.array([edges.vertex_count, len(edges)], dtype="<u8").tobytes()
    body = np.empty((len(edges), 2), dtype="<u8")
    body[:, 0] = edges.src
    body[:, 1] = edges.dst
    return header + body.tobytes()


def decode_graph(data: bytes) -> RawEdgeList:
    if data[:4] != GRAPH_MAGIC:
        raise GraphFormatError(f"bad magic {data[:4]!r}", offset=0)
    if len(data) < _HEADER:
        raise GraphFormatError("truncated header", offset=len(data))
    n, m = (int(x) for x in np.frombuffer(data, dtype="<u8", count=2, offset=4))
    need = _HEADER + 16 * m
    if len(data) < need:
        complete = (len(data) - _HEADER) // 16
        raise GraphFormatError(f"truncated after {complete} of {m} edges", offset=_HEADER + 16 * complete)
    pairs = np.frombuffer(data, dtype="<u8", count=2 * m, offset=_HEADER).reshape(m, 2)
    bad = (pairs >= n).any(axis=1)
    if bad.any():
        i = int(np.argmax(bad))
        raise GraphFormatError(f"edge {i} endpoint >= vertex count {n}", offset=_HEADER + 16 * i)
    return RawEdgeList(pairs[:, 0].astype(np.int64), pairs[:, 1].astype(np.int64), n)


def parse_text(text: str, vertex_count: int | None = None) -> RawEdgeList:
    src, dst = [], []
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _VERTICES_RE.match(line)
            if m and vertex_count is None:
                vertex_count = int(m.group(1))
            continue
        parts = line.split("#", 1)[0].split()
        if len(parts) != 2:
            raise GraphFormatError(f"expected 'src dst', got {raw!r}", line=lineno)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(f"non-integer endpoint in {raw!r}", line=lineno) from None
        if u < 0 or v < 0:
            raise GraphFormatError(f"negative endpoint in {raw!r}", line=lineno)
        src.append(u)
        dst.append(v)
        lines.append(lineno)
    if vertex_count is None:
        vertex_count = max(max(src, default=-1), max(dst, default=-1)) + 1
    for u, v, lineno in zip(src, dst, lines):
        if u >= vertex_count or v >= vertex_count:
            raise GraphFormatError(f"endpoint >= vertex count {vertex_count}", line=lineno)
    return RawEdgeList(np.array(src, dtype=np.int64), np.array(dst, dtype=np.int64), vertex_count)


def format_text(edges: RawEdgeList) -> str:
    body = "".join(f"{u} {v}\n" for u, v in zip(edges.src.tolist(), edges.dst.tolist()))
    return f"# vertices {edges.vertex_count}\n" + body


def write_graph(path, edges: RawEdgeList, format: str | None = None) -> None:
    format = format or infer_format(path)
    if format == "binary":
        Path(path).write_bytes(encode_graph(edges))
    elif format == "text":
        Path(path).write_text(format_text(edges))
    else:
        raise ValueError(f"unknown graph format {format!r}")


def read_graph(path, format: str | None = None, vertex_count: int | None = None) -> RawEdgeList:
    format = format or infer_format(path)
    if format == "binary":
        return decode_graph(Path(path).read_bytes())
    if format == "text":
        return parse_text(Path(path).read_text(), vertex_count)
    raise ValueError(f"unknown graph format {format!r}")


def write_tree(path, tree: BfsTree) -> None:
    header = TREE_MAGIC + np.array([tree.root, tree.parent.size], dtype="<u8").tobytes()
    Path(path).write_bytes(header + np.asarray(tree.parent, dtype="<i8").tobytes())


def read_tree(path) -> BfsTree:
    data = Path(path).read_bytes()
    if data[:4] != TREE_MAGIC:
        raise GraphFormatError(f"bad magic {data[:4]!r}", offset=0)
    if len(data) < _HEADER:
        raise GraphFormatError("truncated header", offset=len(data))
    root, n = (int(x) for x in np.frombuffer(data, dtype="<u8", count=2, offset=4))
    if len(data) < _HEADER + 8 * n:
        raise GraphFormatError(f"truncated parent array ({n} entries expected)", offset=len(data))
    parent = np.frombuffer(data, dtype="<i8", count=n, offset=_HEADER).astype(np.int64)
    return BfsTree(parent, root)
