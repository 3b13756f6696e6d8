"""Undirected simple graphs: ingestion, synthetic generators, statistics.

Vertex ids are dense 0-based integers.  Edges are stored canonically as
(u, v) with u < v, lexicographically sorted and duplicate-free, so two
graphs compare equal iff their vertex counts and edge arrays match.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from fractions import Fraction
from typing import TextIO

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

STATS_CSV_HEADER = (
    "vertices,edges,components,min_deg,max_deg,mean_deg,"
    "min_cvert,max_cvert,mean_cvert"
)


class EdgeListParseError(ValueError):
    """Malformed edge-list input; message carries the offending line number."""


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable undirected simple graph.

    ``edges`` is an (m, 2) int64 array with u < v per row, sorted
    lexicographically, with no duplicates and no self-loops.
    """

    vertex_count: int
    edges: np.ndarray

    def __post_init__(self) -> None:
        if self.vertex_count < 0:
            raise ValueError("vertex_count must be non-negative")
        e = np.asarray(self.edges, dtype=np.int64).reshape(-1, 2)
        if e.size:
            if e.min() < 0 or e.max() >= self.vertex_count:
                raise ValueError("edge endpoint out of range")
            if np.any(e[:, 0] >= e[:, 1]):
                raise ValueError("edges must satisfy u < v (no self-loops)")
            order = np.lexsort((e[:, 1], e[:, 0]))
            e = e[order]
            if np.any(np.all(e[1:] == e[:-1], axis=1)):
                raise ValueError("duplicate edges")
        e.flags.writeable = False
        object.__setattr__(self, "edges", e)

    @property
    def edge_count(self) -> int:
        return self.edges.shape[0]

    def degrees(self) -> np.ndarray:
        return np.bincount(self.edges.ravel(), minlength=self.vertex_count)

    def adjacency(self) -> list[np.ndarray]:
        """Per-vertex sorted neighbor ids (derived, read-only view)."""
        n = self.vertex_count
        half = self.edges
        both = np.concatenate([half, half[:, ::-1]]) if half.size else half
        if not both.size:
            return [np.empty(0, dtype=np.int64) for _ in range(n)]
        order = np.lexsort((both[:, 1], both[:, 0]))
        both = both[order]
        starts = np.searchsorted(both[:, 0], np.arange(n + 1))
        return [both[starts[v]:starts[v + 1], 1] for v in range(n)]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.vertex_count == other.vertex_count and np.array_equal(
            self.edges, other.edges
        )

    def __hash__(self) -> int:
        return hash((self.vertex_count, self.edges.tobytes()))


def _canonicalize(pairs: np.ndarray) -> tuple[np.ndarray, int, int]:
    """Canonical u<v edge array plus (self_loops, duplicates) drop counts."""
    pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    keep = pairs[:, 0] != pairs[:, 1]
    self_loops = int(pairs.shape[0] - keep.sum())
    pairs = pairs[keep]
    lo = np.minimum(pairs[:, 0], pairs[:, 1])
    hi = np.maximum(pairs[:, 0], pairs[:, 1])
    canon = np.unique(np.stack([lo, hi], axis=1), axis=0) if pairs.size else pairs
    duplicates = int(pairs.shape[0] - canon.shape[0])
    return canon, self_loops, duplicates


@dataclass(frozen=True)
class EdgeListParse:
    """Parse outcome: the graph plus counts of silently dropped lines."""

    graph: Graph
    self_loops_dropped: int
    duplicates_dropped: int
    id_map: np.ndarray | None = None  # new id -> original id, when remapped


def parse_edge_list(
    source: str | TextIO, *, vertex_count: int | None = None, remap: bool = False
) -> EdgeListParse:
    """Parse whitespace-separated edge-list text.

    Lines starting with ``#`` are comments.  An optional header line
    ``|V| <n>`` fixes the vertex count; otherwise it is 1 + max id seen.
    Self-loops and duplicate edges are dropped and counted.  With
    ``remap=True`` sparse ids are compressed to a dense 0-based range and
    the mapping (new -> old) is returned.
    """
    stream = io.StringIO(source) if isinstance(source, str) else source
    pairs: list[tuple[int, int]] = []
    header = vertex_count
    saw_tokens = False
    for lineno, raw in enumerate(stream, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("|V|"):
            fields = line.split()
            if len(fields) != 2:
                raise EdgeListParseError(f"line {lineno}: malformed |V| header")
            try:
                declared = int(fields[1])
            except ValueError:
                raise EdgeListParseError(
                    f"line {lineno}: malformed |V| header"
                ) from None
            if declared < 0:
                raise EdgeListParseError(f"line {lineno}: negative |V| header")
            if header is None:
                header = declared
            saw_tokens = True
            continue
        fields = line.split()
        if len(fields) != 2:
            raise EdgeListParseError(
                f"line {lineno}: expected two vertex ids, got {len(fields)} tokens"
            )
        try:
            u, v = int(fields[0]), int(fields[1])
        except ValueError:
            raise EdgeListParseError(
                f"line {lineno}: non-integer vertex id"
            ) from None
        if u < 0 or v < 0:
            raise EdgeListParseError(f"line {lineno}: negative vertex id")
        pairs.append((u, v))
        saw_tokens = True
    if not saw_tokens:
        raise EdgeListParseError("empty edge-list input")

    arr = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    id_map = None
    if remap:
        id_map = np.unique(arr) if arr.size else np.empty(0, dtype=np.int64)
        arr = np.searchsorted(id_map, arr) if arr.size else arr
        n = int(id_map.shape[0])
        if header is not None and header != n:
            raise EdgeListParseError(
                f"|V| header {header} conflicts with {n} distinct remapped ids"
            )
    else:
        max_id = int(arr.max()) if arr.size else -1
        n = header if header is not None else max_id + 1
        if max_id >= n:
            raise EdgeListParseError(
                f"edge id {max_id} exceeds declared vertex count {n}"
            )
    canon, loops, dups = _canonicalize(arr)
    return EdgeListParse(Graph(n, canon), loops, dups, id_map)


def serialize_edge_list(g: Graph) -> str:
    """Round-trippable text form: ``|V|`` header then one edge per line."""
    lines = [f"|V| {g.vertex_count}"]
    lines.extend(f"{u} {v}" for u, v in g.edges.tolist())
    return "\n".join(lines) + "\n"


def gen_k5_cluster_graph(cluster_count: int, connected: bool = False) -> Graph:
    """``cluster_count`` disjoint K5 cliques; optionally chained.

    When ``connected``, vertex 0 of cluster i is linked to vertex 0 of
    cluster i+1 by a single edge, yielding one component.
    """
    if cluster_count < 1:
        raise ValueError("cluster_count must be >= 1")
    base = np.array(
        [(a, b) for a in range(5) for b in range(a + 1, 5)], dtype=np.int64
    )
    offsets = np.arange(cluster_count, dtype=np.int64)[:, None, None] * 5
    edges = (base[None, :, :] + offsets).reshape(-1, 2)
    if connected and cluster_count > 1:
        heads = np.arange(cluster_count - 1, dtype=np.int64) * 5
        chain = np.stack([heads, heads + 5], axis=1)
        edges = np.concatenate([edges, chain])
    return Graph(5 * cluster_count, edges)


def gen_binary_tree(depth: int) -> Graph:
    """Complete binary tree, root at depth 0; 2^(depth+1) - 1 vertices."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    n = (1 << (depth + 1)) - 1
    internal = np.arange((1 << depth) - 1, dtype=np.int64)
    edges = np.concatenate(
        [
            np.stack([internal, 2 * internal + 1], axis=1),
            np.stack([internal, 2 * internal + 2], axis=1),
        ]
    )
    return Graph(n, edges)


@dataclass(frozen=True)
class GraphStats:
    vertex_count: int
    edge_count: int
    component_count: int
    min_degree: int
    max_degree: int
    mean_degree: Fraction
    min_component_size: int
    max_component_size: int
    mean_component_size: Fraction

    def to_csv(self) -> str:
        row = (
            f"{self.vertex_count},{self.edge_count},{self.component_count},"
            f"{self.min_degree},{self.max_degree},{float(self.mean_degree)!r},"
            f"{self.min_component_size},{self.max_component_size},"
            f"{float(self.mean_component_size)!r}"
        )
        return f"{STATS_CSV_HEADER}\n{row}\n"


def graph_stats(g: Graph) -> GraphStats:
    """Exact degree and connected-component statistics."""
    n = g.vertex_count
    if n == 0:
        raise ValueError("graph_stats requires at least one vertex")
    deg = g.degrees()
    if g.edge_count:
        mat = coo_matrix(
            (np.ones(g.edge_count, dtype=np.int8), (g.edges[:, 0], g.edges[:, 1])),
            shape=(n, n),
        )
        n_comp, labels = connected_components(mat, directed=False)
        sizes = np.bincount(labels, minlength=n_comp)
    else:
        n_comp = n
        sizes = np.ones(n, dtype=np.int64)
    return GraphStats(
        vertex_count=n,
        edge_count=g.edge_count,
        component_count=int(n_comp),
        min_degree=int(deg.min()),
        max_degree=int(deg.max()),
        mean_degree=Fraction(2 * g.edge_count, n),
        min_component_size=int(sizes.min()),
        max_component_size=int(sizes.max()),
        mean_component_size=Fraction(n, int(n_comp)),
    )
