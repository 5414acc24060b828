"""Undirected simple graphs and Potts-labeled graphs.

Graphs are stored in CSR form (``indptr``/``indices``) and are immutable after
construction. Node ids are dense integers ``0..n-1``; the original string
names, when the graph came from a file, live in ``Graph.names``.

A :class:`LabeledGraph` adds one label in ``1..q`` per node and, optionally, a
neighborhood system that differs from the adjacency (used for k-NN data,
where each node's Potts neighborhood is its own k nearest neighbors).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np


class GraphError(ValueError):
    """Invalid node id, malformed edge set or inconsistent labeling."""


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


def _csr_from_pairs(n: int, rows: np.ndarray, cols: np.ndarray):
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.add.at(indptr, rows + 1, 1)
    return np.cumsum(indptr), cols.astype(np.int64)


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph.

    ``edges`` is an ``(m, 2)`` array of pairs with ``i < j`` sorted
    lexicographically. ``weights`` (aligned with ``edges``) is optional and is
    only consulted by weighted modularity. ``parent_ids`` maps each node of an
    induced subgraph back to its id in the graph it was cut from.
    """

    node_count: int
    edges: np.ndarray
    indptr: np.ndarray
    indices: np.ndarray
    weights: Optional[np.ndarray] = None
    names: Optional[tuple] = None
    parent_ids: Optional[np.ndarray] = None
    dropped_self_loops: int = field(default=0, compare=False)
    dropped_duplicates: int = field(default=0, compare=False)

    @classmethod
    def from_edges(
        cls,
        node_count: int,
        edges: Iterable[Sequence[int]],
        weights: Optional[Iterable[float]] = None,
        names: Optional[Sequence[str]] = None,
    ) -> "Graph":
        """Build a graph, silently dropping self-loops and repeated pairs.

        When a pair repeats, the first occurrence (and its weight) wins. The
        number of dropped entries is kept in ``dropped_self_loops`` and
        ``dropped_duplicates``.
        """
        if node_count < 0:
            raise GraphError("node_count must be nonnegative")
        e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
        e = e.reshape(-1, 2)
        w = None if weights is None else np.asarray(list(weights), dtype=float).reshape(-1)
        if w is not None and len(w) != len(e):
            raise GraphError("weights must align with edges")
        if len(e) and (e.min() < 0 or e.max() >= node_count):
            raise GraphError(f"edge endpoint out of range for {node_count} nodes")
        if names is not None and len(names) != node_count:
            raise GraphError("names must have one entry per node")

        loops = e[:, 0] == e[:, 1]
        n_loops = int(loops.sum())
        e, w = e[~loops], (None if w is None else w[~loops])
        lo, hi = np.minimum(e[:, 0], e[:, 1]), np.maximum(e[:, 0], e[:, 1])
        keys = lo * max(node_count, 1) + hi
        _, first = np.unique(keys, return_index=True)
        n_dup = len(e) - len(first)
        first = np.sort(first)
        pairs = np.stack([lo[first], hi[first]], axis=1) if len(first) else np.zeros((0, 2), np.int64)
        order = np.lexsort((pairs[:, 1], pairs[:, 0]))
        pairs = pairs[order]
        if w is not None:
            w = w[first][order]

        rows = np.concatenate([pairs[:, 0], pairs[:, 1]])
        cols = np.concatenate([pairs[:, 1], pairs[:, 0]])
        indptr, indices = _csr_from_pairs(node_count, rows, cols)
        return cls(
            node_count=int(node_count),
            edges=_frozen(pairs),
            indptr=_frozen(indptr),
            indices=_frozen(indices),
            weights=None if w is None else _frozen(w),
            names=None if names is None else tuple(str(s) for s in names),
            dropped_self_loops=n_loops,
            dropped_duplicates=int(n_dup),
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def check_node(self, i: int) -> int:
        if not 0 <= int(i) < self.node_count:
            raise GraphError(f"node id {i} out of range for {self.node_count} nodes")
        return int(i)

    def neighbors(self, i: int) -> np.ndarray:
        i = self.check_node(i)
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def degree(self, i: int) -> int:
        i = self.check_node(i)
        return int(self.indptr[i + 1] - self.indptr[i])

    def has_edge(self, i: int, j: int) -> bool:
        nb = self.neighbors(i)
        k = np.searchsorted(nb, j)
        return bool(k < len(nb) and nb[k] == j)

    def name(self, i: int) -> str:
        return self.names[i] if self.names is not None else str(i)

    def edge_set(self) -> set:
        return {(int(a), int(b)) for a, b in self.edges}


def node_set(g: Graph, ids: Iterable[int]) -> np.ndarray:
    """Sorted, deduplicated node ids validated against ``g``."""
    s = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64))
    if len(s) and (s[0] < 0 or s[-1] >= g.node_count):
        raise GraphError(f"node id out of range for {g.node_count} nodes")
    return s


def volume(g: Graph, s: Iterable[int]) -> int:
    """Sum of degrees over the node set ``s``."""
    s = node_set(g, s)
    return int(g.degrees[s].sum())


@dataclass(frozen=True, eq=False)
class LabeledGraph:
    """A graph plus one Potts label in ``1..q`` per node.

    ``nb_indptr``/``nb_indices`` optionally override the neighborhood system
    used for the Potts statistics; by default it is the graph adjacency.
    """

    graph: Graph
    labels: np.ndarray
    q: int
    nb_indptr: Optional[np.ndarray] = None
    nb_indices: Optional[np.ndarray] = None

    def __post_init__(self):
        labels = np.asarray(self.labels, dtype=np.int64)
        if labels.shape != (self.graph.node_count,):
            raise GraphError(
                f"expected {self.graph.node_count} labels, got {labels.size}")
        if self.q < 2:
            raise GraphError("q must be at least 2 (a single state carries no Potts structure)")
        if labels.size and (labels.min() < 1 or labels.max() > self.q):
            raise GraphError(f"labels must lie in 1..{self.q}")
        object.__setattr__(self, "labels", _frozen(labels))
        if (self.nb_indptr is None) != (self.nb_indices is None):
            raise GraphError("neighborhood needs both indptr and indices")
        if self.nb_indptr is not None:
            ptr = np.asarray(self.nb_indptr, dtype=np.int64)
            idx = np.asarray(self.nb_indices, dtype=np.int64)
            if len(ptr) != self.graph.node_count + 1 or ptr[-1] != len(idx):
                raise GraphError("malformed neighborhood system")
            if len(idx) and (idx.min() < 0 or idx.max() >= self.graph.node_count):
                raise GraphError("neighborhood refers to unknown nodes")
            object.__setattr__(self, "nb_indptr", _frozen(ptr))
            object.__setattr__(self, "nb_indices", _frozen(idx))

    @classmethod
    def with_neighborhoods(cls, graph: Graph, labels, q: int, neighborhoods: Sequence[Sequence[int]]):
        """Attach an explicit per-node neighbor list (e.g. directed k-NN)."""
        if len(neighborhoods) != graph.node_count:
            raise GraphError("one neighborhood per node is required")
        lens = np.array([len(nb) for nb in neighborhoods], dtype=np.int64)
        ptr = np.concatenate([[0], np.cumsum(lens)])
        idx = np.concatenate([np.asarray(nb, dtype=np.int64) for nb in neighborhoods]) if len(lens) and lens.sum() else np.zeros(0, np.int64)
        return cls(graph, labels, q, ptr, idx)

    @property
    def node_count(self) -> int:
        return self.graph.node_count

    @property
    def has_custom_neighborhood(self) -> bool:
        return self.nb_indptr is not None

    def _nb(self):
        if self.nb_indptr is None:
            return self.graph.indptr, self.graph.indices
        return self.nb_indptr, self.nb_indices

    def neighborhood(self, i: int) -> np.ndarray:
        i = self.graph.check_node(i)
        ptr, idx = self._nb()
        return idx[ptr[i]:ptr[i + 1]]

    def histograms(self) -> np.ndarray:
        """``(n, q)`` matrix whose row i counts neighbors of i per label."""
        ptr, idx = self._nb()
        n = self.node_count
        rows = np.repeat(np.arange(n), np.diff(ptr))
        U = np.zeros((n, self.q), dtype=np.int64)
        np.add.at(U, (rows, self.labels[idx] - 1), 1)
        return U


def neighbor_histogram(g: LabeledGraph, i: int) -> np.ndarray:
    """Counts of node ``i``'s neighbors carrying each label ``1..q``."""
    nb = g.neighborhood(i)
    return np.bincount(g.labels[nb] - 1, minlength=g.q).astype(np.int64)


def induced_subgraph(g: LabeledGraph, s: Iterable[int]) -> LabeledGraph:
    """Subgraph on the node set ``s`` with every edge of ``g`` inside ``s``.

    Nodes are renumbered in increasing order of their old id;
    ``result.graph.parent_ids[new] == old``. Names, edge weights and a custom
    neighborhood system are restricted along with the labels.
    """
    G = g.graph
    keep = node_set(G, s)
    remap = np.full(G.node_count, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))

    e = G.edges
    inside = (remap[e[:, 0]] >= 0) & (remap[e[:, 1]] >= 0) if len(e) else np.zeros(0, bool)
    sub_edges = remap[e[inside]] if len(e) else np.zeros((0, 2), np.int64)
    sub_w = None if G.weights is None else G.weights[inside]
    names = None if G.names is None else [G.names[i] for i in keep]
    sub = Graph.from_edges(len(keep), sub_edges, sub_w, names)
    object.__setattr__(sub, "parent_ids", _frozen(keep.copy()))

    if not g.has_custom_neighborhood:
        return LabeledGraph(sub, g.labels[keep], g.q)
    nbs = []
    for old in keep:
        nb = remap[g.neighborhood(old)]
        nbs.append(nb[nb >= 0])
    return LabeledGraph.with_neighborhoods(sub, g.labels[keep], g.q, nbs)
