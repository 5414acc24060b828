"""Greedy agglomerative modularity maximization (Clauset, Newman and Moore)."""
from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .graph import Graph, LabeledGraph


@dataclass(frozen=True, eq=False)
class Partition:
    """Community id in ``1..q`` for every node."""

    labels: np.ndarray
    q: int

    @classmethod
    def from_groups(cls, n: int, groups) -> "Partition":
        labels = np.zeros(n, dtype=np.int64)
        for c, members in enumerate(groups, start=1):
            labels[np.asarray(list(members), dtype=np.int64)] = c
        if n and labels.min() == 0:
            raise ValueError("groups do not cover every node")
        return cls(labels, len(groups))

    def groups(self) -> list:
        return [np.flatnonzero(self.labels == c) for c in range(1, self.q + 1)]


def detect_communities_cnm(g: Graph) -> Partition:
    """Merge the pair of adjacent communities with the largest modularity gain
    until no merge has a positive gain.

    For communities a, b with k_ab edges between them and degree sums d_a, d_b
    the gain is (2 m k_ab - d_a d_b) / (2 m^2), so comparisons are done on
    the integer numerator and ties are exact; they go to the lexicographically
    smallest (a, b). A merged community keeps the smaller id.
    """
    if g.edge_count == 0:
        raise ValueError("modularity is undefined on an edgeless graph")
    two_m = 2 * g.edge_count
    deg = {i: int(d) for i, d in enumerate(g.degrees)}
    links: dict[int, dict[int, int]] = {i: {} for i in range(g.node_count)}
    for a, b in g.edges:
        a, b = int(a), int(b)
        links[a][b] = 1
        links[b][a] = 1
    members = {i: [i] for i in range(g.node_count)}

    def gain(a, b):
        return two_m * links[a][b] - deg[a] * deg[b]

    heap = []
    for a, nbrs in links.items():
        for b in nbrs:
            if a < b:
                heap.append((-gain(a, b), a, b))
    heapq.heapify(heap)

    while heap:
        neg, a, b = heapq.heappop(heap)
        if a not in members or b not in members or b not in links[a]:
            continue
        if -neg != gain(a, b):
            continue  # stale entry; the current value was pushed when it changed
        if -neg <= 0:
            break
        # merge b into a (a < b)
        for c, k in links.pop(b).items():
            del links[c][b]
            if c == a:
                continue
            links[a][c] = links[a].get(c, 0) + k
            links[c][a] = links[a][c]
        deg[a] += deg.pop(b)
        members[a].extend(members.pop(b))
        for c in links[a]:
            lo, hi = min(a, c), max(a, c)
            heapq.heappush(heap, (-gain(lo, hi), lo, hi))

    groups = sorted((sorted(m) for m in members.values()), key=lambda m: m[0])
    return Partition.from_groups(g.node_count, groups)


def partition_to_labels(p: Partition, g: Graph) -> LabeledGraph:
    if len(p.labels) != g.node_count:
        raise ValueError("partition does not cover every node")
    if p.q < 2:
        raise ValueError("a single community cannot be analysed as a Potts field (q >= 2 required)")
    return LabeledGraph(g, p.labels, p.q)
