"""Partition quality: modularity, coverage, performance and conductance.

A partition is given as an integer community id per node (any ids; they need
not be contiguous). Coverage, performance and conductance count edges.
Modularity uses the graph's edge weights when it has them and ``weighted`` is
left on; pass ``weighted=False`` for the plain edge-count version.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .graph import Graph, LabeledGraph, induced_subgraph, node_set


def _labels(g: Graph, partition) -> np.ndarray:
    lab = np.asarray(partition)
    if lab.shape != (g.node_count,):
        raise ValueError(f"partition must assign all {g.node_count} nodes")
    return lab


def _intra_mask(g: Graph, lab: np.ndarray) -> np.ndarray:
    e = g.edges
    return lab[e[:, 0]] == lab[e[:, 1]]


def modularity(g: Graph, partition, weighted: bool = True) -> float:
    """Newman modularity  sum_c [ e_c / m - (d_c / 2m)^2 ]."""
    lab = _labels(g, partition)
    if g.edge_count == 0:
        raise ValueError("modularity is undefined on an edgeless graph")
    w = g.weights if (weighted and g.weights is not None) else np.ones(g.edge_count)
    total = w.sum()
    if total <= 0:
        raise ValueError("total edge weight must be positive")
    e = g.edges
    _, comm = np.unique(lab, return_inverse=True)
    same = _intra_mask(g, lab)
    intra = np.bincount(comm[e[same, 0]], weights=w[same], minlength=comm.max() + 1)
    strength = np.bincount(comm[e[:, 0]], weights=w, minlength=comm.max() + 1) \
        + np.bincount(comm[e[:, 1]], weights=w, minlength=comm.max() + 1)
    return float(np.sum(intra / total - (strength / (2 * total)) ** 2))


def coverage(g: Graph, partition) -> float:
    lab = _labels(g, partition)
    if g.edge_count == 0:
        raise ValueError("coverage is undefined on an edgeless graph")
    return float(_intra_mask(g, lab).sum() / g.edge_count)


def performance(g: Graph, partition) -> float:
    """(intra-community edges + inter-community non-edges) / (n choose 2)."""
    lab = _labels(g, partition)
    n = g.node_count
    if n < 2:
        raise ValueError("performance needs at least two nodes")
    _, sizes = np.unique(lab, return_counts=True)
    intra_pairs = int((sizes * (sizes - 1) // 2).sum())
    total_pairs = n * (n - 1) // 2
    intra_edges = int(_intra_mask(g, lab).sum())
    inter_edges = g.edge_count - intra_edges
    inter_non_edges = (total_pairs - intra_pairs) - inter_edges
    return (intra_edges + inter_non_edges) / total_pairs


def cut_size(g: Graph, s) -> int:
    inside = np.zeros(g.node_count, dtype=bool)
    inside[node_set(g, s)] = True
    e = g.edges
    return int((inside[e[:, 0]] != inside[e[:, 1]]).sum())


def conductance(g: Graph, s) -> float:
    """cut(s, rest) / min(vol(s), vol(rest)); NaN when the smaller volume is 0."""
    s = node_set(g, s)
    if len(s) == 0 or len(s) == g.node_count:
        raise ValueError("conductance needs both sides of the cut to be non-empty")
    deg = g.degrees
    vol_s = int(deg[s].sum())
    vol_rest = int(deg.sum()) - vol_s
    denom = min(vol_s, vol_rest)
    if denom == 0:
        return math.nan
    return cut_size(g, s) / denom


def pair_conductance(g: Graph, a, b, convention: str = "full") -> float:
    """Conductance between two disjoint node groups.

    ``full``: edges between a and b over min(vol(a), vol(b)) with volumes
    measured in the whole graph. ``induced``: conductance of a inside the
    subgraph induced by a | b.
    """
    a, b = node_set(g, a), node_set(g, b)
    if convention == "induced":
        union = np.union1d(a, b)
        sub = induced_subgraph(LabeledGraph(g, np.ones(g.node_count, np.int64), 2), union).graph
        return conductance(sub, np.searchsorted(union, a))
    if convention != "full":
        raise ValueError(f"unknown conductance convention {convention!r}")
    in_a = np.zeros(g.node_count, bool)
    in_b = np.zeros(g.node_count, bool)
    in_a[a] = True
    in_b[b] = True
    e = g.edges
    between = int(((in_a[e[:, 0]] & in_b[e[:, 1]]) | (in_b[e[:, 0]] & in_a[e[:, 1]])).sum())
    denom = min(int(g.degrees[a].sum()), int(g.degrees[b].sum()))
    if denom == 0:
        return math.nan
    return between / denom


def max_pairwise_community_conductance(g: Graph, partition, convention: str = "full") -> float:
    lab = _labels(g, partition)
    comms = np.unique(lab)
    if len(comms) < 2:
        raise ValueError("need at least two communities")
    best = 0.0
    for ca, cb in itertools.combinations(comms, 2):
        c = pair_conductance(g, np.flatnonzero(lab == ca), np.flatnonzero(lab == cb), convention)
        if not math.isnan(c):
            best = max(best, c)
    return best


@dataclass(frozen=True)
class PartitionReport:
    nodes: int
    edges: int
    communities: int
    modularity: Optional[float]
    coverage: Optional[float]
    performance: Optional[float]
    conductance_pairwise_max: Optional[float]
    conductance_lh: Optional[float] = None

    def to_dict(self) -> dict:
        return asdict(self)


def partition_report(g: Graph, partition, weighted: bool = True,
                     pairwise_convention: str = "full") -> PartitionReport:
    """All metrics for one (graph, partition) pair; undefined ones are None."""
    lab = _labels(g, partition)
    k = len(np.unique(lab))
    has_edges = g.edge_count > 0
    mod = modularity(g, lab, weighted) if has_edges else None
    cov = coverage(g, lab) if has_edges else None
    perf = performance(g, lab) if g.node_count >= 2 else None
    pair = max_pairwise_community_conductance(g, lab, pairwise_convention) if k >= 2 and has_edges else None
    return PartitionReport(g.node_count, g.edge_count, k, mod, cov, perf, pair)
