"""Split a labeled graph into low- and high-information subgraphs."""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from .fisher import NodeInformation
from .graph import LabeledGraph, induced_subgraph

log = logging.getLogger(__name__)


def quantile_threshold(scores, p: float) -> float:
    """Nearest-rank quantile: the ``ceil(p*n)``-th smallest score."""
    s = np.sort(np.asarray(scores, dtype=float))
    if len(s) == 0:
        raise ValueError("cannot take a quantile of an empty score list")
    if not 0 < p < 1:
        raise ValueError("quantile must lie strictly between 0 and 1")
    k = max(math.ceil(p * len(s)) - 1, 0)
    return float(s[k])


@dataclass(frozen=True, eq=False)
class Decomposition:
    threshold: float
    quantile: float
    low_nodes: np.ndarray
    high_nodes: np.ndarray
    l_subgraph: LabeledGraph
    h_subgraph: LabeledGraph

    @property
    def is_high(self) -> np.ndarray:
        n = len(self.low_nodes) + len(self.high_nodes)
        mask = np.zeros(n, dtype=bool)
        mask[self.high_nodes] = True
        return mask


def split_by_threshold(scores, p: float = 0.75):
    """Return ``(T, low, high)`` with high = {i : score_i >= T}."""
    scores = np.asarray(scores, dtype=float)
    T = quantile_threshold(scores, p)
    high = np.flatnonzero(scores >= T)
    low = np.flatnonzero(scores < T)
    if np.all(scores == scores[0]):
        # a constant field has no distinguished nodes
        high, low = high[:0], np.arange(len(scores))
    return T, low, high


def lohi_decompose(g: LabeledGraph, info: NodeInformation, p: float = 0.75) -> Decomposition:
    if not 0 < p < 1:
        raise ValueError("quantile must lie strictly between 0 and 1")
    if len(info) != g.node_count:
        raise ValueError("node information does not cover every node")
    if g.node_count == 0:
        raise ValueError("cannot decompose an empty graph")
    T, low, high = split_by_threshold(info.shape_normalized, p)
    if len(high) == 0:
        log.warning("all scores equal; every node assigned to the low-information subgraph")
    return Decomposition(T, p, low, high, induced_subgraph(g, low), induced_subgraph(g, high))
