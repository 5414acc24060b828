"""Bundled example data and synthetic stand-ins for unavailable networks.

Networks: ``karate`` (with interaction counts as edge weights), ``lesmis``,
``florentine``, ``davis``. Feature tables: ``iris``, ``wine``,
``breast_cancer``, ``digits``.

Several common benchmark networks (football, dolphins, ...) are not bundled.
:func:`surrogate_network` draws a planted-partition graph with the same node
count, edge count and community count, and the published intra-community edge
fraction, for smoke-testing the pipeline at realistic sizes.
"""
from __future__ import annotations

from importlib import resources

import numpy as np

from .graph import Graph
from .ingest import FeatureMatrix, read_edge_list, read_feature_csv

NETWORKS = ("karate", "lesmis", "florentine", "davis")
FEATURE_SETS = ("iris", "wine", "breast_cancer", "digits")

# nodes, edges, communities, coverage of the community labeling
SURROGATES = {
    "football": (115, 613, 6, 0.738),
    "dolphins": (62, 154, 4, 0.823),
    "political_books": (105, 441, 4, 0.918),
    "soccer": (35, 118, 5, 0.449),
    "usair97": (332, 2126, 7, 0.769),
    "bio_celegans": (453, 2025, 10, 0.677),
    "bio_diseasome": (516, 1188, 24, 0.922),
    "eco_everglades": (69, 885, 3, 0.541),
}


def data_path(filename: str):
    return resources.files("lohi").joinpath("data", filename)


def load_network(name: str) -> Graph:
    if name not in NETWORKS:
        raise KeyError(f"unknown network {name!r}; bundled: {', '.join(NETWORKS)}")
    with resources.as_file(data_path(f"{name}.edges")) as p:
        return read_edge_list(p)


def load_features(name: str) -> FeatureMatrix:
    if name not in FEATURE_SETS:
        raise KeyError(f"unknown feature set {name!r}; bundled: {', '.join(FEATURE_SETS)}")
    with resources.as_file(data_path(f"{name}.csv")) as p:
        return read_feature_csv(p, "class")


def planted_partition(n: int, m: int, k: int, intra_fraction: float, seed: int = 0) -> Graph:
    """Exactly ``m`` edges, ``round(intra_fraction * m)`` of them inside the ``k``
    near-equal blocks, each class drawn uniformly without replacement."""
    rng = np.random.default_rng(seed)
    block = np.arange(n) * k // n
    iu, ju = np.triu_indices(n, 1)
    same = block[iu] == block[ju]
    intra_pairs, inter_pairs = np.flatnonzero(same), np.flatnonzero(~same)
    m_in = int(round(intra_fraction * m))
    m_in = min(m_in, len(intra_pairs))
    m_out = min(m - m_in, len(inter_pairs))
    pick = np.concatenate([rng.choice(intra_pairs, m_in, replace=False),
                           rng.choice(inter_pairs, m_out, replace=False)])
    return Graph.from_edges(n, np.stack([iu[pick], ju[pick]], 1))


def surrogate_network(name: str, seed: int = 0) -> Graph:
    n, m, k, cov = SURROGATES[name]
    return planted_partition(n, m, k, cov, seed)
