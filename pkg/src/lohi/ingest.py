"""Reading and writing graphs, labels and feature tables; k-NN graph construction.

File formats
------------
Edge list
    One edge per line, two whitespace- or comma-separated node names and an
    optional third numeric column (edge weight). Lines starting with ``#`` are
    comments, except ``# node: NAME`` which declares a (possibly isolated)
    node so that subgraphs survive a write/read round trip.
Labels
    Either ``NAME LABEL`` pairs, or one label per line in node order.
Neighborhoods
    ``NAME NB1 NB2 ...`` per line: the Potts neighborhood of each node when it
    differs from the adjacency (directed k-NN lists).
Feature CSV
    Header row required; the class column is picked by name, every other
    column must be numeric.
"""
from __future__ import annotations

import csv
import logging
import re
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .graph import Graph, GraphError, LabeledGraph

log = logging.getLogger(__name__)

NODE_PRAGMA = re.compile(r"^#\s*node:\s*(\S+)\s*$")


class IngestError(ValueError):
    """Unreadable or malformed input data."""


class MissingColumnError(IngestError):
    """A requested CSV column does not exist."""


@dataclass(frozen=True)
class IngestionReport:
    nodes: int
    edges_read: int
    edges: int
    self_loops_dropped: int
    duplicates_dropped: int
    weighted: bool
    q: Optional[int] = None

    def to_dict(self) -> dict:
        return asdict(self)


def ingestion_report(g: Graph, q: Optional[int] = None) -> IngestionReport:
    return IngestionReport(
        nodes=g.node_count,
        edges_read=g.edge_count + g.dropped_self_loops + g.dropped_duplicates,
        edges=g.edge_count,
        self_loops_dropped=g.dropped_self_loops,
        duplicates_dropped=g.dropped_duplicates,
        weighted=g.weights is not None,
        q=q,
    )


def _split(line: str, fmt: str) -> list:
    if fmt == "csv":
        return [t.strip() for t in line.split(",") if t.strip()]
    if fmt == "whitespace":
        return line.split()
    return [t for t in re.split(r"[,\s]+", line) if t]


def _read_lines(path):
    try:
        with open(path, encoding="utf-8") as fh:
            return fh.read().splitlines()
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc


def read_edge_list(path, format: str = "auto", keep_weights: bool = True) -> Graph:
    """Parse an edge list into a simple undirected graph.

    Node names get dense ids in order of first appearance. Self-loops and
    repeated pairs are dropped and counted on the returned graph.
    """
    if format not in ("auto", "whitespace", "csv"):
        raise ValueError(f"unknown edge-list format {format!r}")
    ids: dict[str, int] = {}
    pairs, weights = [], []
    weighted = None

    def nid(name):
        if name not in ids:
            ids[name] = len(ids)
        return ids[name]

    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = NODE_PRAGMA.match(line)
            if m:
                nid(m.group(1))
            continue
        tok = _split(line, format)
        if len(tok) < 2:
            raise IngestError(f"{path}:{lineno}: expected two node names, got {line!r}")
        has_w = len(tok) >= 3
        if weighted is None:
            weighted = has_w
        elif weighted != has_w:
            raise IngestError(f"{path}:{lineno}: weight column present on some lines only")
        if has_w:
            try:
                weights.append(float(tok[2]))
            except ValueError:
                raise IngestError(f"{path}:{lineno}: weight {tok[2]!r} is not a number") from None
        pairs.append((nid(tok[0]), nid(tok[1])))

    if not pairs:
        raise IngestError(f"{path}: no edges")
    if weighted and not keep_weights:
        log.warning("%s: edge weights discarded", path)
    w = weights if (weighted and keep_weights) else None
    names = sorted(ids, key=ids.get)
    return Graph.from_edges(len(ids), pairs, w, names)


def remap_labels(raw) -> tuple[np.ndarray, int]:
    """Map arbitrary label values onto 1..q.

    Integer-valued labels keep their numeric order; anything else is
    numbered by first appearance.
    """
    raw = [str(r) for r in raw]
    try:
        distinct = sorted(set(raw), key=lambda s: (float(s), s))
    except ValueError:
        distinct = list(dict.fromkeys(raw))
    code = {v: i + 1 for i, v in enumerate(distinct)}
    return np.array([code[r] for r in raw], dtype=np.int64), len(distinct)


def labels_from_values(g: Graph, raw) -> LabeledGraph:
    labels, q = remap_labels(raw)
    if q < 2:
        raise IngestError("all nodes share one label; at least two states are required")
    return LabeledGraph(g, labels, q)


def read_labels(path, g: Graph) -> LabeledGraph:
    rows = []
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if line and not line.startswith("#"):
            rows.append((lineno, _split(line, "auto")))
    if not rows:
        raise IngestError(f"{path}: no labels")

    widths = {len(t) for _, t in rows}
    if widths == {2}:
        by_name = {}
        index = {g.name(i): i for i in range(g.node_count)}
        for lineno, (name, lab) in rows:
            if name not in index:
                raise IngestError(f"{path}:{lineno}: unknown node {name!r}")
            by_name[name] = lab
        missing = [n for n in index if n not in by_name]
        if missing:
            raise IngestError(f"{path}: no label for node(s) {', '.join(missing[:5])}")
        values = [by_name[g.name(i)] for i in range(g.node_count)]
    elif widths == {1} or len(rows) == 1:
        values = [t for _, toks in rows for t in toks]
        if len(values) != g.node_count:
            raise IngestError(f"{path}: {len(values)} labels for {g.node_count} nodes")
    else:
        raise IngestError(f"{path}: mix of 'name label' pairs and bare labels")
    return labels_from_values(g, values)


def read_neighborhoods(path, g: Graph) -> list:
    index = {g.name(i): i for i in range(g.node_count)}
    nbs: dict[int, list] = {}
    for lineno, raw in enumerate(_read_lines(path), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tok = _split(line, "auto")
        try:
            ids = [index[t] for t in tok]
        except KeyError as exc:
            raise IngestError(f"{path}:{lineno}: unknown node {exc.args[0]!r}") from None
        nbs[ids[0]] = ids[1:]
    missing = [g.name(i) for i in range(g.node_count) if i not in nbs]
    if missing:
        raise IngestError(f"{path}: no neighborhood for node(s) {', '.join(missing[:5])}")
    return [nbs[i] for i in range(g.node_count)]


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    X: np.ndarray
    classes: Optional[list] = None
    columns: tuple = ()

    @property
    def n(self) -> int:
        return self.X.shape[0]


def read_feature_csv(path, class_column: Optional[str] = "class") -> FeatureMatrix:
    try:
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.reader(fh))
    except OSError as exc:
        raise IngestError(f"cannot read {path}: {exc}") from exc
    if not rows:
        raise IngestError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    data = [r for r in rows[1:] if r]
    cls_idx = None
    if class_column is not None:
        if class_column not in header:
            raise MissingColumnError(
                f"{path}: no column {class_column!r}; available: {', '.join(header)}")
        cls_idx = header.index(class_column)
    feat_idx = [j for j in range(len(header)) if j != cls_idx]
    X = np.empty((len(data), len(feat_idx)))
    for r, row in enumerate(data, start=2):
        if len(row) != len(header):
            raise IngestError(f"{path}:{r}: expected {len(header)} fields, got {len(row)}")
        try:
            X[r - 2] = [float(row[j]) for j in feat_idx]
        except ValueError:
            raise IngestError(f"{path}:{r}: non-numeric feature value") from None
    classes = [row[cls_idx].strip() for row in data] if cls_idx is not None else None
    return FeatureMatrix(X, classes, tuple(header[j] for j in feat_idx))


def knn_lists(X, k: int, standardize: bool = False, metric: str = "euclidean"):
    """k nearest neighbors of every row (itself excluded).

    Returns ``(neighbors, distances)``, both ``(n, k)``. Ties in distance go to
    the lower row index.
    """
    X = np.asarray(X, dtype=float)
    if X.ndim != 2 or X.shape[1] < 1:
        raise IngestError("feature matrix must be 2-D with at least one column")
    if not np.all(np.isfinite(X)):
        raise IngestError("feature matrix contains non-finite values")
    n = X.shape[0]
    if k < 1 or k >= n:
        raise IngestError(f"k must satisfy 1 <= k < n (k={k}, n={n})")
    if standardize:
        sd = X.std(axis=0)
        X = (X - X.mean(axis=0)) / np.where(sd > 0, sd, 1.0)
    D = cdist(X, X, metric=metric)
    np.fill_diagonal(D, np.inf)
    nbrs = np.argsort(D, axis=1, kind="stable")[:, :k]
    return nbrs, np.take_along_axis(D, nbrs, axis=1)


def build_knn_graph(f: FeatureMatrix, k: int = 15, standardize: bool = True,
                    metric: str = "euclidean", neighborhood: str = "knn") -> LabeledGraph:
    """Union-symmetrized k-NN graph labeled by the class column.

    Edge weights are the distances. With ``neighborhood="knn"`` each node's
    Potts neighborhood is its own k nearest neighbors; with ``"graph"`` it is
    the symmetrized adjacency.
    """
    if f.classes is None:
        raise IngestError("feature matrix has no class column")
    nbrs, dist = knn_lists(f.X, k, standardize, metric)
    n = f.n
    src = np.repeat(np.arange(n), k)
    dst = nbrs.ravel()
    w = dist.ravel()
    # keep the (i, j) orientation with i < j first so duplicate pairs get the same weight
    order = np.argsort(src > dst, kind="stable")
    g = Graph.from_edges(n, np.stack([src, dst], 1)[order], w[order], [str(i) for i in range(n)])
    labels, q = remap_labels(f.classes)
    if q < 2:
        raise IngestError("class column has a single value; at least two states are required")
    if neighborhood == "knn":
        return LabeledGraph.with_neighborhoods(g, labels, q, list(nbrs))
    if neighborhood == "graph":
        return LabeledGraph(g, labels, q)
    raise ValueError(f"unknown neighborhood system {neighborhood!r}")


def _check_writable(path):
    path = Path(path)
    if path.parent and not path.parent.exists():
        path.parent.mkdir(parents=True, exist_ok=True)
    return path


def write_edge_list(g: Graph, path) -> None:
    path = _check_writable(path)
    if g.node_count == 0:
        log.warning("%s: writing an empty graph", path)
    deg = g.degrees
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.node_count):
            if deg[i] == 0:
                fh.write(f"# node: {g.name(i)}\n")
        for k, (a, b) in enumerate(g.edges):
            if g.weights is None:
                fh.write(f"{g.name(a)} {g.name(b)}\n")
            else:
                fh.write(f"{g.name(a)} {g.name(b)} {float(g.weights[k])!r}\n")


def write_dot(g: LabeledGraph, path) -> None:
    path = _check_writable(path)
    G = g.graph
    if G.node_count == 0:
        log.warning("%s: writing an empty graph", path)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("graph G {\n")
        fh.write("  node [style=filled, colorscheme=set312];\n")
        for i in range(G.node_count):
            lab = int(g.labels[i])
            fh.write(f'  "{G.name(i)}" [label="{lab}", fillcolor={(lab - 1) % 12 + 1}];\n')
        for a, b in G.edges:
            fh.write(f'  "{G.name(a)}" -- "{G.name(b)}";\n')
        fh.write("}\n")


def write_subgraph(g: LabeledGraph, path, format: str = "edge-list") -> None:
    if format == "edge-list":
        write_edge_list(g.graph, path)
    elif format == "dot":
        write_dot(g, path)
    else:
        raise ValueError(f"unknown output format {format!r}")


def write_labels(g: LabeledGraph, path) -> None:
    path = _check_writable(path)
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.node_count):
            fh.write(f"{g.graph.name(i)} {int(g.labels[i])}\n")


def write_neighborhoods(g: LabeledGraph, path) -> None:
    path = _check_writable(path)
    G = g.graph
    with open(path, "w", encoding="utf-8") as fh:
        for i in range(g.node_count):
            fh.write(" ".join([G.name(i)] + [G.name(j) for j in g.neighborhood(i)]) + "\n")


def load_labeled(edges_path, labels_path=None, neighborhoods_path=None, format="auto") -> LabeledGraph:
    """Edge list + label file (+ optional neighborhood file) in one call."""
    g = read_edge_list(edges_path, format)
    lg = read_labels(labels_path, g)
    if neighborhoods_path is None:
        return lg
    try:
        return LabeledGraph.with_neighborhoods(g, lg.labels, lg.q, read_neighborhoods(neighborhoods_path, g))
    except GraphError as exc:
        raise IngestError(str(exc)) from exc
