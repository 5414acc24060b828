"""Command-line interface: ``lohi <subcommand> ...``.

Exit codes: 0 success, 1 usage error, 2 data error. Warnings go to stderr and
into the JSON reports; they never change the exit code.
"""
from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

from . import ingest
from .community import detect_communities_cnm, partition_to_labels
from .fisher import LAMBDA
from .graph import GraphError, LabeledGraph
from .metrics import partition_report
from .pipeline import SCHEMA_VERSION, _round, node_table, run_lohi, summary
from .potts import EstimatorConfig, clamp_beta, estimate_beta
from .sampler import SamplerConfig, gibbs_sample, grid_graph

log = logging.getLogger("lohi")

EXIT_OK, EXIT_USAGE, EXIT_DATA = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _dump_json(obj, path=None) -> None:
    text = json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    if path is None:
        sys.stdout.write(text)
    else:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _config(args, **resolved) -> dict:
    cfg = {k: v for k, v in vars(args).items() if k not in ("func",)}
    cfg.update(resolved)
    return {k: (str(v) if isinstance(v, Path) else v) for k, v in sorted(cfg.items())}


def _feature_graph(args) -> LabeledGraph:
    f = ingest.read_feature_csv(args.features, args.class_column)
    if not 1 <= args.k < f.n:
        raise UsageError(f"k must satisfy 1 <= k < n (k={args.k}, n={f.n})")
    return ingest.build_knn_graph(f, args.k, args.standardize, args.metric, args.neighborhood)


def _load_input(args) -> tuple[LabeledGraph, str]:
    """Labeled graph from the input flags plus its kind ("edge-list" or "knn")."""
    if getattr(args, "features", None):
        if args.graph:
            raise UsageError("give either --graph or --features, not both")
        if args.label_source not in (None, "class-column"):
            raise UsageError("--features implies --label-source class-column")
        return _feature_graph(args), "knn"
    if not args.graph:
        raise UsageError("an input graph is required (--graph or --features)")
    g = ingest.read_edge_list(args.graph)
    source = args.label_source or ("file" if args.labels else "cnm")
    if source == "file":
        if not args.labels:
            raise UsageError("--label-source file needs --labels")
        lg = ingest.read_labels(args.labels, g)
    elif source == "cnm":
        lg = partition_to_labels(detect_communities_cnm(g), g)
    else:
        raise UsageError("--label-source class-column needs --features")
    kind = "edge-list"
    if getattr(args, "neighbors", None):
        lg = LabeledGraph.with_neighborhoods(g, lg.labels, lg.q, ingest.read_neighborhoods(args.neighbors, g))
        kind = "knn"
    return lg, kind


def cmd_knn(args) -> int:
    lg = _feature_graph(args)
    out = _outdir(args)
    ingest.write_edge_list(lg.graph, out / "graph.edges")
    ingest.write_labels(lg, out / "labels.txt")
    if lg.has_custom_neighborhood:
        ingest.write_neighborhoods(lg, out / "neighbors.txt")
    report = ingest.ingestion_report(lg.graph, lg.q).to_dict()
    report["schema_version"] = SCHEMA_VERSION
    report["config"] = _config(args)
    _dump_json(_round(report), out / "ingestion.json")
    print(f"{report['nodes']} nodes, {report['edges']} edges, q={lg.q}")
    return EXIT_OK


def cmd_communities(args) -> int:
    g = ingest.read_edge_list(args.graph)
    p = detect_communities_cnm(g)
    if p.q < 2:
        raise ingest.IngestError("community detection found a single community")
    lg = LabeledGraph(g, p.labels, p.q)
    out = _outdir(args)
    ingest.write_labels(lg, out / "labels.txt")
    rep = partition_report(g, p.labels, not args.unweighted_modularity, args.pairwise_convention)
    _dump_json(_round({"schema_version": SCHEMA_VERSION, "config": _config(args),
                       "communities": p.q, "metrics": rep.to_dict()}), out / "communities.json")
    print(f"{p.q} communities, modularity {rep.modularity:.3f}")
    return EXIT_OK


def cmd_decompose(args) -> int:
    if not 0 < args.quantile < 1:
        raise UsageError("--quantile must lie strictly between 0 and 1")
    lg, kind = _load_input(args)
    clamp = args.clamp or ("none" if kind == "knn" else "critical")
    result = run_lohi(lg, clamp, args.quantile, EstimatorConfig(), LAMBDA,
                      not args.unweighted_modularity, args.pairwise_convention,
                      args.allow_negative_beta, args.tensorial)
    for w in result.warnings:
        log.warning(w)
    out = _outdir(args)
    _dump_json(summary(result, _config(args, clamp=clamp, input_kind=kind)), out / "summary.json")
    with open(out / "nodes.csv", "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["node", "degree", "phi", "psi", "shape", "shape_normalized", "is_high"])
        for name, deg, phi, psi, s, sn, hi in node_table(result):
            w.writerow([name, deg, *(f"{v:.6f}" for v in (phi, psi, s, sn)), int(hi)])
    dec = result.decomposition
    for tag, sub in (("low", dec.l_subgraph), ("high", dec.h_subgraph)):
        ingest.write_subgraph(sub, out / f"{tag}.edges", "edge-list")
        ingest.write_subgraph(sub, out / f"{tag}.dot", "dot")
        if sub.node_count:
            ingest.write_labels(sub, out / f"{tag}.labels")
    o, lo, hi = result.original, result.low, result.high
    print(f"beta_used={result.estimation.beta_used:.4f} |L|={len(dec.low_nodes)} |H|={len(dec.high_nodes)}")
    for tag, r in (("original", o), ("low", lo), ("high", hi)):
        print(f"{tag:8s} modularity={_fmt(r.modularity)} coverage={_fmt(r.coverage)} "
              f"performance={_fmt(r.performance)}")
    return EXIT_OK


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.3f}"


def cmd_metrics(args) -> int:
    g = ingest.read_edge_list(args.graph)
    lg = ingest.read_labels(args.labels, g)
    rep = partition_report(g, lg.labels, not args.unweighted_modularity, args.pairwise_convention)
    _dump_json(_round({"schema_version": SCHEMA_VERSION, "config": _config(args),
                       "metrics": rep.to_dict()}), args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    lg, kind = _load_input(args)
    est = estimate_beta(lg, EstimatorConfig(clamp_negative=not args.allow_negative_beta))
    clamp = args.clamp or ("none" if kind == "knn" else "critical")
    used = clamp_beta(est.beta_mpl, lg.q, clamp, args.allow_negative_beta)
    _dump_json(_round({"schema_version": SCHEMA_VERSION,
                       "config": _config(args, clamp=clamp, input_kind=kind),
                       "beta_mpl": est.beta_mpl, "beta_used": used, "clamped": used != est.beta_mpl,
                       "status": est.status, "iterations": est.iterations,
                       "residual": est.residual, "q": lg.q}), args.out)
    return EXIT_OK


def cmd_sample(args) -> int:
    try:
        cfg = SamplerConfig(args.beta, args.q, args.sweeps, args.burn_in, args.seed)
        grid = grid_graph(args.rows, args.cols, args.torus)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    lg = gibbs_sample(grid, cfg)
    out = _outdir(args)
    ingest.write_edge_list(lg.graph, out / "graph.edges")
    ingest.write_labels(lg, out / "labels.txt")
    report = ingest.ingestion_report(lg.graph, lg.q).to_dict()
    report.update(schema_version=SCHEMA_VERSION, config=_config(args))
    _dump_json(_round(report), out / "sample.json")
    return EXIT_OK


def _add_metric_flags(p) -> None:
    p.add_argument("--unweighted-modularity", action="store_true",
                   help="ignore edge weights when computing modularity")
    p.add_argument("--pairwise-convention", choices=("full", "induced"), default="full",
                   help="volumes for pairwise community conductance")


def _add_input_flags(p) -> None:
    p.add_argument("--graph", help="edge-list file")
    p.add_argument("--labels", help="label file (NAME LABEL pairs or one label per line)")
    p.add_argument("--neighbors", help="Potts neighborhood file (k-NN lists)")
    p.add_argument("--features", help="feature CSV; builds a k-NN graph labeled by the class column")
    p.add_argument("--label-source", choices=("file", "class-column", "cnm"))
    _add_knn_flags(p)
    p.add_argument("--clamp", choices=("critical", "none"),
                   help="default: critical for edge lists, none for k-NN inputs")
    p.add_argument("--allow-negative-beta", action="store_true")


def _add_knn_flags(p) -> None:
    p.add_argument("--class-column", default="class")
    p.add_argument("-k", type=int, default=15)
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=True,
                   help="z-score features before computing distances")
    p.add_argument("--metric", default="euclidean", help="any scipy cdist metric")
    p.add_argument("--neighborhood", choices=("knn", "graph"), default="knn",
                   help="Potts neighborhood: directed k-NN lists or the symmetrized graph")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="lohi", description="Low/high information decomposition of labeled graphs")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("knn", help="build a k-NN graph from a feature CSV")
    p.add_argument("--features", required=True)
    _add_knn_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_knn)

    p = sub.add_parser("communities", help="greedy modularity communities of an edge list")
    p.add_argument("--graph", required=True)
    _add_metric_flags(p)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_communities)

    p = sub.add_parser("decompose", help="run the full decomposition pipeline")
    _add_input_flags(p)
    p.add_argument("--quantile", type=float, default=0.75)
    p.add_argument("--tensorial", action="store_true", help="use the tensor-product formulas")
    _add_metric_flags(p)
    p.add_argument("--seed", type=int, default=0, help="recorded for reproducibility")
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_decompose)

    p = sub.add_parser("metrics", help="partition quality of a labeling")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", required=True)
    _add_metric_flags(p)
    p.add_argument("--out", help="JSON output file (default stdout)")
    p.set_defaults(func=cmd_metrics)

    p = sub.add_parser("estimate", help="maximum pseudo-likelihood inverse temperature")
    _add_input_flags(p)
    p.add_argument("--out", help="JSON output file (default stdout)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("sample", help="Gibbs-sample a Potts field on a lattice")
    p.add_argument("--rows", type=int, default=30)
    p.add_argument("--cols", type=int, default=30)
    p.add_argument("--torus", action="store_true")
    p.add_argument("-q", type=int, default=3)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--sweeps", type=int, default=500)
    p.add_argument("--burn-in", type=int, default=0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, ingest.MissingColumnError) as exc:
        print(f"lohi: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ingest.IngestError, GraphError, OSError, ValueError) as exc:
        print(f"lohi: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
