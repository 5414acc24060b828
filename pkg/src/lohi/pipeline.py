"""End-to-end LO-HI run: estimate beta, score nodes, split, measure."""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .decompose import Decomposition, lohi_decompose
from .fisher import LAMBDA, NodeInformation, node_information
from .graph import LabeledGraph
from .metrics import PartitionReport, conductance, partition_report
from .potts import EstimationResult, EstimatorConfig, resolve_beta

SCHEMA_VERSION = 1


@dataclass(frozen=True, eq=False)
class LohiResult:
    graph: LabeledGraph
    estimation: EstimationResult
    info: NodeInformation
    decomposition: Decomposition
    original: PartitionReport
    low: PartitionReport
    high: PartitionReport
    conductance_lh: Optional[float]
    warnings: tuple = ()


def run_lohi(g: LabeledGraph, clamp: str = "critical", quantile: float = 0.75,
             estimator: EstimatorConfig = EstimatorConfig(), lam: float = LAMBDA,
             weighted_modularity: bool = True, pairwise_convention: str = "full",
             allow_negative: bool = False, tensorial: bool = False) -> LohiResult:
    warnings = []
    est = resolve_beta(g, clamp, estimator, allow_negative)
    if est.status != "converged":
        warnings.append(f"beta estimation: {est.status}")
    if est.beta_mpl < 0 and not allow_negative:
        warnings.append("negative beta estimate mapped to 0")
    info = node_information(g, est.beta_used, lam, tensorial)
    dec = lohi_decompose(g, info, quantile)
    if len(dec.high_nodes) == 0:
        warnings.append("constant scores: high-information subgraph is empty")

    def report(sub: LabeledGraph) -> PartitionReport:
        return partition_report(sub.graph, sub.labels, weighted_modularity, pairwise_convention)

    c_lh = None
    if len(dec.low_nodes) and len(dec.high_nodes):
        c = conductance(g.graph, dec.high_nodes)
        c_lh = None if math.isnan(c) else c
    original = replace(report(g), conductance_lh=c_lh)
    return LohiResult(g, est, info, dec, original, report(dec.l_subgraph),
                      report(dec.h_subgraph), c_lh, tuple(warnings))


def _round(x, nd=6):
    if x is None:
        return None
    if isinstance(x, (bool, np.bool_)):
        return bool(x)
    if isinstance(x, (int, np.integer)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        x = float(x)
        return None if not math.isfinite(x) else round(x, nd)
    if isinstance(x, dict):
        return {k: _round(v, nd) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_round(v, nd) for v in x]
    return x


def summary(result: LohiResult, config: dict) -> dict:
    """JSON-ready summary; floats rounded to 6 decimals."""
    g = result.graph.graph
    est, dec = result.estimation, result.decomposition
    return _round({
        "schema_version": SCHEMA_VERSION,
        "config": config,
        "beta_mpl": est.beta_mpl,
        "beta_used": est.beta_used,
        "clamped": est.clamped,
        "estimation_status": est.status,
        "estimation_iterations": est.iterations,
        "estimation_residual": est.residual,
        "q": result.graph.q,
        "threshold": dec.threshold,
        "quantile": dec.quantile,
        "n_low": len(dec.low_nodes),
        "n_high": len(dec.high_nodes),
        "mean_phi": result.info.mean_phi,
        "mean_psi": result.info.mean_psi,
        "conductance_lh": result.conductance_lh,
        "metrics": {
            "original": result.original.to_dict(),
            "low": result.low.to_dict(),
            "high": result.high.to_dict(),
        },
        "low_nodes": [g.name(i) for i in dec.low_nodes],
        "high_nodes": [g.name(i) for i in dec.high_nodes],
        "warnings": list(result.warnings),
    })


def node_table(result: LohiResult) -> list:
    """Rows of (node, degree, phi, psi, shape, shape_normalized, is_high)."""
    g = result.graph.graph
    info = result.info
    high = result.decomposition.is_high
    return [(g.name(i), int(g.degrees[i]), float(info.phi[i]), float(info.psi[i]),
             float(info.shape[i]), float(info.shape_normalized[i]), bool(high[i]))
            for i in range(g.node_count)]
