"""Per-node observed Fisher information and the shape-operator score.

For a node with neighbor histogram ``U`` and label ``x`` the local model is
``p(l) = softmax(beta * U)[l]``. The first-order information is the squared
score ``(U[x] - E[U])**2`` and the second-order information is the
variance ``Var[U]``, both under ``p``. The shape operator is
``-Psi / (Phi + lam)``.

Two code paths compute these: the direct forms (production) and the
outer-product forms built from the vectors ``v = U[x] - U`` and
``w = exp(beta * U)`` and the matrix ``Lambda = A * B``. The latter is kept as a
cross-check.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import LabeledGraph
from .potts import softmax_weights

LAMBDA = 0.001


def phi_direct(U, x: int, beta: float) -> float:
    U = np.asarray(U, dtype=float)
    # U[x] - E[U] as E[U[x] - U]: no cancellation when p concentrates on x
    d = float((U[x - 1] - U) @ softmax_weights(U, beta))
    return d * d


def psi_direct(U, beta: float) -> float:
    U = np.asarray(U, dtype=float)
    p = softmax_weights(U, beta)
    e = U @ p
    # centred second moment; never negative, unlike E[U^2] - E[U]^2 in floats
    return float(((U - e) ** 2) @ p)


@dataclass(frozen=True)
class TensorWorkspace:
    v: np.ndarray
    w: np.ndarray
    A: np.ndarray
    B: np.ndarray

    @property
    def Lambda(self) -> np.ndarray:
        return self.A * self.B


def tensor_workspace(U, x: int, beta: float, shift: bool = True) -> TensorWorkspace:
    """Build v, w, A, B for one node.

    With ``shift`` the exponent is taken relative to ``max(U)``; the ratios in
    both information formulas are unchanged because numerator and denominator
    pick up the same factor.
    """
    U = np.asarray(U, dtype=float)
    q = len(U)
    z = beta * U
    if shift:
        z = z - z.max()
    w = np.exp(z)
    v = U[x - 1] - U
    A = np.repeat(U[:, None], q, axis=1)
    B = U[:, None] - U[None, :]
    return TensorWorkspace(v, w, A, B)


def phi_tensorial(ws: TensorWorkspace) -> float:
    vw = ws.v * ws.w
    return float(np.outer(vw, vw).sum() / np.outer(ws.w, ws.w).sum())


def psi_tensorial(ws: TensorWorkspace) -> float:
    ww = np.outer(ws.w, ws.w)
    return float((ws.Lambda * ww).sum() / ww.sum())


def shape_operator(phi: float, psi: float, lam: float = LAMBDA) -> float:
    if lam <= 0:
        raise ValueError("lambda must be positive")
    return -psi / (phi + lam)


@dataclass(frozen=True)
class NodeInformation:
    phi: np.ndarray
    psi: np.ndarray
    shape: np.ndarray
    shape_normalized: np.ndarray

    def __len__(self):
        return len(self.phi)

    @property
    def mean_phi(self) -> float:
        """Observed first-order Fisher information (average over nodes)."""
        return float(self.phi.mean()) if len(self.phi) else 0.0

    @property
    def mean_psi(self) -> float:
        """Observed second-order Fisher information (average over nodes)."""
        return float(self.psi.mean()) if len(self.psi) else 0.0


def minmax_normalize(s: np.ndarray) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    if len(s) == 0:
        return s.copy()
    lo, hi = s.min(), s.max()
    if hi == lo:
        return np.zeros_like(s)
    return np.clip((s - lo) / (hi - lo), 0.0, 1.0)


def information_from_hist(U, labels, beta: float, lam: float = LAMBDA,
                          tensorial: bool = False) -> NodeInformation:
    U = np.asarray(U, dtype=float)
    labels = np.asarray(labels, dtype=np.int64)
    n = len(labels)
    if tensorial:
        phi = np.empty(n)
        psi = np.empty(n)
        for i in range(n):
            ws = tensor_workspace(U[i], labels[i], beta)
            phi[i] = phi_tensorial(ws)
            psi[i] = psi_tensorial(ws)
    elif n:
        # Phi and Psi are unchanged by adding a constant to U or permuting
        # its entries (given U[x]), so evaluate on a shifted, sorted copy:
        # equivalent neighborhoods then get bit-identical scores and ties at
        # the quantile threshold are exact.
        ux = U[np.arange(n), labels - 1] - U.min(axis=1)
        Uc = np.sort(U - U.min(axis=1, keepdims=True), axis=1)
        p = softmax_weights(Uc, beta)
        e = (Uc * p).sum(axis=1)
        phi = ((ux[:, None] - Uc) * p).sum(axis=1) ** 2
        psi = (((Uc - e[:, None]) ** 2) * p).sum(axis=1)
    else:
        phi = psi = np.zeros(0)
    shape = -psi / (phi + lam)
    return NodeInformation(phi, psi, shape, minmax_normalize(shape))


def node_information(g: LabeledGraph, beta: float, lam: float = LAMBDA,
                     tensorial: bool = False) -> NodeInformation:
    """Phi, Psi, shape score and min-max normalized score for every node."""
    return information_from_hist(g.histograms(), g.labels, beta, lam, tensorial)
