import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from lohi.fisher import (LAMBDA, information_from_hist, minmax_normalize, node_information,
                         phi_direct, phi_tensorial, psi_direct, psi_tensorial, shape_operator,
                         tensor_workspace)
from lohi.graph import Graph, LabeledGraph
from lohi.potts import softmax_weights

from conftest import labeled_graphs


@st.composite
def node_cases(draw, max_q=10, max_deg=50):
    q = draw(st.integers(2, max_q))
    U = np.array(draw(st.lists(st.integers(0, max_deg), min_size=q, max_size=q)))
    x = draw(st.integers(1, q))
    beta = draw(st.floats(0, 2))
    return U, x, beta


def mp_log_p(U, x, beta):
    b = mp.mpf(beta)
    return b * int(U[x - 1]) - mp.log(mp.fsum(mp.exp(b * int(u)) for u in U))


def central_moments(U, beta):
    p = softmax_weights(U, beta)
    e = U @ p
    return [float(((U - e) ** k) @ p) for k in (2, 4)]


def test_phi_examples():
    assert phi_direct([2, 2, 2], 2, 0.7) == 0.0
    assert phi_direct([3, 1], 1, 0.0) == 1.0
    assert phi_direct([3, 1], 2, 0.0) == 1.0


def test_psi_examples():
    assert psi_direct([4, 4, 4, 4], 1.3) == 0.0
    assert psi_direct([3, 1], 0.0) == 1.0
    assert psi_direct([3, 1], 40.0) < 1e-30


def test_tensor_hand_example():
    ws = tensor_workspace([3, 1], 1, 0.0)
    assert ws.v.tolist() == [0, 2] and ws.w.tolist() == [1, 1]
    assert ws.A.tolist() == [[3, 3], [1, 1]]
    assert ws.B.tolist() == [[0, 2], [-2, 0]]
    assert ws.Lambda.tolist() == [[0, 6], [-2, 0]]
    assert phi_tensorial(ws) == 1.0 and psi_tensorial(ws) == 1.0


def test_tensor_zero_cases():
    assert phi_tensorial(tensor_workspace([2, 5, 2], 2, 1.0)) == pytest.approx(
        phi_direct([2, 5, 2], 2, 1.0))
    assert psi_tensorial(tensor_workspace([3, 3, 3], 2, 1.0)) == 0.0
    ws = tensor_workspace([3, 3], 1, 0.4)
    assert not ws.v.any() and phi_tensorial(ws) == 0.0


@given(node_cases())
def test_workspace_invariants(case):
    U, x, beta = case
    ws = tensor_workspace(U, x, beta)
    assert np.all(ws.w > 0)
    np.testing.assert_array_equal(ws.B, -ws.B.T)
    assert not np.diag(ws.B).any()


@given(node_cases(max_deg=20))
def test_unshifted_workspace_gives_same_ratios(case):
    U, x, beta = case
    a, b = tensor_workspace(U, x, beta, shift=True), tensor_workspace(U, x, beta, shift=False)
    assert phi_tensorial(a) == pytest.approx(phi_tensorial(b), rel=1e-9, abs=1e-12)
    assert psi_tensorial(a) == pytest.approx(psi_tensorial(b), rel=1e-9, abs=1e-12)


@given(node_cases())
def test_cross_path_and_sign(case):
    U, x, beta = case
    ws = tensor_workspace(U, x, beta)
    pd, sd = phi_direct(U, x, beta), psi_direct(U, beta)
    assert pd >= 0 and sd >= 0
    assert phi_tensorial(ws) == pytest.approx(pd, rel=1e-9, abs=1e-12)
    assert psi_tensorial(ws) == pytest.approx(sd, rel=1e-9, abs=1e-12)


@given(node_cases())
def test_phi_is_squared_score(case):
    U, x, beta = case
    d = mp.diff(lambda b: mp_log_p(U, x, b), beta)
    assert phi_direct(U, x, beta) == pytest.approx(float(d) ** 2, rel=1e-9, abs=1e-12)


@given(node_cases())
def test_psi_is_negative_curvature_of_log_p(case):
    U, x, beta = case
    d2 = mp.diff(lambda b: mp_log_p(U, x, b), beta, 2)
    assert psi_direct(U, beta) == pytest.approx(-float(d2), rel=1e-9, abs=1e-12)


@given(node_cases())
def test_step_1e4_difference_residual_is_truncation_term(case):
    # the central second difference overshoots Var by h^2 * kappa_4 / 12
    U, x, beta = case
    h = 1e-4
    with mp.workdps(40):
        fd = -(mp_log_p(U, x, beta + h) - 2 * mp_log_p(U, x, beta) + mp_log_p(U, x, beta - h)) / mp.mpf(h) ** 2
    m2, m4 = central_moments(U, beta)
    kappa4 = m4 - 3 * m2 ** 2
    assert float(fd) - psi_direct(U, beta) == pytest.approx(h ** 2 * kappa4 / 12, abs=1e-9)


@given(st.integers(2, 10), st.integers(0, 50), st.floats(0, 5))
def test_information_equality_for_constant_histograms(q, c, beta):
    U = np.full(q, c)
    for x in range(1, q + 1):
        assert abs(phi_direct(U, x, beta) - psi_direct(U, beta)) < 1e-12


def test_information_equality_usually_fails_otherwise():
    rng = np.random.default_rng(1)
    differ = 0
    for _ in range(200):
        q = int(rng.integers(2, 6))
        U = rng.integers(0, 10, q)
        if np.all(U == U[0]):
            continue
        x = int(rng.integers(1, q + 1))
        differ += abs(phi_direct(U, x, 0.5) - psi_direct(U, 0.5)) > 1e-6
    assert differ > 150


def test_shape_operator_examples():
    assert shape_operator(1, 1) == pytest.approx(-0.999001, abs=1e-6)
    assert shape_operator(0, 0) == 0
    assert shape_operator(0, 2) == pytest.approx(-2000)
    with pytest.raises(ValueError):
        shape_operator(1, 1, 0.0)


def test_isolated_nodes():
    lg = LabeledGraph(Graph.from_edges(3, []), [1, 2, 1], 2)
    info = node_information(lg, 0.8)
    for arr in (info.phi, info.psi, info.shape, info.shape_normalized):
        assert not arr.any()


def test_balanced_cycle_scores_are_zero():
    g = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    info = node_information(LabeledGraph(g, [1, 1, 2, 2], 2), 0.0)
    # U = (1, 1) at every node: Phi = Psi = 0, hence S = 0
    assert not info.shape.any() and not info.shape_normalized.any()


@given(labeled_graphs(max_q=5), st.floats(0, 3))
def test_node_information_properties(lg, beta):
    info = node_information(lg, beta)
    U = lg.histograms()
    for i in range(lg.node_count):
        assert info.phi[i] == pytest.approx(phi_direct(U[i], lg.labels[i], beta), rel=1e-9, abs=1e-12)
        assert info.psi[i] == pytest.approx(psi_direct(U[i], beta), rel=1e-9, abs=1e-12)
    assert np.all(info.shape <= 0)
    np.testing.assert_array_equal(info.shape, -info.psi / (info.phi + LAMBDA))
    s = info.shape_normalized
    assert np.all((0 <= s) & (s <= 1))
    if lg.node_count and np.ptp(info.shape) > 0:
        assert s.min() == 0 and s.max() == 1
    # averages are the observed first and second order information
    if lg.node_count:
        assert info.mean_phi == pytest.approx(info.phi.mean())
        assert info.mean_psi == pytest.approx(info.psi.mean())
    tens = node_information(lg, beta, tensorial=True)
    np.testing.assert_allclose(tens.phi, info.phi, rtol=1e-9, atol=1e-12)
    np.testing.assert_allclose(tens.psi, info.psi, rtol=1e-9, atol=1e-12)


def test_equivalent_neighborhoods_score_identically():
    # shifting all counts or permuting the other labels leaves Phi, Psi unchanged;
    # the scores must then be bit-identical so quantile ties are exact
    U = np.array([[0, 0, 2], [1, 1, 3], [1, 3, 1], [2, 0, 0], [5, 5, 7]])
    x = np.array([3, 3, 2, 1, 3])
    info = information_from_hist(U, x, math.log(1 + math.sqrt(3)))
    assert len(set(info.shape.tolist())) == 1


def test_minmax_normalize():
    assert minmax_normalize(np.array([-3.0, -1.0, -2.0])).tolist() == [0.0, 1.0, 0.5]
    assert minmax_normalize(np.array([-1.0, -1.0])).tolist() == [0.0, 0.0]
    assert minmax_normalize(np.array([])).tolist() == []
