import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhcd.generate import DcsbmParams, ThetaDistribution, sample_dcsbm
from bhcd.graph import Graph
from bhcd.nonbacktracking import DirectedEdgeIndex, apply_B, build_B, log_abs_det_H, power_rho_B
from bhcd.spectra import build_bethe_hessian
from helpers import cycle, random_graph


def test_b_entries_by_definition():
    g = random_graph(9, 0.5, 2)
    B, idx = build_B(g)
    Bd = B.toarray()
    for a in range(len(idx)):
        for b in range(len(idx)):
            want = idx.dst[a] == idx.src[b] and idx.dst[b] != idx.src[a]
            assert Bd[a, b] == want


def test_reverse_and_lookup():
    g = random_graph(12, 0.4, 5)
    idx = DirectedEdgeIndex.of(g)
    assert np.array_equal(idx.src[idx.reverse], idx.dst)
    assert np.array_equal(idx.reverse[idx.reverse], np.arange(len(idx)))
    i, j = g.edges()[0]
    assert idx.dst[idx.lookup(i, j)] == j
    with pytest.raises(KeyError):
        idx.lookup(0, 0)


def test_apply_b_matches_explicit():
    g = random_graph(25, 0.2, 4)
    B, idx = build_B(g)
    x = np.random.default_rng(0).standard_normal(len(idx))
    assert np.allclose(apply_B(g, idx, x), B @ x)


@pytest.mark.parametrize("seed", range(4))
def test_ihara_bass(seed):
    # det(I - B/r) = (1 - 1/r^2)^(m-n) r^(-2n) det H_r
    g = random_graph(10, 0.35, seed)
    B, _ = build_B(g)
    for r in [1.3, 2.0, -1.7, 3.1]:
        lhs = np.linalg.det(np.eye(B.shape[0]) - B.toarray() / r)
        rhs = (1 - 1 / r**2) ** (g.m - g.n) * r ** (-2 * g.n) * np.linalg.det(
            build_bethe_hessian(g, r).toarray())
        assert lhs == pytest.approx(rhs, rel=1e-8, abs=1e-12)


def test_power_rho_small_cases():
    assert power_rho_B(cycle(3)) == pytest.approx(1.0)
    assert power_rho_B(Graph.from_edges(4, [(0, 1), (1, 2), (1, 3)])) == 0.0
    bowtie = Graph.from_edges(5, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 2)])
    B, _ = build_B(bowtie)
    ref = np.abs(np.linalg.eigvals(B.toarray())).max()
    assert power_rho_B(bowtie) == pytest.approx(ref, rel=1e-8)


def test_power_rho_random_graph():
    g = random_graph(60, 0.1, 8)
    B, _ = build_B(g)
    ev = np.linalg.eigvals(B.toarray())
    assert power_rho_B(g) == pytest.approx(np.abs(ev).max(), rel=1e-7)


def test_build_b_refuses_large():
    g = sample_dcsbm(DcsbmParams.two_class(20000, 8, 4, seed=0)).graph
    assert 2 * g.m > 10**5
    with pytest.raises(ValueError, match="apply_B"):
        build_B(g)


def test_cycle_is_singular_at_one():
    for n in range(3, 12):
        res = log_abs_det_H(cycle(n), 1.0)
        assert res.sign == 0


def test_four_cycle_determinant():
    res = log_abs_det_H(cycle(4), 2.0)
    assert res.sign == 1 and np.exp(res.logabs) == pytest.approx(225.0)


@given(st.integers(0, 10**6), st.floats(-3.5, 3.5).filter(lambda r: abs(abs(r) - 1) > 1e-3))
def test_inertia_matches_eigenvalues(seed, r):
    g = random_graph(25, 0.2, seed)
    w = np.linalg.eigvalsh(build_bethe_hessian(g, r).toarray())
    res = log_abs_det_H(g, r)
    tiny = 1e-10 * np.abs(build_bethe_hessian(g, r).toarray()).sum(1).max()
    if np.abs(w).min() > 1e3 * tiny:
        assert res.n_negative == (w < 0).sum()
        assert res.sign == (-1) ** res.n_negative
        assert res.logabs == pytest.approx(np.log(np.abs(w)).sum(), rel=1e-8, abs=1e-8)


def test_sparse_path_matches_dense():
    g = sample_dcsbm(DcsbmParams.two_class(3000, 10, 3, ThetaDistribution.powerlaw(), seed=1)).graph
    for r in [1.2, 2.0, 3.5]:
        a = log_abs_det_H(g, r)  # n > cap: sparse LDL^T
        b = log_abs_det_H(g, r, dense_cap=10**4)
        assert a.n_negative == b.n_negative
        assert a.sign == b.sign
        assert a.logabs == pytest.approx(b.logabs, rel=1e-9)
