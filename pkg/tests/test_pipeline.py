import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from bhcd.generate import DcsbmParams, ThetaDistribution, sample_dcsbm
from bhcd.graph import Graph, LabelVector
from bhcd.metrics import overlap
from bhcd.pipeline import (AlgorithmOptions, InfeasibleK, algorithm1, baseline_cluster, estimate_k,
                           kmeans, select_support)
from helpers import cliques, random_graph


# ---------------------------------------------------------------- k-means

def test_kmeans_1d_example():
    lab, inertia = kmeans(np.array([0, 0.1, 9.9, 10]), 2, rng=0)
    assert lab[0] == lab[1] != lab[2] == lab[3]
    assert inertia == pytest.approx(4 * 0.05**2)


def test_kmeans_identical_points():
    lab, inertia = kmeans(np.ones((7, 3)), 1)
    assert inertia == 0 and (lab == 0).all()
    with pytest.raises(ValueError, match="distinct"):
        kmeans(np.ones((7, 3)), 2)
    with pytest.raises(ValueError):
        kmeans(np.zeros((3, 1)), 4)


def test_kmeans_gaussian_mixture():
    rng = np.random.default_rng(0)
    truth = np.repeat([0, 1], 1000)
    X = rng.standard_normal((2000, 2)) + np.where(truth[:, None] == 0, -5, 5)
    lab, _ = kmeans(X, 2, rng=1)
    err = min((lab != truth).mean(), (lab == truth).mean())
    assert err < 0.01


def test_kmeans_repairs_empty_clusters():
    # three tight groups but a start where one center lands on an outlier-free duplicate
    X = np.array([[0.0], [0.0], [0.0], [10.0], [10.0], [20.0]])
    lab, inertia = kmeans(X, 3, restarts=5, rng=3)
    assert len(np.unique(lab)) == 3 and inertia == pytest.approx(0.0)


@given(st.integers(0, 10**6), st.integers(2, 5))
def test_kmeans_inertia_matches_labels(seed, k):
    X = np.random.default_rng(seed).standard_normal((40, 2))
    lab, inertia = kmeans(X, k, restarts=2, rng=seed)
    cent = np.array([X[lab == j].mean(0) for j in range(k)])
    assert inertia == pytest.approx(((X - cent[lab]) ** 2).sum())
    assert len(np.unique(lab)) == k


def test_kmeans_deterministic():
    X = np.random.default_rng(1).standard_normal((100, 3))
    a, b = kmeans(X, 4, rng=9), kmeans(X, 4, rng=9)
    assert np.array_equal(a[0], b[0]) and a[1] == b[1]


# ---------------------------------------------------------------- k estimate

def test_estimate_k_cliques():
    g, _ = cliques([50, 50])
    assert estimate_k(g) == 2


def test_estimate_k_erdos_renyi():
    hits = [estimate_k(sample_dcsbm(DcsbmParams.two_class(5000, 10, 10, seed=s)).graph) == 1
            for s in range(10)]
    assert sum(hits) >= 9


def test_estimate_k_needs_edges():
    with pytest.raises(ValueError):
        estimate_k(Graph.from_edges(4, []))


# ---------------------------------------------------------------- algorithm1

def test_karate_k2(karate):
    g, truth = karate
    res = algorithm1(g, AlgorithmOptions(k=2))
    assert overlap(res.labels, truth) == 1.0
    assert res.k_hat == 2 and res.labels.k == 2
    assert res.embedding.shape == (34, 1)
    assert np.linalg.norm(res.embedding[:, 0]) == pytest.approx(1.0)


def test_two_cliques_auto():
    g, truth = cliques([30, 40])
    res = algorithm1(g)
    assert res.k_hat == 2 and res.zetas == [1.0]
    assert overlap(res.labels, truth) == 1.0


def test_three_cliques_auto():
    g, truth = cliques([20, 25, 30])
    res = algorithm1(g)
    assert res.k_hat == 3
    assert overlap(res.labels, truth) == 1.0


def test_single_community_result():
    g = random_graph(60, 0.5, 3)
    res = algorithm1(g)
    assert res.k_hat == 1 and res.embedding.shape == (60, 0)
    assert (res.labels.labels == 0).all()


def test_infeasible_k(karate):
    g, _ = karate
    with pytest.raises(InfeasibleK):
        algorithm1(g, AlgorithmOptions(k=50))


def test_isolated_nodes_are_labelled():
    g0, truth = cliques([15, 15])
    g = Graph.from_edges(35, g0.edges())  # five isolated nodes appended
    res = algorithm1(g, AlgorithmOptions(k=2))
    assert len(res.labels) == 35
    assert overlap(LabelVector(res.labels.labels[:30], 2), truth) == 1.0
    assert res.support.tolist() == list(range(30))


def test_json_export(karate):
    g, _ = karate
    d = json.loads(algorithm1(g, AlgorithmOptions(k=2)).to_json())
    assert set(d) == {"k_hat", "labels", "zetas", "inertia", "diagnostics"}
    assert len(d["labels"]) == 34 and d["diagnostics"][0]["p"] == 2


@pytest.fixture(scope="module")
def sbm():
    return sample_dcsbm(DcsbmParams.two_class(3000, 16, 4, ThetaDistribution.powerlaw(), seed=7))


def test_determinism(sbm):
    a = algorithm1(sbm.graph, AlgorithmOptions(k=2, seed=3))
    b = algorithm1(sbm.graph, AlgorithmOptions(k=2, seed=3))
    assert a.to_json() == b.to_json()
    assert np.array_equal(a.embedding, b.embedding)


def test_permutation_equivariance(sbm):
    g = sbm.graph
    perm = np.random.default_rng(0).permutation(g.n)
    a = algorithm1(g, AlgorithmOptions(k=2))
    b = algorithm1(g.permute(perm), AlgorithmOptions(k=2))
    assert overlap(LabelVector(a.labels.labels[perm], 2), b.labels) == pytest.approx(1.0, abs=0.002)


@pytest.mark.parametrize("c_in, floor", [(12, 0.97), (16, 0.99), (20, 0.99), (24, 0.99)])
def test_sign_and_kmeans_agree(c_in, floor):
    # alpha / alpha_c = 1.41, 1.83, 2.24, 2.65
    s = sample_dcsbm(DcsbmParams.two_class(3000, c_in, 4, seed=c_in))
    res = algorithm1(s.graph, AlgorithmOptions(k=2))
    sup = res.support
    by_sign = (res.embedding[sup, 0] > 0).astype(int)
    km = res.labels.labels[sup]
    agree = max((by_sign == km).mean(), (by_sign != km).mean())
    assert agree >= floor


# ---------------------------------------------------------------- baselines

def test_baselines_on_cliques():
    g, truth = cliques([25, 25])
    for m in ("bethe_fixed_r", "adjacency", "rw_second", "rw_oracle_best"):
        assert overlap(baseline_cluster(g, m, 2, truth=truth), truth) == 1.0


def test_oracle_needs_truth(karate):
    g, _ = karate
    with pytest.raises(ValueError, match="ground-truth"):
        baseline_cluster(g, "rw_oracle_best", 2)
    with pytest.raises(ValueError, match="unknown"):
        baseline_cluster(g, "nope", 2)


def test_oracle_dominates_rw_second(sbm):
    g, truth = sbm.graph, sbm.labels
    a = overlap(baseline_cluster(g, "rw_second", 2), truth)
    b = overlap(baseline_cluster(g, "rw_oracle_best", 2, truth=truth), truth)
    assert b >= a


def test_adjacency_dense_regime():
    s = sample_dcsbm(DcsbmParams.two_class(800, 120, 40, seed=2))
    ov = overlap(baseline_cluster(s.graph, "adjacency", 2), s.labels)
    bh = overlap(algorithm1(s.graph, AlgorithmOptions(k=2)).labels, s.labels)
    assert ov > 0.95 and abs(ov - bh) < 0.03


def test_support_policies():
    g0, _ = cliques([30, 20, 3])
    opts = AlgorithmOptions()
    assert len(select_support(g0, opts)) == 50
    assert len(select_support(g0, AlgorithmOptions(components="largest"))) == 30
    assert len(select_support(g0, AlgorithmOptions(components="all"))) == 53
    with pytest.raises(ValueError):
        select_support(g0, AlgorithmOptions(components="bogus"))
