"""Partition quality: overlap with ground truth and modularity."""
from __future__ import annotations

from itertools import permutations

import numpy as np
from scipy.optimize import linear_sum_assignment

from .graph import Graph, LabelVector

EXHAUSTIVE_K = 8


def confusion(est: LabelVector, truth: LabelVector) -> np.ndarray:
    K = max(est.k, truth.k)
    M = np.zeros((K, K), dtype=np.int64)
    np.add.at(M, (est.labels, truth.labels), 1)
    return M


def best_agreement(est: LabelVector, truth: LabelVector) -> int:
    """Maximum number of matching nodes over relabelings of ``est``."""
    M = confusion(est, truth)
    K = len(M)
    if K <= EXHAUSTIVE_K:
        perms = np.array(list(permutations(range(K))))
        return int(M[perms, np.arange(K)].sum(axis=1).max())
    rows, cols = linear_sum_assignment(-M)
    return int(M[rows, cols].sum())


def overlap(est: LabelVector, truth: LabelVector) -> float:
    """(acc* - 1/k) / (1 - 1/k) with k = truth.k; equals 2(acc* - 1/2) for two classes."""
    if len(est) != len(truth):
        raise ValueError("label vectors differ in length")
    k = truth.k
    if k < 2:
        raise ValueError("overlap needs at least two true classes")
    acc = best_agreement(est, truth) / len(truth)
    return (acc - 1 / k) / (1 - 1 / k)


def modularity(g: Graph, labels: LabelVector) -> float:
    """Newman modularity as sum over classes of e_c/m - (vol_c / 2m)^2."""
    if g.m < 1:
        raise ValueError("modularity needs at least one edge")
    lab = labels.labels
    e = g.edges()
    inside = lab[e[:, 0]] == lab[e[:, 1]]
    e_c = np.bincount(lab[e[inside, 0]], minlength=labels.k)
    vol = np.bincount(lab, weights=g.degrees, minlength=labels.k)
    m = g.m
    return float((e_c / m - (vol / (2 * m)) ** 2).sum())
