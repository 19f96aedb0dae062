"""Bethe-Hessian clustering with r = zeta_p per embedding column, k-means and baseline clusterers."""
from __future__ import annotations

import json
import logging
from dataclasses import asdict, dataclass, field

import numpy as np

from .graph import Graph, LabelVector, connected_components, estimate_rho_B
from .metrics import overlap
from .nonbacktracking import log_abs_det_H
from .spectra import (DENSE_CAP, build_bethe_hessian, largest_eigenpairs, rw_informative_eigvecs,
                      smallest_eigenpairs)
from .zeta import GRID_POINTS, BetheSpectrum, NoCrossing, NotDetectable, estimate_zeta_method2

log = logging.getLogger(__name__)

ORACLE_SCAN = 25


class InfeasibleK(ValueError):
    """Requested class count cannot be realised on this graph."""


@dataclass
class AlgorithmOptions:
    k: int | None = None  # None: estimate from the inertia of H_sqrt(rho)
    tol: float = 1e-10  # eigen-residual tolerance relative to ||H||_inf
    zeta_tol: float | None = None  # bisection width; None -> 1e-3 sqrt(rho_hat)
    grid: int = GRID_POINTS
    kmeans_restarts: int = 10
    seed: int = 0
    # operate on components holding at least max(min_component_size, min_component_frac * n)
    # nodes; "largest" keeps only the largest one
    components: str = "large"
    min_component_size: int = 10
    min_component_frac: float = 0.01
    dense_cap: int = DENSE_CAP


@dataclass
class ClusteringResult:
    k_hat: int
    labels: LabelVector
    zetas: list[float]
    embedding: np.ndarray
    eigen_diagnostics: list[dict] = field(default_factory=list)
    kmeans_inertia: float = 0.0
    support: np.ndarray | None = None  # nodes the spectral step ran on

    def to_dict(self) -> dict:
        return {
            "k_hat": int(self.k_hat),
            "labels": self.labels.labels.tolist(),
            "zetas": [float(z) for z in self.zetas],
            "inertia": float(self.kmeans_inertia),
            "diagnostics": self.eigen_diagnostics,
        }

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)


# ---------------------------------------------------------------- k-means

def _sqdist(X, centers):
    d = (X * X).sum(1)[:, None] - 2 * X @ centers.T + (centers * centers).sum(1)[None, :]
    return np.maximum(d, 0.0)


def _plusplus(X, k, rng):
    n = len(X)
    centers = np.empty((k, X.shape[1]))
    centers[0] = X[rng.integers(n)]
    d2 = _sqdist(X, centers[:1])[:, 0]
    for j in range(1, k):
        total = d2.sum()
        i = rng.choice(n, p=d2 / total) if total > 0 else rng.integers(n)
        centers[j] = X[i]
        d2 = np.minimum(d2, _sqdist(X, centers[j:j + 1])[:, 0])
    return centers


def _lloyd(X, centers, max_iter, tol):
    """Lloyd iterations until assignments are stable or the centers move less than tol * var(X)."""
    k = len(centers)
    shift_tol = tol * X.var(axis=0).sum()
    lab = None
    for _ in range(max_iter):
        D = _sqdist(X, centers)
        new = D.argmin(1)
        counts = np.bincount(new, minlength=k)
        for e in np.flatnonzero(counts == 0):
            # split the largest cluster: its farthest member seeds the empty one
            big = counts.argmax()
            members = np.flatnonzero(new == big)
            far = members[D[members, big].argmax()]
            new[far] = e
            counts[big] -= 1
            counts[e] = 1
        if lab is not None and np.array_equal(new, lab):
            break
        lab = new
        old = centers.copy()
        for j in range(k):
            centers[j] = X[lab == j].mean(0)
        if ((centers - old) ** 2).sum() <= shift_tol:
            break
    inertia = float(((X - centers[lab]) ** 2).sum())
    return lab, inertia


def kmeans(points, k: int, restarts: int = 10, rng=None, max_iter: int = 300,
           tol: float = 1e-7) -> tuple[np.ndarray, float]:
    """Lloyd's algorithm from k-means++ seeds; returns the best (labels, inertia) over restarts."""
    X = np.asarray(points, dtype=float)
    if X.ndim == 1:
        X = X[:, None]
    n = len(X)
    if k < 1 or k > n:
        raise ValueError(f"need 1 <= k <= n, got k={k}, n={n}")
    if k == 1:
        return np.zeros(n, dtype=np.int64), float(((X - X.mean(0)) ** 2).sum())
    if len(np.unique(X, axis=0)) < k:
        raise ValueError(f"k={k} exceeds the number of distinct points")
    rng = np.random.default_rng(rng)
    best = (None, np.inf)
    for _ in range(max(restarts, 1)):
        lab, inertia = _lloyd(X, _plusplus(X, k, rng), max_iter, tol)
        if inertia < best[1]:
            best = (lab, inertia)
    return best[0].astype(np.int64), best[1]


def _centers(X, lab, k):
    return np.array([X[lab == j].mean(0) for j in range(k)])


# ---------------------------------------------------------------- support selection

def select_support(g: Graph, opts: AlgorithmOptions) -> np.ndarray:
    """Nodes on which the spectral step runs, sorted.

    Isolated nodes and small components contribute spurious eigenvalues to
    every operator used here (small cycles even to H_r below sqrt(rho)), so
    they are excluded and labelled afterwards.
    """
    comps = connected_components(g)
    if opts.components == "largest":
        keep = [comps[0]]
    elif opts.components == "large":
        floor = max(opts.min_component_size, opts.min_component_frac * g.n)
        keep = [c for c in comps if len(c) >= floor] or [comps[0]]
    elif opts.components == "all":
        keep = comps
    else:
        raise ValueError(f"unknown component policy {opts.components!r}")
    return np.sort(np.concatenate(keep))


def _lift(X_sub, support, n):
    X = np.zeros((n, X_sub.shape[1]))
    X[support] = X_sub
    return X


def _cluster_rows(X_sub, support, n, k, opts):
    """k-means on the supported rows; the remaining nodes join the centroid nearest the origin."""
    if k == 1 or X_sub.shape[1] == 0:
        return np.zeros(n, dtype=np.int64), 0.0
    lab_sub, inertia = kmeans(X_sub, k, opts.kmeans_restarts, rng=opts.seed)
    lab = np.empty(n, dtype=np.int64)
    lab[support] = lab_sub
    if len(support) < n:
        centers = _centers(X_sub, lab_sub, k)
        lab[np.setdiff1d(np.arange(n), support)] = int((centers ** 2).sum(1).argmin())
    return lab, inertia


# ---------------------------------------------------------------- main pipeline

def estimate_k(g: Graph, dense_cap: int = DENSE_CAP) -> int:
    """Number of negative eigenvalues of H at r = sqrt(rho_hat), read off an LDL^T inertia."""
    if g.m < 1:
        raise ValueError("graph has no edges")
    return log_abs_det_H(g, np.sqrt(estimate_rho_B(g)), dense_cap).n_negative


def algorithm1(g: Graph, opts: AlgorithmOptions | None = None) -> ClusteringResult:
    """Cluster ``g`` with one Bethe-Hessian per informative direction.

    For each p = 2..k_hat the p-th eigenvector of H_r is taken at the zero
    crossing r = zeta_p of its eigenvalue. Rows of the resulting embedding are
    grouped by k-means.
    """
    opts = opts or AlgorithmOptions()
    if g.m < 1:
        raise ValueError("graph has no edges")
    support = select_support(g, opts)
    sub = g.subgraph(support)
    rho = estimate_rho_B(sub)
    forced = opts.k is not None
    if forced:
        if not 1 <= opts.k <= sub.n:
            raise InfeasibleK(f"k={opts.k} is not in [1, {sub.n}]")
        k_hat = opts.k
    else:
        k_hat = max(estimate_k(sub, opts.dense_cap), 1)
    if k_hat == 1:
        return ClusteringResult(1, LabelVector.from_array(np.zeros(g.n, dtype=int)), [],
                                np.zeros((g.n, 0)), [], 0.0, support)

    spec = BetheSpectrum(sub, opts.tol, rng=opts.seed)
    cols, zetas, diags = [], [], []
    for p in range(2, k_hat + 1):
        try:
            cr = estimate_zeta_method2(sub, p, opts.zeta_tol, opts.grid, spec, rho)
            pair, r_used = cr.pair, float(cr.r_star)
            diag = {"p": p, "r": r_used, "nu": pair.value, "residual": pair.residual,
                    "evaluations": cr.evaluations, "bracket_width": float(cr.achieved_width)}
        except (NoCrossing, NotDetectable) as exc:
            if not forced:
                log.warning("dropping column p=%d: %s", p, exc)
                continue
            # k is imposed by the caller: keep the column at r = sqrt(rho_hat)
            r_used = float(np.sqrt(rho))
            pair = spec.pairs(r_used, p)[p - 1]
            diag = {"p": p, "r": r_used, "nu": pair.value, "residual": pair.residual,
                    "fallback": str(exc)}
        cols.append(pair.vector)
        zetas.append(float(r_used))
        diags.append(diag)
    k_eff = len(cols) + 1
    if k_eff == 1:
        return ClusteringResult(1, LabelVector.from_array(np.zeros(g.n, dtype=int)), [],
                                np.zeros((g.n, 0)), diags, 0.0, support)
    X_sub = np.column_stack(cols)
    lab, inertia = _cluster_rows(X_sub, support, g.n, k_eff, opts)
    return ClusteringResult(k_eff, LabelVector(lab, k_eff), zetas, _lift(X_sub, support, g.n),
                            diags, inertia, support)


# ---------------------------------------------------------------- baselines

BASELINES = ("bethe_fixed_r", "adjacency", "rw_second", "rw_oracle_best")


def _informative(sub: Graph, method: str, k: int, r: float | None, opts: AlgorithmOptions):
    if method == "bethe_fixed_r":
        r = np.sqrt(estimate_rho_B(sub)) if r is None else r
        pairs = smallest_eigenpairs(build_bethe_hessian(sub, r), k, opts.tol, rng=opts.seed,
                                    dense_cap=opts.dense_cap)
    elif method == "adjacency":
        pairs = largest_eigenpairs(sub.adjacency(), k, opts.tol, rng=opts.seed,
                                   dense_cap=opts.dense_cap)
    elif method == "rw_second":
        pairs = rw_informative_eigvecs(sub, k, opts.tol, rng=opts.seed)
    else:
        raise ValueError(f"unknown method {method!r}")
    return np.column_stack([e.vector for e in pairs[1:k]])


def baseline_cluster(g: Graph, method: str, k: int, truth: LabelVector | None = None,
                     r: float | None = None, opts: AlgorithmOptions | None = None) -> LabelVector:
    """Spectral clustering with k-1 informative eigenvectors of a fixed operator.

    ``bethe_fixed_r`` uses H_r (r defaults to sqrt(rho_hat)), ``adjacency``
    uses A, ``rw_second`` uses D^-1 A. ``rw_oracle_best`` clusters each of the
    top 25 eigenvectors of D^-1 A separately and keeps the labelling with the
    best overlap against ``truth``.
    """
    opts = opts or AlgorithmOptions()
    if method not in BASELINES:
        raise ValueError(f"unknown method {method!r}; choose from {BASELINES}")
    if method == "rw_oracle_best" and truth is None:
        raise ValueError("rw_oracle_best needs ground-truth labels")
    support = select_support(g, opts)
    sub = g.subgraph(support)
    if not 1 <= k <= sub.n:
        raise InfeasibleK(f"k={k} is not in [1, {sub.n}]")
    if k == 1:
        return LabelVector.from_array(np.zeros(g.n, dtype=int))
    if method != "rw_oracle_best":
        X = _informative(sub, method, k, r, opts)
        lab, _ = _cluster_rows(X, support, g.n, k, opts)
        return LabelVector(lab, k)

    count = min(ORACLE_SCAN, sub.n)
    pairs = rw_informative_eigvecs(sub, count, opts.tol, rng=opts.seed)
    X2 = np.column_stack([e.vector for e in pairs[1:k]])
    lab, _ = _cluster_rows(X2, support, g.n, k, opts)
    best = LabelVector(lab, k)
    best_ov = overlap(best, truth)
    for e in pairs[1:]:
        x = e.vector[:, None]
        if len(np.unique(x)) < k:
            continue
        lab, _ = _cluster_rows(x, support, g.n, k, opts)
        cand = LabelVector(lab, k)
        ov = overlap(cand, truth)
        if ov > best_ov:
            best, best_ov = cand, ov
    return best


def options_dict(opts: AlgorithmOptions) -> dict:
    return asdict(opts)
