"""Non-backtracking operator and determinant/inertia of the Bethe-Hessian."""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from scipy.linalg import lapack

from .graph import Graph, connected_components
from .spectra import DENSE_CAP, build_bethe_hessian, inf_norm

log = logging.getLogger(__name__)

EXPLICIT_B_CAP = 10**5


@dataclass(frozen=True, eq=False)
class DirectedEdgeIndex:
    """Directed edges i->j indexed by their position in the CSR arrays."""

    src: np.ndarray
    dst: np.ndarray
    reverse: np.ndarray

    @classmethod
    def of(cls, g: Graph) -> "DirectedEdgeIndex":
        src = np.repeat(np.arange(g.n), g.degrees)
        dst = np.asarray(g.indices)
        # position of (j -> i): locate i inside row j (rows are sorted)
        key = src * g.n + dst
        rev_key = dst * g.n + src
        reverse = np.searchsorted(key, rev_key)
        return cls(src, dst, reverse)

    def __len__(self):
        return len(self.src)

    def lookup(self, i: int, j: int) -> int:
        pos = np.flatnonzero((self.src == i) & (self.dst == j))
        if not len(pos):
            raise KeyError((i, j))
        return int(pos[0])


def build_B(g: Graph) -> tuple[sp.csr_matrix, DirectedEdgeIndex]:
    """Explicit B with B[(i->j), (j->l)] = 1 for l != i."""
    if g.m < 1:
        raise ValueError("graph has no edges")
    idx = DirectedEdgeIndex.of(g)
    if len(idx) > EXPLICIT_B_CAP:
        raise ValueError(f"explicit B refused for 2m={len(idx)} > {EXPLICIT_B_CAP}; use apply_B")
    counts = g.degrees[idx.dst]
    rows = np.repeat(np.arange(len(idx)), counts)
    starts = g.indptr[idx.dst]
    offs = np.arange(len(rows)) - np.repeat(np.cumsum(counts) - counts, counts)
    cols = np.repeat(starts, counts) + offs
    keep = cols != np.repeat(idx.reverse, counts)
    rows, cols = rows[keep], cols[keep]
    B = sp.csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(len(idx), len(idx)))
    return B, idx


def apply_B(g: Graph, idx: DirectedEdgeIndex, x: np.ndarray) -> np.ndarray:
    """Matrix-free B x: (Bx)_(i->j) = sum_l x_(j->l) - x_(j->i)."""
    out_sum = np.bincount(idx.src, weights=x, minlength=g.n)
    return out_sum[idx.dst] - x[idx.reverse]


def power_rho_B(g: Graph, tol: float = 1e-10, maxiter: int = 100_000) -> float:
    """Spectral radius of B by shifted power iteration on (B + I).

    Forests have nilpotent B, so 0 is returned for them directly.
    """
    if g.m < 1:
        raise ValueError("graph has no edges")
    ncomp = len(connected_components(g))
    if g.m == g.n - ncomp:
        return 0.0
    idx = DirectedEdgeIndex.of(g)
    x = np.ones(len(idx)) / np.sqrt(len(idx))
    est = prev = np.nan
    for it in range(maxiter):
        y = apply_B(g, idx, x)
        est = float(x @ y)
        z = y + x
        x = z / np.linalg.norm(z)
        if it > 2 and abs(est - prev) <= tol * max(abs(est), 1.0):
            return est
        prev = est
    raise RuntimeError(f"power iteration did not converge; last Rayleigh estimate {est}")


class DetResult(NamedTuple):
    sign: int
    logabs: float
    n_negative: int


def _inertia_dense(H: np.ndarray, scale: float) -> DetResult:
    """Bunch-Kaufman LDL^T (LAPACK sytrf) with 1x1 and 2x2 pivot blocks."""
    lu, ipiv, info = lapack.dsytrf(H, lower=1, overwrite_a=1)
    if info < 0:
        raise RuntimeError(f"dsytrf argument error {info}")
    n = H.shape[0]
    sign, logabs, neg = 1, 0.0, 0
    tiny = 1e-10 * scale
    k = 0
    while k < n:
        if ipiv[k] > 0:
            ev = np.array([lu[k, k]])
            k += 1
        else:
            a, b, c = lu[k, k], lu[k + 1, k], lu[k + 1, k + 1]
            ev = np.linalg.eigvalsh(np.array([[a, b], [b, c]]))
            k += 2
        for e in ev:
            if abs(e) < tiny:
                sign = 0
                logabs = -np.inf
                continue
            neg += e < 0
            if sign:
                sign *= 1 if e > 0 else -1
                logabs += np.log(abs(e))
    return DetResult(int(sign), float(logabs), int(neg))


def _inertia_sparse(H: sp.csr_matrix, scale: float) -> DetResult | None:
    """No-pivot symmetric LDL^T via SuperLU in symmetric mode.

    Returns None when the factorisation cannot be trusted (a pivot row swap,
    a tiny pivot or large element growth), so the caller can fall back.
    """
    try:
        lu = spla.splu(sp.csc_matrix(H), permc_spec="MMD_AT_PLUS_A", diag_pivot_thresh=0.0,
                       options=dict(SymmetricMode=True))
    except RuntimeError:
        return None
    if not np.array_equal(lu.perm_r, lu.perm_c):
        return None
    piv = lu.U.diagonal()
    if np.abs(piv).min() < 1e-8 * scale or abs(lu.L).max() > 1e8:
        return None
    neg = int((piv < 0).sum())
    sign = -1 if neg % 2 else 1
    return DetResult(sign, float(np.log(np.abs(piv)).sum()), neg)


def log_abs_det_H(g: Graph, r: float, dense_cap: int = DENSE_CAP) -> DetResult:
    """Sign and log|det| of H_r with its count of negative eigenvalues.

    The sign is 0 when a pivot is below 1e-10 times ||H_r||_inf.
    """
    H = build_bethe_hessian(g, r)
    scale = max(inf_norm(H), 1.0)
    if g.n > dense_cap:
        res = _inertia_sparse(H, scale)
        if res is not None:
            return res
        log.info("sparse LDL^T rejected at r=%g; falling back to dense", r)
    return _inertia_dense(H.toarray(), scale)
