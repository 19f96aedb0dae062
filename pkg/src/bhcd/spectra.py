"""Bethe-Hessian assembly and symmetric eigensolvers.

Matrices are plain ``scipy.sparse.csr_matrix`` objects whose (i, j) and (j, i)
entries are written from the same value, so they are exactly symmetric.
The production eigensolver is a thick-restart Lanczos iteration with full
reorthogonalisation; the dense LAPACK route serves small problems and tests.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp

from .graph import Graph

log = logging.getLogger(__name__)

DENSE_CAP = 2000  # largest n for which dense routes are allowed at all
DENSE_AUTO = 400  # "auto" eigensolves go dense up to this size; Lanczos is faster beyond


class ConvergenceError(RuntimeError):
    def __init__(self, msg, best_residual=np.inf):
        super().__init__(f"{msg} (best residual {best_residual:.3e})")
        self.best_residual = best_residual


@dataclass
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


def build_bethe_hessian(g: Graph, r: float) -> sp.csr_matrix:
    """H_r = (r^2 - 1) I + D - r A."""
    n = g.n
    diag = (r * r - 1.0) + g.degrees.astype(float)
    rows = np.repeat(np.arange(n), g.degrees)
    data = np.concatenate([diag, np.full(len(g.indices), -float(r))])
    ii = np.concatenate([np.arange(n), rows])
    jj = np.concatenate([np.arange(n), g.indices])
    return sp.csr_matrix((data, (ii, jj)), shape=(n, n))


def laplacian(g: Graph) -> sp.csr_matrix:
    return build_bethe_hessian(g, 1.0)


def normalized_adjacency(g: Graph) -> sp.csr_matrix:
    """D^{-1/2} A D^{-1/2}; requires every degree to be positive."""
    d = g.degrees.astype(float)
    if (d == 0).any():
        raise ValueError("graph has degree-0 nodes; restrict to a component first")
    s = 1.0 / np.sqrt(d)
    A = g.adjacency()
    return sp.csr_matrix(sp.diags(s) @ A @ sp.diags(s))


def inf_norm(M) -> float:
    if sp.issparse(M):
        return float(abs(M).sum(axis=1).max()) if M.shape[0] else 0.0
    return float(np.abs(M).sum(axis=1).max())


def dense_spectrum(M, cap: int = DENSE_CAP) -> np.ndarray:
    """All eigenvalues, ascending (Householder tridiagonalisation + implicit QL/QR)."""
    n = M.shape[0]
    if n > cap:
        raise ValueError(f"dense spectrum refused for n={n} > cap={cap}")
    A = M.toarray() if sp.issparse(M) else np.asarray(M, dtype=float)
    return sla.eigh(A, eigvals_only=True, driver="ev")


def _fix_sign(x: np.ndarray) -> np.ndarray:
    i = np.argmax(np.abs(x))
    return -x if x[i] < 0 else x


def _orthonormal_start(n, basis, rng, v0=None):
    v = rng.standard_normal(n) if v0 is None else np.array(v0, dtype=float)
    for _ in range(2):
        if basis is not None and len(basis):
            v -= basis.T @ (basis @ v)
    nv = np.linalg.norm(v)
    if nv < 1e-12:
        return _orthonormal_start(n, basis, rng)
    return v / nv


def _lanczos(matvec, n, p, scale, tol, rng, v0=None, locked=None, maxdim=None,
             max_restarts=400, check=8, budget=None):
    """Thick-restart Lanczos for the ``p`` algebraically smallest eigenpairs.

    Works in the orthogonal complement of the rows of ``locked``. Returns
    (values, vectors as rows, residual norms, converged flag, matvec count).
    With ``budget`` the iteration may stop early, unconverged.
    """
    dim_free = n - (0 if locked is None else len(locked))
    p = min(p, dim_free)
    maxdim = min(maxdim or max(3 * p + 60, 100), dim_free)
    keep = min(max(p + 10, maxdim // 3), maxdim - 1)
    V = np.zeros((maxdim + 1, n))
    T = np.zeros((maxdim + 1, maxdim + 1))
    V[0] = _orthonormal_start(n, locked, rng, v0)
    breakdown = 1e-12 * scale
    nmv = 0
    best = np.inf

    def step(j):
        w = matvec(V[j])
        h = np.zeros(j + 1)
        for _ in range(2):
            if locked is not None:
                w -= locked.T @ (locked @ w)
            hk = V[: j + 1] @ w
            w -= V[: j + 1].T @ hk
            h += hk
        T[: j + 1, j] = h
        T[j, : j + 1] = h
        beta = np.linalg.norm(w)
        if beta < breakdown:
            # invariant subspace found; continue from a fresh orthogonal direction
            if j + 1 < dim_free:
                basis = V[: j + 1] if locked is None else np.vstack([locked, V[: j + 1]])
                V[j + 1] = _orthonormal_start(n, basis, rng)
            return 0.0
        V[j + 1] = w / beta
        T[j, j + 1] = T[j + 1, j] = beta
        return beta

    j = 0
    for _ in range(max_restarts):
        while j < maxdim:
            beta = step(j)
            nmv += 1
            j += 1
            last = j == maxdim or j == dim_free
            if j >= p and (j % check == 0 or last or (budget and nmv >= budget)):
                theta, S = np.linalg.eigh(T[:j, :j])
                res = np.abs(beta * S[j - 1, :p])
                best = min(best, res.max())
                done = (res <= tol * scale).all() or j == dim_free
                if done or (budget and nmv >= budget):
                    return theta[:p], S[:, :p].T @ V[:j], res, bool(done), nmv
                if last:
                    break
        # thick restart: lowest Ritz vectors plus the current residual direction
        Y = S[:, :keep].T @ V[:j]
        nxt = V[j].copy()
        V[:] = 0.0
        T[:] = 0.0
        V[:keep] = Y
        V[keep] = nxt
        T[np.arange(keep), np.arange(keep)] = theta[:keep]
        j = keep
    raise ConvergenceError("Lanczos did not converge", best)


def smallest_eigenpairs(M, p: int, tol: float = 1e-10, method: str = "auto",
                        rng=None, v0=None, dense_cap: int = DENSE_CAP) -> list[EigenPair]:
    """The ``p`` algebraically smallest eigenpairs of the symmetric matrix ``M``.

    Each residual satisfies ||M x - l x|| <= tol * ||M||_inf. ``method`` is
    "dense", "lanczos" or "auto" (dense up to min(DENSE_AUTO, dense_cap)). ``v0`` (vector
    or n x q block) warm-starts the iteration.
    """
    n = M.shape[0]
    if not 1 <= p <= n:
        raise ValueError(f"need 1 <= p <= n, got p={p}, n={n}")
    if tol <= 0:
        raise ValueError("tol must be positive")
    if method == "auto":
        method = "dense" if n <= min(DENSE_AUTO, dense_cap) else "lanczos"
    M = sp.csr_matrix(M)
    scale = max(inf_norm(M), 1e-300)
    if method == "dense":
        if n > dense_cap:
            raise ValueError(f"dense eigensolve refused for n={n} > cap={dense_cap}")
        w, X = sla.eigh(M.toarray(), subset_by_index=[0, p - 1])
        vecs = X.T
    elif method == "lanczos":
        w, vecs = _lanczos_with_check(M, p, scale, tol, np.random.default_rng(rng), v0)
    else:
        raise ValueError(f"unknown method {method!r}")
    out = []
    for val, x in zip(w, vecs):
        x = _fix_sign(x / np.linalg.norm(x))
        out.append(EigenPair(float(val), x, float(np.linalg.norm(M @ x - val * x))))
    worst = max(e.residual for e in out)
    if worst > tol * scale * 10:
        raise ConvergenceError("eigenpair residual above tolerance", worst)
    return out


def _start_vector(v0, n):
    if v0 is None:
        return None
    v0 = np.asarray(v0, dtype=float)
    if v0.ndim == 2:
        # block of previous eigenvectors as columns; distinct weights avoid cancellation
        v0 = v0 @ np.linspace(1.0, 2.0, v0.shape[1])
    return v0


def _lanczos_with_check(M, p, scale, tol, rng, v0):
    n = M.shape[0]
    mv = M.dot
    start = _start_vector(v0, n)
    if start is not None:
        # keep a random component so missing directions are still reachable
        start = start / np.linalg.norm(start) + 1e-3 * rng.standard_normal(n) / np.sqrt(n)
    vals, vecs, _, ok, nmv = _lanczos(mv, n, p, scale, tol, rng, v0=start)
    if not ok:
        raise ConvergenceError("Lanczos did not converge", np.inf)
    # Single-vector Krylov spaces miss repeated eigenvalues; probe the
    # complement of what was found with an independent start.
    for _ in range(p):
        if len(vecs) >= n:
            break
        Q, _ = np.linalg.qr(vecs.T)
        mu, y, res, ok2, _ = _lanczos(mv, n, 1, scale, tol, rng, locked=Q.T, budget=max(nmv, 60))
        top = vals.max()
        gap = 1e-10 * max(scale, 1.0)
        if mu[0] - res[0] >= top - gap:
            break
        if not ok2:
            mu, y, res, ok2, _ = _lanczos(mv, n, 1, scale, tol, rng, locked=Q.T, v0=y[0])
            if not ok2 or mu[0] >= top - gap:
                break
        vecs = np.vstack([vecs, y])
        vals = np.concatenate([vals, mu])
        order = np.argsort(vals)[:p]
        vals, vecs = vals[order], vecs[order]
    # final Rayleigh-Ritz on the collected subspace
    Q, _ = np.linalg.qr(vecs.T)
    Hs = Q.T @ (M @ Q)
    w, S = np.linalg.eigh((Hs + Hs.T) / 2)
    return w[:p], (Q @ S[:, :p]).T


def largest_eigenpairs(M, p: int, tol: float = 1e-10, method: str = "auto", rng=None,
                       v0=None, dense_cap: int = DENSE_CAP) -> list[EigenPair]:
    """The ``p`` algebraically largest eigenpairs, in decreasing order."""
    pairs = smallest_eigenpairs(-sp.csr_matrix(M), p, tol, method, rng, v0, dense_cap)
    return [EigenPair(-e.value, e.vector, e.residual) for e in pairs]


def rw_informative_eigvecs(g: Graph, count: int, tol: float = 1e-10, method: str = "auto",
                           rng=None) -> list[EigenPair]:
    """Leading eigenpairs of D^{-1} A, via the similar matrix D^{-1/2} A D^{-1/2}.

    Returned vectors are the back-transformed D^{-1/2} y, rescaled to unit norm;
    residuals are those of D^{-1} A on the returned vector.
    """
    N = normalized_adjacency(g)
    pairs = largest_eigenpairs(N, count, tol, method, rng)
    s = 1.0 / np.sqrt(g.degrees.astype(float))
    A = g.adjacency()
    out = []
    for e in pairs:
        x = s * e.vector
        x = _fix_sign(x / np.linalg.norm(x))
        res = np.linalg.norm(s * s * (A @ x) - e.value * x)
        out.append(EigenPair(e.value, x, float(res)))
    return out


def write_matrix_market(M, path) -> None:
    """Dump a symmetric matrix in MatrixMarket coordinate format."""
    from scipy.io import mmwrite

    mmwrite(str(path), sp.coo_matrix(M), symmetry="symmetric", precision=17)
