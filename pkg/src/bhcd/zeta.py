"""Locating zero crossings of the Bethe-Hessian eigenvalue curves nu_p(r)."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .graph import Graph, estimate_rho_B
from .spectra import EigenPair, build_bethe_hessian, inf_norm, smallest_eigenpairs

log = logging.getLogger(__name__)

GRID_POINTS = 32


class NotDetectable(RuntimeError):
    """nu_p is already nonnegative at the top of the search bracket."""


class NoCrossing(RuntimeError):
    def __init__(self, msg, fallback: float | None = None):
        super().__init__(msg)
        self.fallback = fallback


@dataclass
class CrossingResult:
    r_star: float
    p: int
    bracket: tuple[float, float]
    evaluations: int
    achieved_width: float
    n_sign_changes: int = 1
    pair: EigenPair | None = field(default=None, repr=False)


class BetheSpectrum:
    """Eigenvalue curves of H_r on one graph, warm-starting successive solves."""

    def __init__(self, g: Graph, tol: float = 1e-10, method: str = "auto", rng=0):
        self.g = g
        self.tol = tol
        self.method = method
        self.rng = np.random.default_rng(rng)
        self.evaluations = 0
        self._last = None
        self._values = {}

    def pairs(self, r: float, p: int) -> list[EigenPair]:
        H = build_bethe_hessian(self.g, r)
        v0 = None
        if self._last is not None and self._last.shape[1] >= 1:
            v0 = self._last
        out = smallest_eigenpairs(H, p, self.tol, self.method, rng=self.rng, v0=v0)
        self._last = np.column_stack([e.vector for e in out])
        self.evaluations += 1
        return out

    def nu(self, r: float, p: int) -> float:
        key = (float(r), p)
        if key not in self._values:
            self._values[key] = self.pairs(r, p)[p - 1].value
        return self._values[key]

    def zero_tol(self, r: float) -> float:
        return 10 * self.tol * inf_norm(build_bethe_hessian(self.g, r))


def nu(g: Graph, r: float, p: int, tol: float = 1e-10, method: str = "auto") -> float:
    """p-th smallest eigenvalue of H_r."""
    if not 1 <= p <= g.n:
        raise ValueError("need 1 <= p <= n")
    return smallest_eigenpairs(build_bethe_hessian(g, r), p, tol, method)[p - 1].value


def zeta_from_params(c_in: float, c_out: float) -> float:
    if c_in == c_out:
        raise ValueError("zeta is undefined for c_in == c_out")
    return (c_in + c_out) / (c_in - c_out)


def _bisect(f, lo, hi, f_lo, f_hi, tol):
    """Shrink [lo, hi] with f(lo) >= 0 > f(hi) (or the mirror) to width <= tol."""
    n = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        n += 1
        if (fm < 0) == (f_lo < 0):
            lo, f_lo = mid, fm
        else:
            hi, f_hi = mid, fm
    return lo, hi, f_lo, f_hi, n


def _scan_down(f, grid, entering_negative=False):
    """Evaluate f from the top of ``grid`` downwards until its sign flips.

    With ``entering_negative`` only a flip with f(lower) >= 0 > f(upper) counts.
    Returns (index of the lower point, its value, value above, flips seen) or None.
    """
    f_above = f(grid[-1])
    flips = 0
    for i in range(len(grid) - 2, -1, -1):
        fi = f(grid[i])
        if (fi < 0) != (f_above < 0):
            flips += 1
            if not entering_negative or f_above < 0:
                return i, fi, f_above, flips
        f_above = fi
    return None


def estimate_zeta_method2(g: Graph, p: int = 2, tol: float | None = None, grid: int = GRID_POINTS,
                          spectrum: BetheSpectrum | None = None, rho: float | None = None) -> CrossingResult:
    """Crossing of nu_p(r) through zero inside (1, sqrt(rho_hat)).

    The bracket is scanned on a logarithmic grid from the top down; the first
    point where nu_p turns from nonnegative (below) to negative (above) is
    refined by bisection to width ``tol`` (default 1e-3 * sqrt(rho_hat)). When nu_p(sqrt(rho)) >= 0 but nu_p(-sqrt(rho)) < 0
    the mirrored bracket (-sqrt(rho), -1) is searched instead.
    """
    if p < 2:
        raise ValueError("p must be at least 2")
    spec = spectrum or BetheSpectrum(g)
    rho = estimate_rho_B(g) if rho is None else rho
    top = np.sqrt(rho)
    tol = 1e-3 * top if tol is None else tol
    start_evals = spec.evaluations
    if top <= 1:
        raise NotDetectable(f"sqrt(rho_hat) = {top:.4g} <= 1: no search bracket")

    # at negative r the trivial direction is no longer among the negative
    # eigenvalues, so the p-th informative direction is eigenvalue p - 1 there
    sgn, q = 1.0, p
    if spec.nu(top, p) >= 0 and spec.nu(-top, p - 1) < 0:
        sgn, q = -1.0, p - 1

    def f(s):
        return spec.nu(sgn * s, q)

    lo_edge = 1.0 + 1e-9
    pts = np.geomspace(lo_edge, top, grid)
    hit = _scan_down(f, pts, entering_negative=True)
    if hit is None and f(pts[0]) < 0:
        # nu_p stayed negative down to r ~ 1: refine near the bottom once
        pts = np.geomspace(lo_edge, pts[1], grid)
        hit = _scan_down(f, pts, entering_negative=True)
    if hit is None:
        if all(f(x) >= 0 for x in pts):
            raise NotDetectable(f"nu_{p} is nonnegative on the whole bracket (1, {top:.4g})")
        if abs(spec.nu(sgn * 1.0, q)) <= spec.zero_tol(1.0):
            pair = spec.pairs(sgn * 1.0, q)[q - 1]
            return CrossingResult(sgn * 1.0, p, (1.0, float(pts[0])), spec.evaluations - start_evals,
                                  float(pts[0] - 1.0), 1, pair)
        raise NoCrossing(f"no sign change of nu_{p} in (1, {top:.4g})", fallback=sgn * top)
    i, f_lo, f_hi, flips = hit
    lo, hi, f_lo, f_hi, _ = _bisect(f, pts[i], pts[i + 1], f_lo, f_hi, tol)
    r_star = 0.5 * (lo + hi)
    pair = spec.pairs(sgn * r_star, q)[q - 1]
    bracket = (sgn * lo, sgn * hi) if sgn > 0 else (sgn * hi, sgn * lo)
    return CrossingResult(sgn * r_star, p, bracket, spec.evaluations - start_evals, hi - lo, flips,
                          pair)


def estimate_gamma_1_2(g: Graph, tol: float | None = None, grid: int = GRID_POINTS,
                       spectrum: BetheSpectrum | None = None) -> tuple[float, float]:
    """Largest zero crossings of nu_1 and nu_2 in (sqrt(rho_hat), max degree + 1].

    These estimate the two leading real eigenvalues of B; their ratio
    estimates zeta.
    """
    spec = spectrum or BetheSpectrum(g)
    rho = estimate_rho_B(g)
    lo_r = np.sqrt(rho)
    tol = 1e-3 * lo_r if tol is None else tol
    hi_r = float(g.degrees.max()) + 1.0
    pts = np.geomspace(lo_r, hi_r, grid)
    vals = {}

    def both(r):
        if r not in vals:
            pr = spec.pairs(r, 2)
            vals[r] = (pr[0].value, pr[1].value)
        return vals[r]

    out = []
    for p in (1, 2):
        def f(r, p=p):
            return both(r)[p - 1]
        hit = _scan_down(f, pts)
        if hit is None:
            if p == 2:
                raise NoCrossing("gamma_2 inside bulk: no sign change of nu_2 above sqrt(rho_hat)",
                                 fallback=lo_r)
            raise NoCrossing("no sign change of nu_1 above sqrt(rho_hat)", fallback=lo_r)
        i, f_lo, f_hi, _ = hit
        lo, hi, *_ = _bisect(f, pts[i], pts[i + 1], f_lo, f_hi, tol)
        out.append(0.5 * (lo + hi))
    return out[0], out[1]


def zeta_method1(g: Graph, tol: float | None = None) -> float:
    g1, g2 = estimate_gamma_1_2(g, tol)
    return g1 / g2
