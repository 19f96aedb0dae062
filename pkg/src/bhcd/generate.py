"""Degree-corrected stochastic block model sampling."""
from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .graph import Graph, LabelVector

log = logging.getLogger(__name__)


class InfeasibleParameters(ValueError):
    pass


@dataclass(frozen=True)
class ThetaDistribution:
    """Law of the intrinsic connectivities, normalised to mean one.

    ``powerlaw(a, b, exponent)`` draws ``U(a, b) ** exponent`` and divides by
    the exact mean of that law, so the population mean is exactly 1.
    """

    kind: str = "constant"
    a: float = 3.0
    b: float = 10.0
    exponent: float = 4.0

    def __post_init__(self):
        if self.kind not in ("constant", "powerlaw"):
            raise ValueError(f"unknown theta distribution {self.kind!r}")
        if self.kind == "powerlaw" and not (0 < self.a < self.b):
            raise ValueError("powerlaw needs 0 < a < b")

    @classmethod
    def constant(cls) -> "ThetaDistribution":
        return cls("constant")

    @classmethod
    def powerlaw(cls, a=3.0, b=10.0, exponent=4.0) -> "ThetaDistribution":
        return cls("powerlaw", float(a), float(b), float(exponent))

    def _raw_moment(self, q: float) -> float:
        # E[U(a,b)^q]
        e = q + 1.0
        return (self.b**e - self.a**e) / (e * (self.b - self.a))

    @property
    def normaliser(self) -> float:
        return 1.0 if self.kind == "constant" else self._raw_moment(self.exponent)

    @property
    def phi(self) -> float:
        """Exact second moment E[theta^2]."""
        if self.kind == "constant":
            return 1.0
        return self._raw_moment(2 * self.exponent) / self.normaliser**2

    def sample(self, n: int, rng=None) -> np.ndarray:
        if n < 1:
            raise ValueError("n must be positive")
        if self.kind == "constant":
            return np.ones(n)
        rng = np.random.default_rng(rng)
        return rng.uniform(self.a, self.b, size=n) ** self.exponent / self.normaliser

    def estimate_phi(self, n: int = 10**6, rng=None) -> float:
        """Monte-Carlo estimate of E[theta^2]."""
        th = self.sample(n, rng)
        return float(np.mean(th * th))

    def to_dict(self) -> dict:
        if self.kind == "constant":
            return {"kind": "constant"}
        return {"kind": "powerlaw", "a": self.a, "b": self.b, "exponent": self.exponent}

    @classmethod
    def from_dict(cls, d: dict | str) -> "ThetaDistribution":
        if isinstance(d, str):
            d = {"kind": d}
        if d.get("kind", "constant") == "constant":
            return cls.constant()
        return cls.powerlaw(d.get("a", 3.0), d.get("b", 10.0), d.get("exponent", 4.0))


def sample_theta(dist: ThetaDistribution, n: int, rng=None) -> np.ndarray:
    return dist.sample(n, rng)


@dataclass(frozen=True, eq=False)
class DcsbmParams:
    n: int
    pi: np.ndarray
    C: np.ndarray
    theta: ThetaDistribution = field(default_factory=ThetaDistribution.constant)
    seed: int = 0

    def __post_init__(self):
        pi = np.asarray(self.pi, dtype=float)
        C = np.asarray(self.C, dtype=float)
        k = len(pi)
        if C.shape != (k, k):
            raise ValueError("C must be k x k with k = len(pi)")
        if not np.isclose(pi.sum(), 1.0, atol=1e-12) or (pi <= 0).any():
            raise ValueError("class proportions must be positive and sum to 1")
        if not np.array_equal(C, C.T) or (C < 0).any():
            raise ValueError("C must be symmetric and nonnegative")
        rows = C @ pi
        if np.abs(rows - rows[0]).max() > 1e-12 * max(1.0, abs(rows[0])):
            raise InfeasibleParameters(f"C Pi 1 is not constant: {rows}")
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "C", C)

    @property
    def k(self) -> int:
        return len(self.pi)

    @property
    def c(self) -> float:
        return float((self.C @ self.pi)[0])

    @classmethod
    def two_class(cls, n, c_in, c_out, theta=None, seed=0) -> "DcsbmParams":
        C = np.array([[c_in, c_out], [c_out, c_in]], dtype=float)
        return cls(n, np.array([0.5, 0.5]), C, theta or ThetaDistribution.constant(), seed)

    def class_sizes(self) -> np.ndarray:
        """Rounded n*pi; the rounding remainder goes to the largest class."""
        sizes = np.rint(self.n * self.pi).astype(np.int64)
        sizes[np.argmax(self.pi)] += self.n - sizes.sum()
        if (sizes < 0).any():
            raise InfeasibleParameters("class sizes cannot be realised")
        return sizes

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "pi": self.pi.tolist(),
            "C": self.C.tolist(),
            "theta": self.theta.to_dict(),
            "seed": self.seed,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DcsbmParams":
        """Accepts either an explicit ``C``/``pi`` or a generator recipe.

        Recipe keys: ``c_in``, ``c_out`` and optionally ``k`` (default 2),
        ``f`` (default 0), ``pi`` (default equal sizes).
        """
        theta = ThetaDistribution.from_dict(d.get("theta", "constant"))
        seed = int(d.get("seed", 0))
        n = int(d["n"])
        if "C" in d:
            return cls(n, np.asarray(d["pi"]), np.asarray(d["C"]), theta, seed)
        k = int(d.get("k", 2))
        pi = np.asarray(d.get("pi", np.full(k, 1.0 / k)), dtype=float)
        C = build_affinity_k(k, d["c_in"], d["c_out"], d.get("f", 0.0), pi, rng=seed)
        return cls(n, pi, C, theta, seed)

    @classmethod
    def from_json(cls, path) -> "DcsbmParams":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))


def build_affinity_k(k: int, c_in: float, c_out: float, f: float, pi, rng=None) -> np.ndarray:
    """Random affinity matrix with C[0,0] = c_in and constant row sums of C Pi.

    Off-diagonal entries are U(c_out - f, c_out + f); the remaining diagonal
    entries are solved for so that (C Pi 1)_p = (C Pi 1)_0 for every p.
    """
    if k < 2:
        raise ValueError("need at least two classes")
    if c_out - f < 0:
        raise InfeasibleParameters("c_out - f must be nonnegative")
    pi = np.asarray(pi, dtype=float)
    if pi.shape != (k,):
        raise ValueError("pi must have length k")
    rng = np.random.default_rng(rng)
    C = np.zeros((k, k))
    iu = np.triu_indices(k, 1)
    C[iu] = rng.uniform(c_out - f, c_out + f, size=len(iu[0])) if f > 0 else c_out
    C = C + C.T
    C[0, 0] = c_in
    c = float(C[0] @ pi)
    for p in range(1, k):
        off = C[p] @ pi  # diagonal still zero here
        C[p, p] = (c - off) / pi[p]
        if C[p, p] < 0:
            raise InfeasibleParameters(f"row {p}: induced diagonal entry {C[p, p]:.4g} < 0")
    return C


class DcsbmSample(NamedTuple):
    graph: Graph
    labels: LabelVector
    theta: np.ndarray
    n_clipped: int


def _skip_positions(total: int, p: float, rng) -> np.ndarray:
    """Indices in [0, total) kept by independent Bernoulli(p) trials."""
    if total <= 0 or p <= 0:
        return np.empty(0, dtype=np.int64)
    if p >= 1:
        return np.arange(total, dtype=np.int64)
    out = []
    pos = -1
    while True:
        expect = (total - pos) * p
        size = int(expect + 6 * np.sqrt(expect) + 16)
        steps = np.cumsum(rng.geometric(p, size=size)) + pos
        out.append(steps[steps < total])
        if steps[-1] >= total:
            break
        pos = int(steps[-1])
    return np.concatenate(out)


def _tri_decode(t: np.ndarray):
    """Pair index t -> (i, j) with j < i for the enumeration t = i(i-1)/2 + j."""
    i = np.floor((1 + np.sqrt(1 + 8.0 * t)) / 2).astype(np.int64)
    i -= (i * (i - 1) // 2) > t
    i += ((i + 1) * i // 2) <= t
    return i, t - i * (i - 1) // 2


def sample_dcsbm(params: DcsbmParams, rng=None) -> DcsbmSample:
    """Draw one graph; each pair is an edge w.p. min(1, theta_i theta_j C_ab / n).

    Nodes are laid out class by class. Pairs are proposed per class block by
    geometric skipping at the block's maximal probability and then thinned.
    """
    rng = np.random.default_rng(params.seed if rng is None else rng)
    n = params.n
    sizes = params.class_sizes()
    labels = np.repeat(np.arange(params.k), sizes)
    theta = params.theta.sample(n, rng)
    starts = np.concatenate([[0], np.cumsum(sizes)])
    edges = []
    clipped = 0
    for a in range(params.k):
        for b in range(a, params.k):
            cab = params.C[a, b]
            sa, sb = sizes[a], sizes[b]
            if cab == 0 or sa == 0 or sb == 0:
                continue
            ta = theta[starts[a]:starts[a + 1]]
            tb = theta[starts[b]:starts[b + 1]]
            pmax = min(1.0, ta.max() * tb.max() * cab / n)
            if a == b:
                total = sa * (sa - 1) // 2
                t = _skip_positions(total, pmax, rng)
                i, j = _tri_decode(t)
            else:
                total = sa * sb
                t = _skip_positions(total, pmax, rng)
                i, j = t // sb, t % sb
            raw = ta[i] * tb[j] * cab / n
            clipped += int((raw > 1).sum())
            keep = rng.random(len(t)) * pmax < np.minimum(raw, 1.0)
            edges.append(np.column_stack([i[keep] + starts[a], j[keep] + starts[b]]))
    if clipped:
        log.warning("%d pair probabilities exceeded 1 and were clipped", clipped)
    e = np.concatenate(edges) if edges else np.empty((0, 2), dtype=np.int64)
    g = Graph.from_edges(n, e)
    return DcsbmSample(g, LabelVector(labels, params.k), theta, clipped)
