"""Immutable undirected sparse graphs, edge-list IO and degree statistics."""
from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components as _cc


class GraphFormatError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class Graph:
    """Undirected simple graph stored as CSR neighbor lists.

    ``node_ids[i]`` is the external identifier of compact node ``i``.
    """

    indptr: np.ndarray
    indices: np.ndarray
    node_ids: np.ndarray = field(default=None)

    def __post_init__(self):
        indptr = np.asarray(self.indptr, dtype=np.int64)
        indices = np.asarray(self.indices, dtype=np.int64)
        n = len(indptr) - 1
        ids = np.arange(n) if self.node_ids is None else np.asarray(self.node_ids)
        if len(ids) != n:
            raise ValueError("node_ids length does not match node count")
        for name, arr in (("indptr", indptr), ("indices", indices), ("node_ids", ids)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @classmethod
    def from_edges(cls, n: int, edges, node_ids=None) -> "Graph":
        """Build from an iterable/array of (u, v) pairs over 0..n-1.

        Self-loops are dropped and duplicates (in either orientation) merged.
        """
        e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if e.size and (e.min() < 0 or e.max() >= n):
            raise ValueError("edge endpoint out of range")
        e = e[e[:, 0] != e[:, 1]]
        lo = np.minimum(e[:, 0], e[:, 1])
        hi = np.maximum(e[:, 0], e[:, 1])
        key = np.unique(lo * max(n, 1) + hi)
        lo, hi = key // max(n, 1), key % max(n, 1)
        rows = np.concatenate([lo, hi])
        cols = np.concatenate([hi, lo])
        order = np.lexsort((cols, rows))
        rows, cols = rows[order], cols[order]
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, rows + 1, 1)
        return cls(np.cumsum(indptr), cols, node_ids)

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def m(self) -> int:
        return len(self.indices) // 2

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(len(self.indices))
        return sp.csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def edges(self) -> np.ndarray:
        """Each undirected edge once, as rows (u, v) with u < v."""
        rows = np.repeat(np.arange(self.n), self.degrees)
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def subgraph(self, nodes) -> "Graph":
        """Induced subgraph on ``nodes`` (kept in the given order)."""
        nodes = np.asarray(nodes, dtype=np.int64)
        pos = np.full(self.n, -1, dtype=np.int64)
        pos[nodes] = np.arange(len(nodes))
        e = self.edges()
        e = pos[e]
        e = e[(e >= 0).all(axis=1)]
        return Graph.from_edges(len(nodes), e, self.node_ids[nodes])

    def permute(self, perm) -> "Graph":
        """Relabel so that new node ``i`` is old node ``perm[i]``."""
        return self.subgraph(perm)

    def is_symmetric(self, sample: int | None = None, rng=None) -> bool:
        nodes = range(self.n)
        if sample is not None and self.n > sample:
            rng = np.random.default_rng(rng)
            nodes = rng.choice(self.n, size=sample, replace=False)
        for i in nodes:
            for j in self.neighbors(i):
                nb = self.neighbors(j)
                k = np.searchsorted(nb, i)
                if k >= len(nb) or nb[k] != i:
                    return False
        return True


@dataclass(frozen=True, eq=False)
class LabelVector:
    labels: np.ndarray
    k: int

    def __post_init__(self):
        lab = np.asarray(self.labels, dtype=np.int64)
        if lab.size and (lab.min() < 0 or lab.max() >= self.k):
            raise ValueError(f"labels must lie in 0..{self.k - 1}")
        lab.setflags(write=False)
        object.__setattr__(self, "labels", lab)

    @classmethod
    def from_array(cls, labels) -> "LabelVector":
        """Compact arbitrary integer labels to 0..k-1 (order of first appearance)."""
        lab = np.asarray(labels)
        _, first, inv = np.unique(lab, return_index=True, return_inverse=True)
        rank = np.argsort(np.argsort(first))
        return cls(rank[inv], len(first))

    @classmethod
    def from_sigma(cls, sigma) -> "LabelVector":
        """Map a +/-1 class vector to {0, 1} (-1 -> 0, +1 -> 1)."""
        return cls((np.asarray(sigma) > 0).astype(np.int64), 2)

    def to_sigma(self) -> np.ndarray:
        if self.k != 2:
            raise ValueError("sigma representation needs exactly 2 classes")
        return 2 * self.labels - 1

    def __len__(self):
        return len(self.labels)


def parse_edge_list(text: str, one_indexed: bool = False) -> Graph:
    pairs = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tok = line.split()
        if len(tok) < 2:
            raise GraphFormatError(f"line {lineno}: expected two node ids, got {raw!r}")
        try:
            u, v = int(tok[0]), int(tok[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {raw!r}") from None
        pairs.append((u, v))
    if not pairs:
        raise GraphFormatError("edge list is empty")
    raw_ids = np.asarray(pairs, dtype=np.int64)
    if one_indexed:
        raw_ids = raw_ids - 1
    flat = raw_ids.ravel()
    ids, first = np.unique(flat, return_index=True)
    order = np.argsort(first)
    node_ids = ids[order]
    compact = np.empty(len(ids), dtype=np.int64)
    compact[order] = np.arange(len(ids))
    e = compact[np.searchsorted(ids, flat)].reshape(-1, 2)
    return Graph.from_edges(len(ids), e, node_ids)


def load_edge_list(path, one_indexed: bool = False) -> Graph:
    return parse_edge_list(Path(path).read_text(), one_indexed=one_indexed)


def write_edge_list(g: Graph, path) -> None:
    ids = g.node_ids
    lines = [f"{ids[u]} {ids[v]}" for u, v in g.edges()]
    Path(path).write_text("\n".join(lines) + "\n")


def load_labels(path, g: Graph | None = None) -> LabelVector:
    """Read labels as ``node label`` pairs (or one label per line).

    With ``g`` given, labels are reordered to the graph's compact node order.
    """
    node, lab = [], []
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), start=1):
        line = raw.strip()
        if not line or line[0] in "#%":
            continue
        tok = line.split()
        try:
            if len(tok) == 1:
                node.append(len(node))
                lab.append(int(tok[0]))
            else:
                node.append(int(tok[0]))
                lab.append(int(tok[1]))
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer token in {raw!r}") from None
    node = np.asarray(node)
    labels = LabelVector.from_array(lab)
    if g is None:
        return LabelVector(labels.labels[np.argsort(node, kind="stable")], labels.k)
    lookup = dict(zip(node.tolist(), labels.labels.tolist()))
    missing = [i for i in g.node_ids.tolist() if i not in lookup]
    if missing:
        raise GraphFormatError(f"no label for nodes {missing[:5]}")
    return LabelVector([lookup[i] for i in g.node_ids.tolist()], labels.k)


def write_labels(g: Graph, labels: LabelVector, path) -> None:
    lines = [f"{i} {l}" for i, l in zip(g.node_ids.tolist(), labels.labels.tolist())]
    Path(path).write_text("\n".join(lines) + "\n")


def estimate_rho_B(g: Graph) -> float:
    """Degree-moment estimate sum(d^2)/sum(d) of the non-backtracking spectral radius."""
    d = g.degrees.astype(float)
    if d.sum() == 0:
        raise ValueError("graph has no edges")
    return float((d * d).sum() / d.sum())


def estimate_rho_B_excess(g: Graph) -> float:
    """Excess-degree variant sum(d(d-1))/sum(d); not used by the pipeline."""
    d = g.degrees.astype(float)
    if d.sum() == 0:
        raise ValueError("graph has no edges")
    return float((d * (d - 1)).sum() / d.sum())


def connected_components(g: Graph) -> list[np.ndarray]:
    """Node index arrays of each component, largest first (ties by smallest node)."""
    if g.n == 0:
        return []
    ncomp, comp = _cc(g.adjacency(), directed=False)
    order = np.argsort(comp, kind="stable")
    groups = np.split(order, np.cumsum(np.bincount(comp, minlength=ncomp))[:-1])
    groups.sort(key=lambda a: (-len(a), a[0]))
    return groups


def largest_component(g: Graph) -> np.ndarray:
    return connected_components(g)[0]
