"""Small graph builders shared by the tests."""
import itertools

import numpy as np

from bhcd.graph import Graph, LabelVector


def cliques(sizes):
    """Disjoint union of complete graphs, with the block labelling."""
    edges, labels, off = [], [], 0
    for b, s in enumerate(sizes):
        edges += [(off + i, off + j) for i, j in itertools.combinations(range(s), 2)]
        labels += [b] * s
        off += s
    return Graph.from_edges(off, edges), LabelVector.from_array(labels)


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def random_graph(n, p, rng):
    rng = np.random.default_rng(rng)
    iu = np.triu_indices(n, 1)
    keep = rng.random(len(iu[0])) < p
    return Graph.from_edges(n, np.column_stack([iu[0][keep], iu[1][keep]]))
