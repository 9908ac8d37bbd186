"""Random graph generators shared by the test modules."""
import numpy as np

from linemf.graph import from_edges


def random_connected_graph(rng, n, directed, density=0.25, wlo=1.0, whi=5.0):
    """Random spanning tree plus independent extra edges, uniform weights.

    Connected as an undirected graph (weakly connected when directed).
    """
    edges = {}
    perm = rng.permutation(n)
    for a in range(1, n):
        b, c = int(perm[rng.integers(a)]), int(perm[a])
        edges[(b, c) if rng.random() < 0.5 else (c, b)] = rng.uniform(wlo, whi)
    for i in range(n):
        for j in range(n):
            if i == j or rng.random() >= density:
                continue
            if not directed and ((j, i) in edges or (i, j) in edges):
                continue
            edges[(i, j)] = rng.uniform(wlo, whi)
    return from_edges([(i, j, w) for (i, j), w in edges.items()], directed=directed)
