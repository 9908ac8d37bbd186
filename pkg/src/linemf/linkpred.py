"""Minimal link-prediction harness: edge holdout, non-edge sampling and AUC."""
from __future__ import annotations

import numpy as np
from scipy.stats import rankdata

from linemf.errors import ValidationError
from linemf.graph import Graph


def split_edges(g: Graph, holdout_frac: float, seed: int = 0):
    """Hold out a random fraction of edges.

    Returns ``(train_graph, heldout)`` where ``heldout`` is an ``(h, 2)`` array
    of vertex pairs.  The training graph keeps all vertices.
    """
    if not 0 < holdout_frac < 1:
        raise ValidationError("holdout fraction must lie in (0, 1)")
    m = g.n_edges
    h = int(round(holdout_frac * m))
    if h < 1:
        raise ValidationError(f"holdout fraction {holdout_frac} selects no edges out of {m}")
    if h >= m:
        raise ValidationError("holdout leaves the training graph without edges")
    rng = np.random.default_rng(seed)
    perm = rng.permutation(m)
    test, keep = np.sort(perm[:h]), np.sort(perm[h:])
    train_graph = Graph(g.n_vertices, g.src[keep], g.dst[keep], g.weight[keep], g.directed)
    heldout = np.stack([g.src[test], g.dst[test]], axis=1)
    return train_graph, heldout


def sample_non_edges(g: Graph, count: int, seed: int = 0) -> np.ndarray:
    """``count`` distinct-endpoint pairs that are not edges of ``g`` (rejection sampling)."""
    n = g.n_vertices
    existing = set(zip(g.src.tolist(), g.dst.tolist()))
    if not g.directed:
        existing |= {(j, i) for i, j in existing}
    capacity = n * (n - 1) - len(existing)
    if capacity <= 0:
        raise ValidationError("graph is complete; there are no non-edges to sample")
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        i, j = rng.integers(n, size=2).tolist()
        if i != j and (i, j) not in existing:
            out.append((i, j))
    return np.array(out, dtype=np.int64).reshape(-1, 2)


def auc(pos_scores, neg_scores) -> float:
    """Probability a positive outscores a negative, ties counted as one half."""
    pos = np.asarray(pos_scores, dtype=np.float64)
    neg = np.asarray(neg_scores, dtype=np.float64)
    if pos.size == 0 or neg.size == 0:
        raise ValidationError("AUC needs at least one positive and one negative score")
    ranks = rankdata(np.concatenate([pos, neg]))
    u = ranks[: pos.size].sum() - pos.size * (pos.size + 1) / 2.0
    return float(u / (pos.size * neg.size))
