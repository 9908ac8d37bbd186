"""LINE(1st) and LINE(2nd) training by negative-sampling SGD.

Each step samples an edge ``(i, j)`` with probability proportional to its
weight, applies one positive update on ``(i, j)`` and ``k`` negative updates on
``(i, n)`` with ``n`` drawn from the degree-based noise distribution.  In
expectation this ascends the weighted negative-sampling objective whose
per-pair optimum is the shifted-PMI entry built in :mod:`linemf.matrices`.

First order trains a single table of vertex vectors on an undirected graph
(each sampled edge is used in a random orientation and both endpoints move).
A negative that lands on the source vertex itself would score ``v_i . v_i``,
which is a squared norm rather than a vertex pair and cannot follow the
pairwise optimum; first order skips such draws unless told otherwise.
Second order trains vertex vectors ``v`` and context vectors ``u`` on a
directed graph and scores a pair by ``u_j . v_i``.
"""
from __future__ import annotations

import logging
import threading
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np
from scipy.special import expit

from linemf import _kernels
from linemf.errors import UsageError, ValidationError
from linemf.graph import Graph, degree_profile, make_edge_sampler, make_negative_sampler

log = logging.getLogger(__name__)

ORDERS = ("first", "second")
CHUNK_SIZE = 1 << 15


@dataclass(frozen=True)
class TrainConfig:
    order: str = "second"
    d: int = 128
    k: int = 5
    total_samples: int = 1_000_000
    initial_lr: float = 0.025
    final_lr: float = 0.0
    seed: int = 0
    sampler_exponent: float = 1.0
    threads: int = 1
    sigmoid_table: bool = False
    skip_self_negatives: Optional[bool] = None

    def __post_init__(self):
        if self.order not in ORDERS:
            raise ValidationError(f"order must be one of {ORDERS}, got {self.order!r}")
        if self.d < 1:
            raise ValidationError("d must be >= 1")
        if self.k < 1:
            raise ValidationError("k must be >= 1")
        if self.total_samples < 0:
            raise ValidationError("total_samples must be >= 0")
        if not self.initial_lr > 0:
            raise ValidationError("initial_lr must be positive")
        if not 0 <= self.final_lr <= self.initial_lr:
            raise ValidationError("final_lr must lie in [0, initial_lr]")
        if not 0 < self.sampler_exponent <= 1:
            raise ValidationError("sampler_exponent must lie in (0, 1]")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")

    @property
    def skips_self_negatives(self) -> bool:
        """Resolved ``skip_self_negatives``: on by default for first order only."""
        if self.skip_self_negatives is None:
            return self.order == "first"
        return bool(self.skip_self_negatives)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(eq=False)
class EmbeddingSet:
    """Vertex vectors (``n x d``) and, for second order, context vectors."""

    vertex_vectors: np.ndarray
    context_vectors: Optional[np.ndarray] = None

    def __post_init__(self):
        v = self.vertex_vectors
        if v.ndim != 2:
            raise ValidationError("vertex_vectors must be 2-D")
        if self.context_vectors is not None and self.context_vectors.shape != v.shape:
            raise ValidationError("context_vectors must have the same shape as vertex_vectors")

    @property
    def n(self) -> int:
        return int(self.vertex_vectors.shape[0])

    @property
    def d(self) -> int:
        return int(self.vertex_vectors.shape[1])

    @property
    def order(self) -> str:
        return "first" if self.context_vectors is None else "second"

    def score(self, i, j):
        """Model score of pair(s) ``(i, j)``: ``u_j . v_i`` or ``v_j . v_i``."""
        right = self.vertex_vectors if self.context_vectors is None else self.context_vectors
        return np.einsum("...k,...k->...", self.vertex_vectors[i], right[j])

    def is_finite(self) -> bool:
        ok = bool(np.all(np.isfinite(self.vertex_vectors)))
        if self.context_vectors is not None:
            ok = ok and bool(np.all(np.isfinite(self.context_vectors)))
        return ok

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSet):
            return NotImplemented
        if (self.context_vectors is None) != (other.context_vectors is None):
            return False
        same = np.array_equal(self.vertex_vectors, other.vertex_vectors)
        if self.context_vectors is not None:
            same = same and np.array_equal(self.context_vectors, other.context_vectors)
        return same

    __hash__ = None


def init_embeddings(n: int, d: int, order: str = "second", seed: int = 0) -> EmbeddingSet:
    """Uniform ``[-0.5/d, 0.5/d]`` vertex vectors; zero context vectors for second order."""
    if n < 1 or d < 1:
        raise ValidationError("n and d must be >= 1")
    if order not in ORDERS:
        raise ValidationError(f"order must be one of {ORDERS}")
    rng = np.random.default_rng(seed)
    vertex = rng.uniform(-0.5 / d, 0.5 / d, size=(n, d))
    context = np.zeros((n, d)) if order == "second" else None
    return EmbeddingSet(vertex, context)


def log_sigmoid(x):
    return -np.logaddexp(0.0, -x)


def local_objective(x, w, neg_coef):
    """``w * log sigmoid(x) + neg_coef * log sigmoid(-x)`` for one vertex pair.

    ``neg_coef`` is the expected negative mass that lands on the pair:
    ``out_deg[i] * k * in_deg[j] / total_in`` for second order and the
    analogous product of undirected degrees for first order.
    """
    val = w * log_sigmoid(x) + neg_coef * log_sigmoid(-np.asarray(x, dtype=np.float64))
    return float(val) if np.ndim(val) == 0 else val


def pair_gradient(x, w, neg_coef):
    """Derivative of :func:`local_objective` with respect to ``x``."""
    x = np.asarray(x, dtype=np.float64)
    val = w * expit(-x) - neg_coef * expit(x)
    return float(val) if np.ndim(val) == 0 else val


def _oriented_edges(g: Graph, order: str):
    if order == "second":
        return g.src, g.dst, g.weight
    return (
        np.concatenate([g.src, g.dst]),
        np.concatenate([g.dst, g.src]),
        np.concatenate([g.weight, g.weight]),
    )


def train(g: Graph, cfg: TrainConfig, init: Optional[EmbeddingSet] = None) -> EmbeddingSet:
    """Train embeddings for exactly ``cfg.total_samples`` edge draws.

    With ``threads == 1`` the result is a deterministic function of
    ``(g, cfg)``.  With more threads the workers update the shared arrays
    without locks and the result is not reproducible.

    Raises:
        UsageError: second order on an undirected graph, or first order on a
            directed one.
        ValidationError: the graph has no edges.
    """
    if cfg.order == "second" and not g.directed:
        raise UsageError("second-order training needs a directed graph; bidirect undirected input first")
    if cfg.order == "first" and g.directed:
        raise UsageError("first-order training only applies to undirected graphs")
    if g.n_edges == 0:
        raise ValidationError("cannot train on a graph without edges")

    emb = init if init is not None else init_embeddings(g.n_vertices, cfg.d, cfg.order, cfg.seed)
    if emb.n != g.n_vertices or emb.d != cfg.d or emb.order != cfg.order:
        raise ValidationError("initial embeddings do not match the graph/config")
    if cfg.total_samples == 0:
        return emb

    vertex = np.array(emb.vertex_vectors, dtype=np.float64, order="C")
    context = vertex if emb.context_vectors is None else np.array(emb.context_vectors, dtype=np.float64, order="C")

    src, dst, weight = _oriented_edges(g, cfg.order)
    profile = degree_profile(g)
    mode = "in_degree" if cfg.order == "second" else "undirected_degree"
    edge_sampler = make_edge_sampler(Graph(g.n_vertices, src, dst, weight, directed=True))
    neg_sampler = make_negative_sampler(profile, mode=mode, exponent=cfg.sampler_exponent)
    table = _kernels.make_sigmoid_table() if cfg.sigmoid_table else np.empty(0)

    skip_self = cfg.skips_self_negatives
    worker_seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.threads)
    shares = [cfg.total_samples // cfg.threads] * cfg.threads
    for w in range(cfg.total_samples % cfg.threads):
        shares[w] += 1

    def work(wid):
        edge_seed, neg_seed = worker_seeds[wid].spawn(2)
        edges = edge_sampler.with_seed(edge_seed)
        negs = neg_sampler.with_seed(neg_seed)
        budget = shares[wid]
        done = 0
        while done < budget:
            size = min(CHUNK_SIZE, budget - done)
            idx = edges.draw(size)
            neg = negs.draw((size, cfg.k))
            _kernels.sgd_chunk(
                vertex, context, src[idx], dst[idx], neg,
                done, budget, cfg.initial_lr, cfg.final_lr, table, skip_self,
            )
            done += size

    log.debug("training %s order: %d samples on %d threads", cfg.order, cfg.total_samples, cfg.threads)
    if cfg.threads == 1:
        work(0)
    else:
        errors = []

        def guarded(wid):
            try:
                work(wid)
            except BaseException as exc:  # surfaced after join
                errors.append(exc)

        workers = [threading.Thread(target=guarded, args=(w,)) for w in range(cfg.threads)]
        for t in workers:
            t.start()
        for t in workers:
            t.join()
        if errors:
            raise errors[0]

    result = EmbeddingSet(vertex, None if cfg.order == "first" else context)
    if not result.is_finite():
        raise ValidationError("training diverged: non-finite embedding values")
    return result


def negative_coefficient(g: Graph, k, order: str):
    """Per-edge expected negative mass ``neg_coef`` on the oriented edges of ``g``.

    Returns ``(src, dst, weight, neg_coef)`` arrays aligned with each other.
    """
    profile = degree_profile(g)
    if order == "second":
        if not g.directed:
            raise UsageError("second order needs a directed graph")
        coef = profile.out_degree[g.src] * k * profile.in_degree[g.dst] / profile.total_in
        return g.src, g.dst, g.weight, coef
    if g.directed:
        raise UsageError("first order needs an undirected graph")
    src, dst, weight = _oriented_edges(g, "first")
    deg = profile.undirected_degree
    coef = deg[src] * k * deg[dst] / profile.total_undirected
    return src, dst, weight, coef


def expected_objective(emb: EmbeddingSet, g: Graph, k) -> float:
    """Sum of :func:`local_objective` over edge support at the current embeddings."""
    src, dst, weight, coef = negative_coefficient(g, k, emb.order)
    x = emb.score(src, dst)
    return float(np.sum(local_objective(x, weight, coef)))

