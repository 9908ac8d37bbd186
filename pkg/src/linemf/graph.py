"""Weighted graphs, weighted degree profiles and alias-method samplers.

Edge-list text format (the canonical on-disk graph representation)::

    # comment
    src dst [weight]

Vertex ids are dense nonnegative integers; the vertex count is ``max id + 1``.
Weights default to 1.0 and must be positive.  Duplicate edges are merged by
summing their weights; for undirected graphs ``a b`` and ``b a`` are the same
edge and each edge is stored once as ``(min, max)``.  A comment containing
``n_vertices=N`` raises the vertex count to ``N``, which is how
:func:`dump_edge_list` keeps trailing isolated vertices.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Iterable, Optional, TextIO, Union

import numpy as np

from linemf.errors import GraphFormatError, UsageError, ValidationError

SELF_LOOP_POLICIES = ("reject", "drop")
SAMPLER_MODES = ("in_degree", "undirected_degree")
_N_VERTICES = re.compile(r"\bn_vertices=(\d+)")


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable weighted graph with edges sorted by ``(src, dst)``."""

    n_vertices: int
    src: np.ndarray
    dst: np.ndarray
    weight: np.ndarray
    directed: bool

    def __post_init__(self):
        for name in ("src", "dst", "weight"):
            arr = getattr(self, name)
            arr.setflags(write=False)

    @property
    def n_edges(self) -> int:
        return int(self.src.shape[0])

    def edges(self):
        """Iterate ``(src, dst, weight)`` tuples with Python scalars."""
        for i, j, w in zip(self.src.tolist(), self.dst.tolist(), self.weight.tolist()):
            yield i, j, w

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n_vertices == other.n_vertices
            and self.directed == other.directed
            and np.array_equal(self.src, other.src)
            and np.array_equal(self.dst, other.dst)
            and np.array_equal(self.weight, other.weight)
        )

    __hash__ = None

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"Graph({kind}, n_vertices={self.n_vertices}, n_edges={self.n_edges})"


def from_edges(
    edges: Iterable[tuple],
    directed: bool,
    n_vertices: Optional[int] = None,
    self_loop_policy: str = "reject",
) -> Graph:
    """Build a validated :class:`Graph` from ``(src, dst[, weight])`` tuples."""
    if self_loop_policy not in SELF_LOOP_POLICIES:
        raise ValueError(f"self_loop_policy must be one of {SELF_LOOP_POLICIES}")
    merged: dict[tuple[int, int], float] = {}
    max_id = -1
    for edge in edges:
        i, j = int(edge[0]), int(edge[1])
        w = float(edge[2]) if len(edge) > 2 else 1.0
        _check_edge(i, j, w, self_loop_policy)
        max_id = max(max_id, i, j)
        if i == j:
            continue
        key = (i, j) if directed or i < j else (j, i)
        merged[key] = merged.get(key, 0.0) + w
    return _assemble(merged, directed, max_id, n_vertices)


def _check_edge(i: int, j: int, w: float, self_loop_policy: str):
    if i < 0 or j < 0:
        raise ValidationError(f"negative vertex id in edge ({i}, {j})")
    if not (w > 0) or not math.isfinite(w):
        raise ValidationError(f"edge ({i}, {j}) has nonpositive or non-finite weight {w}")
    if i == j and self_loop_policy == "reject":
        raise ValidationError(f"self-loop on vertex {i}")


def _assemble(merged, directed, max_id, n_vertices) -> Graph:
    n = max_id + 1
    if n_vertices is not None:
        if n_vertices < n:
            raise ValidationError(f"n_vertices={n_vertices} but edges reference vertex {max_id}")
        n = n_vertices
    keys = sorted(merged)
    src = np.array([k[0] for k in keys], dtype=np.int64)
    dst = np.array([k[1] for k in keys], dtype=np.int64)
    weight = np.array([merged[k] for k in keys], dtype=np.float64)
    return Graph(n_vertices=n, src=src, dst=dst, weight=weight, directed=bool(directed))


def load_edge_list(
    source: Union[TextIO, Iterable[str]],
    directed: bool = False,
    self_loop_policy: str = "reject",
) -> Graph:
    """Parse an edge-list text stream into a :class:`Graph`.

    Raises:
        GraphFormatError: a line is not ``src dst [weight]`` with integer ids.
        ValidationError: nonpositive weight, negative id, or a rejected self-loop.
    """
    if self_loop_policy not in SELF_LOOP_POLICIES:
        raise ValueError(f"self_loop_policy must be one of {SELF_LOOP_POLICIES}")
    merged: dict[tuple[int, int], float] = {}
    max_id = -1
    declared = None
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            hit = _N_VERTICES.search(line)
            if hit:
                declared = max(declared or 0, int(hit.group(1)))
            continue
        parts = line.split()
        if len(parts) not in (2, 3):
            raise GraphFormatError(lineno, line, "expected 'src dst [weight]'")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise GraphFormatError(lineno, line, "vertex ids must be integers") from None
        try:
            w = float(parts[2]) if len(parts) == 3 else 1.0
        except ValueError:
            raise GraphFormatError(lineno, line, "weight is not a number") from None
        try:
            _check_edge(i, j, w, self_loop_policy)
        except ValidationError as exc:
            raise ValidationError(f"line {lineno}: {exc}") from None
        max_id = max(max_id, i, j)
        if i == j:
            continue
        key = (i, j) if directed or i < j else (j, i)
        merged[key] = merged.get(key, 0.0) + w
    if declared is not None:
        declared = max(declared, max_id + 1)
    return _assemble(merged, directed, max_id, declared)


def dump_edge_list(g: Graph, sink: TextIO) -> None:
    """Write ``g`` in edge-list format; weights use ``repr`` so reloads are exact."""
    sink.write(f"# {'directed' if g.directed else 'undirected'} n_vertices={g.n_vertices}\n")
    for i, j, w in g.edges():
        sink.write(f"{i} {j} {w!r}\n")


@dataclass(frozen=True, eq=False)
class DegreeProfile:
    """Weighted degrees of every vertex.

    For directed graphs ``undirected_degree`` is ``out + in``; for undirected
    graphs ``out_degree`` and ``in_degree`` both equal ``undirected_degree``.
    """

    out_degree: np.ndarray
    in_degree: np.ndarray
    undirected_degree: np.ndarray
    directed: bool
    total_out: float = field(init=False)
    total_in: float = field(init=False)
    total_undirected: float = field(init=False)

    def __post_init__(self):
        for name in ("out_degree", "in_degree", "undirected_degree"):
            getattr(self, name).setflags(write=False)
        object.__setattr__(self, "total_out", float(self.out_degree.sum()))
        object.__setattr__(self, "total_in", float(self.in_degree.sum()))
        object.__setattr__(self, "total_undirected", float(self.undirected_degree.sum()))

    @property
    def n_vertices(self) -> int:
        return int(self.out_degree.shape[0])


def degree_profile(g: Graph) -> DegreeProfile:
    """Weighted out-, in- and undirected degrees of ``g``."""
    n = g.n_vertices
    out_deg = np.bincount(g.src, weights=g.weight, minlength=n).astype(np.float64)
    in_deg = np.bincount(g.dst, weights=g.weight, minlength=n).astype(np.float64)
    if g.directed:
        und = out_deg + in_deg
        return DegreeProfile(out_deg, in_deg, und, directed=True)
    und = out_deg + in_deg
    return DegreeProfile(und.copy(), und.copy(), und, directed=False)


class AliasSampler:
    """Walker/Vose alias table over a fixed categorical distribution.

    Tables are built over the categories with positive weight only, so
    zero-weight categories can never be drawn.  Construction is linear in the
    number of categories and each draw costs two uniforms.

    The tables are immutable; the RNG stream belongs to this handle.  Use
    :meth:`with_seed` for an independent handle sharing the same tables.
    """

    def __init__(self, weights, seed=None):
        w = np.asarray(weights, dtype=np.float64).ravel()
        if w.size == 0:
            raise ValidationError("cannot sample from an empty weight vector")
        if np.any(~np.isfinite(w)) or np.any(w < 0):
            raise ValidationError("weights must be finite and nonnegative")
        total = w.sum()
        if not total > 0:
            raise ValidationError("at least one weight must be positive")
        self.n_categories = int(w.size)
        self.probabilities = w / total
        self.probabilities.setflags(write=False)
        support = np.flatnonzero(w > 0)
        prob, alias = _build_tables(w[support] / total)
        self.support = support
        self.prob = prob
        self.alias = alias
        for arr in (self.support, self.prob, self.alias):
            arr.setflags(write=False)
        self.rng = np.random.default_rng(seed)

    def with_seed(self, seed) -> "AliasSampler":
        clone = object.__new__(AliasSampler)
        clone.__dict__.update(self.__dict__)
        clone.rng = np.random.default_rng(seed)
        return clone

    def draw(self, size=None):
        """Draw ``size`` category indices (a scalar int when ``size`` is None)."""
        m = self.support.shape[0]
        if size is None:
            col = int(self.rng.integers(m))
            if self.rng.random() >= self.prob[col]:
                col = int(self.alias[col])
            return int(self.support[col])
        col = self.rng.integers(m, size=size)
        coin = self.rng.random(size=size)
        col = np.where(coin < self.prob[col], col, self.alias[col])
        return self.support[col]

    def exact_probabilities(self) -> np.ndarray:
        """Category probabilities implied by the tables (enumerates every cell)."""
        m = self.support.shape[0]
        mass = self.prob.copy()
        np.add.at(mass, self.alias, 1.0 - self.prob)
        out = np.zeros(self.n_categories)
        out[self.support] = mass / m
        return out


def _build_tables(p: np.ndarray):
    m = p.shape[0]
    scaled = p * m
    prob = np.ones(m, dtype=np.float64)
    alias = np.arange(m, dtype=np.int64)
    small = [i for i in range(m) if scaled[i] < 1.0]
    large = [i for i in range(m) if scaled[i] >= 1.0]
    while small and large:
        s = small.pop()
        g = large.pop()
        prob[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            small.append(g)
        else:
            large.append(g)
    # leftovers are 1 up to rounding
    return prob, alias


def make_negative_sampler(
    profile: DegreeProfile,
    mode: str = "in_degree",
    exponent: float = 1.0,
    seed=None,
) -> AliasSampler:
    """Noise distribution ``P_n(v) ∝ degree(v) ** exponent``.

    ``mode="in_degree"`` is used for second-order training on directed graphs,
    ``mode="undirected_degree"`` for first-order training.  ``exponent=1.0``
    gives the unigram distribution under which the closed-form optimum holds;
    0.75 reproduces the original LINE noise distribution.
    """
    if mode not in SAMPLER_MODES:
        raise UsageError(f"mode must be one of {SAMPLER_MODES}")
    if not (0.0 < exponent <= 1.0):
        raise ValidationError(f"sampler exponent must lie in (0, 1], got {exponent}")
    deg = profile.in_degree if mode == "in_degree" else profile.undirected_degree
    if not np.any(deg > 0):
        raise ValidationError(f"all {mode} values are zero")
    weights = np.where(deg > 0, np.power(deg, exponent, where=deg > 0, out=np.zeros_like(deg)), 0.0)
    return AliasSampler(weights, seed=seed)


def make_edge_sampler(g: Graph, seed=None) -> AliasSampler:
    """Sampler over edge indices of ``g`` with probability proportional to weight."""
    if g.n_edges == 0:
        raise ValidationError("graph has no edges")
    return AliasSampler(g.weight, seed=seed)
