"""Shifted-PMI matrices implicitly factored by LINE.

Both matrices are stored over the edge support only.  Entries for non-edges
would be ``log 0 = -inf``; they are left implicit and are not constrained by
the training objective.

Second order (directed graph, context vectors ``u``)::

    M2[i, j] = log(w_ij * total_in / (out_deg[i] * in_deg[j])) - log k

First order (undirected graph, stored in both orientations)::

    M1[i, j] = log(w_ij * total_deg / (deg[i] * deg[j])) - log k
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import TextIO

import numpy as np
import scipy.sparse as sp

from linemf.errors import UsageError, ValidationError
from linemf.graph import DegreeProfile, Graph, degree_profile

FIRST_ORDER = "first_order"
SECOND_ORDER = "second_order"
KINDS = (FIRST_ORDER, SECOND_ORDER)


@dataclass(frozen=True, eq=False)
class ShiftedPmiMatrix:
    """Sparse ``n x n`` matrix in coordinate form, rows sorted by ``(i, j)``.

    ``k`` is the negative count the matrix was built for and ``shift`` is
    ``log k``.
    """

    n: int
    rows: np.ndarray
    cols: np.ndarray
    values: np.ndarray
    k: float
    kind: str
    truncated: bool = False

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}")
        order = np.lexsort((self.cols, self.rows))
        for name in ("rows", "cols", "values"):
            arr = np.ascontiguousarray(getattr(self, name)[order])
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def shift(self) -> float:
        return math.log(self.k)

    @property
    def nnz(self) -> int:
        return int(self.values.shape[0])

    def entries(self) -> dict:
        return {(i, j): v for i, j, v in zip(self.rows.tolist(), self.cols.tolist(), self.values.tolist())}

    def to_scipy(self) -> sp.csr_matrix:
        return sp.csr_matrix((self.values, (self.rows, self.cols)), shape=(self.n, self.n))

    def to_dense(self, fill: float = 0.0) -> np.ndarray:
        out = np.full((self.n, self.n), fill, dtype=np.float64)
        out[self.rows, self.cols] = self.values
        return out

    def is_symmetric(self) -> bool:
        fwd = self.entries()
        return all(fwd.get((j, i)) == v for (i, j), v in fwd.items())

    def __repr__(self):
        return f"ShiftedPmiMatrix({self.kind}, n={self.n}, nnz={self.nnz}, k={self.k:g}, truncated={self.truncated})"


def _check_k(k) -> float:
    k = float(k)
    if not (k > 0) or not math.isfinite(k):
        raise ValidationError(f"negative count k must be positive, got {k}")
    return k


def build_m2(g: Graph, k=1, profile: DegreeProfile | None = None) -> ShiftedPmiMatrix:
    """Second-order target matrix: directed PMI shifted by ``log k``."""
    if not g.directed:
        raise UsageError("build_m2 needs a directed graph; call bidirect() on undirected input first")
    k = _check_k(k)
    if profile is None:
        profile = degree_profile(g)
    w = g.weight
    values = (
        np.log(w)
        + math.log(profile.total_in)
        - np.log(profile.out_degree[g.src])
        - np.log(profile.in_degree[g.dst])
        - math.log(k)
    )
    return ShiftedPmiMatrix(g.n_vertices, g.src.copy(), g.dst.copy(), values, k, SECOND_ORDER)


def build_m1(g: Graph, k=1, profile: DegreeProfile | None = None) -> ShiftedPmiMatrix:
    """First-order target matrix, symmetric, one entry per edge orientation."""
    if g.directed:
        raise UsageError("build_m1 needs an undirected graph; first-order LINE does not apply to directed graphs")
    k = _check_k(k)
    if profile is None:
        profile = degree_profile(g)
    deg = profile.undirected_degree
    half = (
        np.log(g.weight)
        + math.log(profile.total_undirected)
        - np.log(deg[g.src])
        - np.log(deg[g.dst])
        - math.log(k)
    )
    rows = np.concatenate([g.src, g.dst])
    cols = np.concatenate([g.dst, g.src])
    values = np.concatenate([half, half])
    return ShiftedPmiMatrix(g.n_vertices, rows, cols, values, k, FIRST_ORDER)


def bidirect(g: Graph) -> Graph:
    """Replace every undirected edge by two opposite directed edges of equal weight."""
    if g.directed:
        raise UsageError("bidirect expects an undirected graph")
    src = np.concatenate([g.src, g.dst])
    dst = np.concatenate([g.dst, g.src])
    weight = np.concatenate([g.weight, g.weight])
    order = np.lexsort((dst, src))
    return Graph(g.n_vertices, src[order], dst[order], weight[order], directed=True)


def truncate_nonnegative(m: ShiftedPmiMatrix) -> ShiftedPmiMatrix:
    """Clip entries at zero and drop the resulting zeros (shifted positive PMI)."""
    keep = m.values > 0
    return ShiftedPmiMatrix(m.n, m.rows[keep], m.cols[keep], m.values[keep], m.k, m.kind, truncated=True)


def export_triplets(m: ShiftedPmiMatrix, sink: TextIO) -> None:
    """Write ``m`` as ``i j value`` lines under a one-line header comment."""
    sink.write(
        f"# kind={m.kind} k={m.k!r} n={m.n} shift={m.shift!r} "
        f"truncated={'true' if m.truncated else 'false'}\n"
    )
    for i, j, v in zip(m.rows.tolist(), m.cols.tolist(), m.values.tolist()):
        sink.write(f"{i} {j} {v:.12f}\n")


_HEADER_FIELD = re.compile(r"(\w+)=(\S+)")


def import_triplets(source: TextIO) -> ShiftedPmiMatrix:
    """Read the format written by :func:`export_triplets`."""
    meta = {}
    rows, cols, vals = [], [], []
    for lineno, raw in enumerate(source, start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            meta.update(_HEADER_FIELD.findall(line))
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValidationError(f"line {lineno}: expected 'i j value', got {line!r}")
        rows.append(int(parts[0]))
        cols.append(int(parts[1]))
        vals.append(float(parts[2]))
    missing = {"kind", "k", "n"} - meta.keys()
    if missing:
        raise ValidationError(f"triplet header is missing {sorted(missing)}")
    n = int(meta["n"])
    rows_a = np.array(rows, dtype=np.int64)
    cols_a = np.array(cols, dtype=np.int64)
    if rows_a.size and (rows_a.max() >= n or cols_a.max() >= n or min(rows_a.min(), cols_a.min()) < 0):
        raise ValidationError("triplet index outside [0, n)")
    return ShiftedPmiMatrix(
        n,
        rows_a,
        cols_a,
        np.array(vals, dtype=np.float64),
        float(meta["k"]),
        meta["kind"],
        truncated=meta.get("truncated") == "true",
    )
