"""Numerical checks of the LINE / shifted-PMI equivalence.

Only pairs on the edge support are compared.  A non-edge has ``w_ij = 0`` so
its local objective is maximized at ``-inf``, which finite embeddings never
reach; those pairs are deliberately left out.
"""
from __future__ import annotations

import ast
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional, TextIO

import numpy as np
from scipy import stats

from linemf.errors import ValidationError
from linemf.graph import DegreeProfile, Graph, degree_profile
from linemf.matrices import FIRST_ORDER, SECOND_ORDER, ShiftedPmiMatrix, build_m1, build_m2
from linemf.trainer import EmbeddingSet

N_WORST = 10
_STAT_FIELDS = ("rmse", "mae", "median_abs_dev", "pearson", "spearman")


@dataclass(eq=False)
class EquivalenceReport:
    n_pairs: int
    rmse: float
    mae: float
    median_abs_dev: float
    pearson: float
    spearman: float
    worst_pairs: list = field(default_factory=list)
    config_echo: dict = field(default_factory=dict)


def _corr(fn, a, b) -> float:
    if a.size < 2 or np.all(a == a[0]) or np.all(b == b[0]):
        return math.nan
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return float(fn(a, b)[0])


def compare_values(
    rows: np.ndarray,
    cols: np.ndarray,
    predicted: np.ndarray,
    target: np.ndarray,
    config_echo: Optional[dict] = None,
) -> EquivalenceReport:
    """Deviation statistics of ``predicted`` against ``target`` per pair."""
    dev = predicted - target
    absdev = np.abs(dev)
    n = int(dev.size)
    if n == 0:
        nan = math.nan
        return EquivalenceReport(0, nan, nan, nan, nan, nan, [], dict(config_echo or {}))
    # largest deviation first; ties by (i, j)
    order = np.lexsort((cols, rows, -absdev))[:N_WORST]
    worst = [
        (int(rows[t]), int(cols[t]), float(predicted[t]), float(target[t]), float(dev[t]))
        for t in order
    ]
    return EquivalenceReport(
        n_pairs=n,
        rmse=float(np.sqrt(np.mean(dev * dev))),
        mae=float(np.mean(absdev)),
        median_abs_dev=float(np.median(absdev)),
        pearson=_corr(stats.pearsonr, predicted, target),
        spearman=_corr(stats.spearmanr, predicted, target),
        worst_pairs=worst,
        config_echo=dict(config_echo or {}),
    )


def compare(e: EmbeddingSet, m: ShiftedPmiMatrix, config_echo: Optional[dict] = None) -> EquivalenceReport:
    """Compare model scores with the stored entries of ``m``.

    Pairs are scored ``u_j . v_i`` when context vectors exist and ``v_j . v_i``
    otherwise; a second-order matrix therefore needs context vectors.
    """
    if e.n != m.n:
        raise ValidationError(f"embeddings cover {e.n} vertices, matrix has n={m.n}")
    if m.kind == SECOND_ORDER and e.context_vectors is None:
        raise ValidationError("second-order matrix needs embeddings with context vectors")
    echo = {"k": m.k, "kind": m.kind}
    echo.update(config_echo or {})
    predicted = e.score(m.rows, m.cols)
    return compare_values(m.rows, m.cols, np.asarray(predicted, dtype=np.float64), m.values, echo)


def closed_form_optimum(w: float, neg_coef: float) -> float:
    """Maximizer ``log(w / neg_coef)`` of the local pair objective."""
    if not (w > 0 and neg_coef > 0):
        raise ValidationError(f"w and neg_coef must be positive, got w={w}, neg_coef={neg_coef}")
    return math.log(w) - math.log(neg_coef)


def _normalize_kind(kind: str) -> str:
    aliases = {"first": FIRST_ORDER, "1": FIRST_ORDER, FIRST_ORDER: FIRST_ORDER,
               "second": SECOND_ORDER, "2": SECOND_ORDER, SECOND_ORDER: SECOND_ORDER}
    try:
        return aliases[str(kind)]
    except KeyError:
        raise ValueError(f"unknown matrix kind {kind!r}") from None


def verify_matrix_vs_optimum(g: Graph, k, kind: str, profile: Optional[DegreeProfile] = None) -> float:
    """Largest gap between built matrix entries and the per-edge closed-form optimum.

    The optimum side is evaluated edge by edge with scalar arithmetic, separate
    from the vectorized matrix builders.
    """
    kind = _normalize_kind(kind)
    if profile is None:
        profile = degree_profile(g)
    if kind == SECOND_ORDER:
        m = build_m2(g, k, profile)
        out_deg, in_deg, total = profile.out_degree.tolist(), profile.in_degree.tolist(), profile.total_in
        oriented = list(g.edges())
    else:
        m = build_m1(g, k, profile)
        out_deg = in_deg = profile.undirected_degree.tolist()
        total = profile.total_undirected
        oriented = [e for i, j, w in g.edges() for e in ((i, j, w), (j, i, w))]
    entries = m.entries()
    if len(entries) != len(oriented):
        return math.inf
    gap = 0.0
    for i, j, w in oriented:
        neg_coef = out_deg[i] * k * in_deg[j] / total
        target = entries.get((i, j))
        if target is None:
            return math.inf
        gap = max(gap, abs(target - closed_form_optimum(w, neg_coef)))
    return gap


def emit_report(r: EquivalenceReport, sink: TextIO) -> None:
    """Write ``r`` as ``key: value`` lines followed by a ``worst_pairs`` table."""
    sink.write(f"n_pairs: {r.n_pairs}\n")
    for name in _STAT_FIELDS:
        sink.write(f"{name}: {getattr(r, name)!r}\n")
    for key in sorted(r.config_echo):
        sink.write(f"config.{key}: {r.config_echo[key]!r}\n")
    sink.write(f"worst_pairs: {len(r.worst_pairs)}\n")
    sink.write("# i j predicted target deviation\n")
    for i, j, p, t, dv in r.worst_pairs:
        sink.write(f"{i} {j} {p!r} {t!r} {dv!r}\n")


def _literal(text: str):
    try:
        return ast.literal_eval(text)
    except (ValueError, SyntaxError):
        if text in ("nan", "inf", "-inf"):
            return float(text)
        return text


def parse_report(source: TextIO) -> EquivalenceReport:
    """Inverse of :func:`emit_report`."""
    fields: dict = {}
    config: dict = {}
    worst = []
    n_worst = None
    for raw in source:
        line = raw.rstrip("\n")
        if not line or line.startswith("#"):
            continue
        if n_worst is not None:
            i, j, p, t, dv = line.split()
            worst.append((int(i), int(j), float(p), float(t), float(dv)))
            continue
        key, _, value = line.partition(": ")
        if key == "worst_pairs":
            n_worst = int(value)
        elif key.startswith("config."):
            config[key[len("config."):]] = _literal(value)
        else:
            fields[key] = value
    if n_worst is None or len(worst) != n_worst:
        raise ValidationError("report is missing or truncates its worst_pairs section")
    return EquivalenceReport(
        n_pairs=int(fields["n_pairs"]),
        **{name: float(fields[name]) for name in _STAT_FIELDS},
        worst_pairs=worst,
        config_echo=config,
    )
