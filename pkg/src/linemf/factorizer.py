"""Explicit factorization of a (truncated) shifted-PMI matrix.

The general path is a dense truncated SVD ``M ~ A diag(s) B^T`` with the
singular values split evenly, so ``left = A sqrt(s)`` plays the role of the
vertex vectors and ``right = B sqrt(s)`` the context vectors.

The symmetric path targets ``M = V V^T`` for first-order matrices.  Shifted
PMI matrices are not positive semidefinite in general, so it keeps only the
largest nonnegative eigenvalues and reports the negative spectral mass it had
to throw away.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from linemf.errors import ValidationError
from linemf.matrices import ShiftedPmiMatrix
from linemf.trainer import EmbeddingSet


@dataclass(eq=False)
class FactorizationResult:
    left_factors: np.ndarray
    right_factors: Optional[np.ndarray]
    singular_values: np.ndarray
    reconstruction_error: float
    symmetric: bool = False
    discarded_negative_mass: float = 0.0
    kind: str = field(default="second_order")

    @property
    def d(self) -> int:
        return int(self.left_factors.shape[1])

    def to_embeddings(self) -> EmbeddingSet:
        return EmbeddingSet(self.left_factors.copy(), None if self.right_factors is None else self.right_factors.copy())


def svd_embed(m: ShiftedPmiMatrix, d: int, symmetric: bool = False) -> FactorizationResult:
    """Rank-``d`` factorization of ``m`` with non-stored entries read as zeros.

    ``reconstruction_error`` is the Frobenius norm of the residual over the
    whole ``n x n`` target (stored entries plus implicit zeros), which makes
    it nonincreasing in ``d``.

    Raises:
        ValidationError: ``d`` outside ``[1, n]``, non-finite entries, or
            ``symmetric=True`` on an asymmetric matrix.
    """
    n = m.n
    if not 1 <= d <= n:
        raise ValidationError(f"d must lie in [1, {n}], got {d}")
    if not np.all(np.isfinite(m.values)):
        raise ValidationError("matrix has non-finite entries; truncate it first")
    dense = m.to_dense()

    if symmetric:
        if not np.array_equal(dense, dense.T):
            raise ValidationError("symmetric factorization requested for an asymmetric matrix")
        evals, evecs = np.linalg.eigh(dense)
        order = np.argsort(evals)[::-1]
        evals, evecs = evals[order], evecs[:, order]
        negative_mass = float(-evals[evals < 0].sum())
        kept = np.clip(evals[:d], 0.0, None)
        left = evecs[:, :d] * np.sqrt(kept)
        recon = left @ left.T
        err = float(np.linalg.norm(dense - recon))
        return FactorizationResult(left, None, kept, err, True, negative_mass, m.kind)

    a, s, bt = np.linalg.svd(dense)
    root = np.sqrt(s[:d])
    left = a[:, :d] * root
    right = bt[:d].T * root
    # Eckart-Young: the residual norm is the tail of the spectrum
    err = float(np.sqrt(np.sum(s[d:] ** 2)))
    return FactorizationResult(left, right, s[:d].copy(), err, False, 0.0, m.kind)


def dot_products(f: FactorizationResult, pairs) -> np.ndarray:
    """``left_i . right_j`` (``left_i . left_j`` when symmetric) for each pair."""
    p = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
    n = f.left_factors.shape[0]
    if p.size and (p.min() < 0 or p.max() >= n):
        raise ValidationError(f"pair index outside [0, {n})")
    right = f.left_factors if f.right_factors is None else f.right_factors
    return np.einsum("ij,ij->i", f.left_factors[p[:, 0]], right[p[:, 1]])
