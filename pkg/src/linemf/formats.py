"""Embedding file formats.

Text (word-vector convention)::

    n d
    0 f1 f2 ... fd
    ...

with 6 significant digits.  Context vectors, when present, go to a sibling
file with the same layout at ``<path>.ctx``.

Binary (lossless)::

    b"LINEEMB1" | uint64 n | uint64 d | uint8 has_context | float64 vertex[n*d] | float64 context[n*d]

All integers and floats are little-endian.
"""
from __future__ import annotations

import os
import struct

import numpy as np

from linemf.errors import ValidationError
from linemf.trainer import EmbeddingSet

MAGIC = b"LINEEMB1"
_HEADER = struct.Struct("<8sQQB")
CONTEXT_SUFFIX = ".ctx"


def _write_text_matrix(arr: np.ndarray, path) -> None:
    n, d = arr.shape
    with open(path, "w") as fh:
        fh.write(f"{n} {d}\n")
        for i in range(n):
            fh.write(str(i) + " " + " ".join(f"{x:.6g}" for x in arr[i]) + "\n")


def _read_text_matrix(path) -> np.ndarray:
    with open(path) as fh:
        header = fh.readline().split()
        if len(header) != 2:
            raise ValidationError(f"{path}: first line must be 'n d'")
        n, d = int(header[0]), int(header[1])
        out = np.zeros((n, d))
        seen = np.zeros(n, dtype=bool)
        for lineno, line in enumerate(fh, start=2):
            parts = line.split()
            if not parts:
                continue
            if len(parts) != d + 1:
                raise ValidationError(f"{path}:{lineno}: expected id and {d} values")
            i = int(parts[0])
            if not 0 <= i < n:
                raise ValidationError(f"{path}:{lineno}: vertex id {i} outside [0, {n})")
            out[i] = [float(x) for x in parts[1:]]
            seen[i] = True
    if not seen.all():
        raise ValidationError(f"{path}: {int((~seen).sum())} vertices have no vector")
    return out


def save_embeddings(e: EmbeddingSet, path, binary: bool | None = None) -> list[str]:
    """Write ``e``; binary when ``binary`` is true or the path ends in ``.bin``.

    Returns the list of files written.
    """
    path = os.fspath(path)
    if binary is None:
        binary = path.endswith(".bin")
    if binary:
        has_ctx = e.context_vectors is not None
        with open(path, "wb") as fh:
            fh.write(_HEADER.pack(MAGIC, e.n, e.d, int(has_ctx)))
            fh.write(np.ascontiguousarray(e.vertex_vectors, dtype="<f8").tobytes())
            if has_ctx:
                fh.write(np.ascontiguousarray(e.context_vectors, dtype="<f8").tobytes())
        return [path]
    _write_text_matrix(e.vertex_vectors, path)
    written = [path]
    if e.context_vectors is not None:
        _write_text_matrix(e.context_vectors, path + CONTEXT_SUFFIX)
        written.append(path + CONTEXT_SUFFIX)
    return written


def load_embeddings(path) -> EmbeddingSet:
    """Read either format (detected from the magic bytes)."""
    path = os.fspath(path)
    with open(path, "rb") as fh:
        head = fh.read(_HEADER.size)
        if head[:8] == MAGIC:
            _, n, d, has_ctx = _HEADER.unpack(head)
            body = np.frombuffer(fh.read(), dtype="<f8")
            expected = n * d * (2 if has_ctx else 1)
            if body.size != expected:
                raise ValidationError(f"{path}: expected {expected} values, found {body.size}")
            vertex = body[: n * d].reshape(n, d).astype(np.float64)
            context = body[n * d :].reshape(n, d).astype(np.float64) if has_ctx else None
            return EmbeddingSet(vertex, context)
    vertex = _read_text_matrix(path)
    ctx_path = path + CONTEXT_SUFFIX
    context = _read_text_matrix(ctx_path) if os.path.exists(ctx_path) else None
    return EmbeddingSet(vertex, context)
