"""Compiled SGD inner loop.

All functions release the GIL so several Python threads can run them on the
same arrays at once (hogwild).  Nothing here allocates per sample.
"""
import math

import numpy as np
from numba import njit

SIGMOID_BOUND = 6.0
SIGMOID_TABLE_SIZE = 1000


def make_sigmoid_table():
    x = (np.arange(SIGMOID_TABLE_SIZE) * 2.0 / SIGMOID_TABLE_SIZE - 1.0) * SIGMOID_BOUND
    return 1.0 / (1.0 + np.exp(-x))


@njit(nogil=True, cache=True)
def sigmoid(x):
    if x >= 0.0:
        return 1.0 / (1.0 + math.exp(-x))
    z = math.exp(x)
    return z / (1.0 + z)


@njit(nogil=True, cache=True)
def _table_sigmoid(x, table):
    if x > SIGMOID_BOUND:
        return 1.0
    if x < -SIGMOID_BOUND:
        return 0.0
    idx = int((x + SIGMOID_BOUND) * SIGMOID_TABLE_SIZE / SIGMOID_BOUND / 2.0)
    if idx >= SIGMOID_TABLE_SIZE:
        idx = SIGMOID_TABLE_SIZE - 1
    return table[idx]


@njit(nogil=True, cache=True)
def apply_sample(vertex, context, i, targets, labels, lr, vi_buf, err_buf, table, skip_self):
    """One positive/negative group for source vertex ``i``.

    For each target ``t`` with label ``y`` the context row moves by
    ``lr * (y - sigmoid(x)) * v_i`` and the accumulated step is added to
    ``v_i`` at the end.  ``context`` may be ``vertex`` itself (first order);
    ``vi_buf`` keeps the pre-update ``v_i`` so every term uses the same point.
    Pass an empty ``table`` for exact sigmoids.  With ``skip_self`` negatives
    that land on ``i`` itself are ignored.
    """
    d = vertex.shape[1]
    use_table = table.shape[0] > 0
    for c in range(d):
        vi_buf[c] = vertex[i, c]
        err_buf[c] = 0.0
    for s in range(targets.shape[0]):
        t = targets[s]
        if skip_self and t == i and labels[s] == 0.0:
            continue
        x = 0.0
        for c in range(d):
            x += vi_buf[c] * context[t, c]
        if use_table:
            p = _table_sigmoid(x, table)
        else:
            p = sigmoid(x)
        g = (labels[s] - p) * lr
        for c in range(d):
            err_buf[c] += g * context[t, c]
            context[t, c] += g * vi_buf[c]
    for c in range(d):
        vertex[i, c] += err_buf[c]


@njit(nogil=True, cache=True)
def sgd_chunk(vertex, context, src, dst, negs, step0, total, lr0, lr1, table, skip_self):
    """Process a chunk of sampled edges with their pre-drawn negatives.

    ``step0`` is the index of the chunk's first sample within a budget of
    ``total`` samples; the learning rate decays linearly from ``lr0`` to
    ``lr1`` over that budget.
    """
    d = vertex.shape[1]
    k = negs.shape[1]
    vi_buf = np.empty(d)
    err_buf = np.empty(d)
    targets = np.empty(k + 1, dtype=np.int64)
    labels = np.zeros(k + 1)
    labels[0] = 1.0
    for s in range(src.shape[0]):
        lr = lr0 - (lr0 - lr1) * (step0 + s) / total
        targets[0] = dst[s]
        for r in range(k):
            targets[r + 1] = negs[s, r]
        apply_sample(vertex, context, src[s], targets, labels, lr, vi_buf, err_buf, table, skip_self)
