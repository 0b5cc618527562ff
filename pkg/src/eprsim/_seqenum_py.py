"""Pure-NumPy fallback for the sequence enumeration kernel.

Same contract as the compiled version in ``_seqenum.pyx``: enumerate all
k^n outcome sequences, aggregate product weights by per-category count
vector, return (keys, weights) with keys the mixed-radix encodings
sum_c counts[c] * (n+1)**c, sorted ascending, zero weights dropped.

Sequences are decoded blockwise from their integer rank so the work is
vectorized; a dict-backed sparse path handles count spaces too large for
a dense accumulator.
"""

from __future__ import annotations

import numpy as np

_BLOCK = 1 << 16


def sequence_count_weights(
    p: np.ndarray, n: int, dense_limit: int = 1 << 22
) -> tuple[np.ndarray, np.ndarray]:
    p = np.ascontiguousarray(p, dtype=np.float64)
    k = p.size
    total = k**n
    strides = (n + 1) ** np.arange(k, dtype=np.int64)
    decode = k ** np.arange(n, dtype=np.int64)  # digit 0 cycles fastest

    slots = (n + 1) ** k
    dense = slots <= dense_limit
    if dense:
        acc = np.zeros(slots, dtype=np.float64)
    else:
        sparse: dict[int, float] = {}

    for start in range(0, total, _BLOCK):
        ranks = np.arange(start, min(start + _BLOCK, total), dtype=np.int64)
        digits = (ranks[:, None] // decode[None, :]) % k
        weights = p[digits].prod(axis=1)
        keys = np.zeros(ranks.size, dtype=np.int64)
        for c in range(k):
            keys += (digits == c).sum(axis=1) * strides[c]
        if dense:
            acc += np.bincount(keys, weights=weights, minlength=slots)
        else:
            uniq, inv = np.unique(keys, return_inverse=True)
            summed = np.bincount(inv, weights=weights)
            for key, w in zip(uniq.tolist(), summed.tolist()):
                sparse[key] = sparse.get(key, 0.0) + w

    if dense:
        keys_out = np.flatnonzero(acc).astype(np.int64)
        return keys_out, acc[keys_out]
    keys_out = np.array(sorted(sparse), dtype=np.int64)
    weights_out = np.array([sparse[key] for key in keys_out.tolist()])
    nz = weights_out != 0.0
    return keys_out[nz], weights_out[nz]
