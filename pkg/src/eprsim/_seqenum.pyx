# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled brute-force enumeration of outcome sequences.

Walks all k^n length-n sequences over k categories with an odometer,
accumulating the product weight of each sequence into a dense table
indexed by the mixed-radix key of its per-category count vector
(key = sum_c counts[c] * (n+1)**c). Subtrees whose prefix weight is
exactly zero are skipped in bulk.

The caller guarantees (n+1)**k fits the dense accumulator.
"""

import numpy as np


def sequence_count_weights(const double[::1] p, long n):
    """Return (keys, weights): nonzero aggregated weights per count vector."""
    cdef long k = p.shape[0]
    cdef long slots = 1
    cdef long c, i, j, t, key
    cdef double w

    for c in range(k):
        slots *= n + 1

    acc_arr = np.zeros(slots, dtype=np.float64)
    stride_arr = np.empty(k, dtype=np.int64)
    digits_arr = np.zeros(max(n, 1), dtype=np.int64)
    counts_arr = np.zeros(k, dtype=np.int64)
    prod_arr = np.empty(n + 1, dtype=np.float64)

    cdef double[::1] acc = acc_arr
    cdef long[::1] stride = stride_arr
    cdef long[::1] d = digits_arr
    cdef long[::1] cnt = counts_arr
    cdef double[::1] pp = prod_arr

    key = 1
    for c in range(k):
        stride[c] = key
        key *= n + 1

    cnt[0] = n
    pp[0] = 1.0
    _refill(p, d, cnt, pp, 0, n, k)

    while True:
        w = pp[n]
        if w != 0.0:
            key = 0
            for c in range(k):
                key += cnt[c] * stride[c]
            acc[key] += w

        # advance the odometer; position n-1 cycles fastest
        j = n - 1
        while j >= 0 and d[j] == k - 1:
            cnt[k - 1] -= 1
            d[j] = 0
            cnt[0] += 1
            j -= 1
        if j < 0:
            break
        cnt[d[j]] -= 1
        d[j] += 1
        cnt[d[j]] += 1
        _refill(p, d, cnt, pp, j, n, k)

    keys = np.flatnonzero(acc_arr)
    return keys.astype(np.int64), acc_arr[keys]


cdef inline void _refill(const double[::1] p, long[::1] d, long[::1] cnt,
                         double[::1] pp, long start, long n, long k):
    # Recompute prefix products from `start`; on an exactly-zero product,
    # jump the digits to the subtree's last leaf so the zero-weight
    # subtree is skipped by the next odometer advance.
    cdef long i, t
    i = start
    while i < n:
        pp[i + 1] = pp[i] * p[d[i]]
        if pp[i + 1] == 0.0:
            for t in range(i + 1, n):
                cnt[d[t]] -= 1
                d[t] = k - 1
                cnt[k - 1] += 1
                pp[t + 1] = 0.0
            break
        i += 1
