"""Backend selection for the sequence enumeration kernel.

The compiled extension is optional: if it failed to build, the NumPy
fallback in ``_seqenum_py`` is used transparently. Both implement the
identical contract and are cross-checked in the test suite.
"""

from __future__ import annotations

import numpy as np

from . import _seqenum_py
from .errors import CapacityError

try:
    from . import _seqenum  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build environment
    _seqenum = None

HAVE_COMPILED = _seqenum is not None

# Dense accumulators are indexed by (n+1)**k count-vector keys; above this
# the compiled kernel would allocate too much, so the sparse fallback runs.
DENSE_SLOT_LIMIT = 1 << 22

DEFAULT_SEQUENCE_CAP = 10**7


def backend() -> str:
    """Name of the kernel used by default: 'compiled' or 'python'."""
    return "compiled" if HAVE_COMPILED else "python"


def sequence_count_weights(
    p: np.ndarray,
    n: int,
    cap: int = DEFAULT_SEQUENCE_CAP,
    implementation: str = "auto",
) -> tuple[np.ndarray, np.ndarray]:
    """Aggregate weights of all k^n outcome sequences by count vector.

    ``p`` holds the k category probabilities of one draw. Every length-n
    sequence contributes the product of its per-position probabilities to
    its count vector's weight. Returns ``(keys, weights)`` where key
    ``sum_c counts[c] * (n+1)**c`` encodes the count vector; keys are
    ascending and exact-zero weights are dropped.
    """
    p = np.ascontiguousarray(p, dtype=np.float64)
    if p.ndim != 1 or p.size == 0:
        raise ValueError("category probabilities must be a nonempty 1-d array")
    if not np.all(np.isfinite(p)) or np.any(p < 0.0):
        raise ValueError("category probabilities must be finite and nonnegative")
    n = int(n)
    if n < 0:
        raise ValueError("sequence length must be nonnegative")
    k = p.size

    total = k**n
    if total > cap:
        raise CapacityError(
            f"enumeration of {k}**{n} = {total} sequences exceeds cap {cap}; "
            "raise the cap or use multinomial compression"
        )
    slots = (n + 1) ** k
    if slots >= 1 << 62:
        raise CapacityError(
            f"count-vector key space (n+1)**k = {slots} overflows 64-bit keys"
        )

    if implementation == "auto":
        use_compiled = HAVE_COMPILED and slots <= DENSE_SLOT_LIMIT
    elif implementation == "compiled":
        if not HAVE_COMPILED:
            raise RuntimeError("compiled kernel is not available")
        if slots > DENSE_SLOT_LIMIT:
            raise CapacityError(
                f"compiled kernel needs a dense table of {slots} slots, "
                f"above the limit {DENSE_SLOT_LIMIT}"
            )
        use_compiled = True
    elif implementation == "python":
        use_compiled = False
    else:
        raise ValueError(f"unknown implementation {implementation!r}")

    if use_compiled:
        return _seqenum.sequence_count_weights(p, n)
    return _seqenum_py.sequence_count_weights(p, n, dense_limit=DENSE_SLOT_LIMIT)
