"""CHSH scoring for singlet correlations vs local deterministic models.

Sign convention, fixed here once: with correlation E(theta) and settings
a, a' (first analyzer) and b, b' (second),

    S = E(a - b) - E(a - b') + E(a' - b) + E(a' - b')

i.e. the primed-primed term enters with a plus sign and the a, b' term
carries the minus. Deterministic local models are brute-forced over all
16 assignments of +-1 outcomes to the four settings; their best |S| is
exactly 2. The singlet reaches 2*sqrt(2) at the optimal settings.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .spin import correlation

CLASSICAL_BOUND = 2.0
TSIRELSON_BOUND = 2.0 * math.sqrt(2.0)

VIOLATION_TOL = 1e-12


@dataclass(frozen=True)
class ChshSettings:
    """Analyzer angles in degrees: a, a' on side 1 and b, b' on side 2."""

    a: float
    a_prime: float
    b: float
    b_prime: float

    def __post_init__(self) -> None:
        for name in ("a", "a_prime", "b", "b_prime"):
            value = float(getattr(self, name))
            if not math.isfinite(value):
                raise ValueError(f"setting {name} must be finite")
            object.__setattr__(self, name, value)


OPTIMAL_SETTINGS = ChshSettings(0.0, 90.0, 45.0, 135.0)


def chsh_score(settings: ChshSettings) -> float:
    """Singlet CHSH score under the module's sign convention."""
    e = correlation
    return (
        e(settings.a - settings.b)
        - e(settings.a - settings.b_prime)
        + e(settings.a_prime - settings.b)
        + e(settings.a_prime - settings.b_prime)
    )


def lhv_max_score(settings: ChshSettings) -> float:
    """Best |S| over all deterministic local assignments.

    A deterministic local model fixes outcomes sa, sa', sb, sb' in
    {-1, +1} independently of the far setting; E(x - y) becomes sx * sy.
    All 16 assignments are scored; the settings do not enter, which is
    the point: no local table can track four correlations at once.
    """
    del settings  # the bound is setting-independent; kept for symmetry
    best = 0.0
    for sa, sap, sb, sbp in itertools.product((-1.0, 1.0), repeat=4):
        s = sa * sb - sa * sbp + sap * sb + sap * sbp
        best = max(best, abs(s))
    return best


@dataclass(frozen=True)
class ViolationReport:
    """Quantum score vs the brute-forced local bound for one setting set."""

    settings: ChshSettings
    quantum_score: float
    classical_bound: float
    violated: bool
    margin: float


def violation_report(settings: ChshSettings) -> ViolationReport:
    """Score the settings and compare against the deterministic bound."""
    score = chsh_score(settings)
    bound = lhv_max_score(settings)
    margin = abs(score) - bound
    return ViolationReport(
        settings=settings,
        quantum_score=score,
        classical_bound=bound,
        violated=margin > VIOLATION_TOL,
        margin=margin,
    )
