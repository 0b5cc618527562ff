"""Entangled-pair measurement as unitary branching of observer records.

The package builds measurement-as-branching from the ground up: a
measurement splits each branch of the global state per outcome and
appends the outcome to the measuring observer's memory register, with
no collapse anywhere. On top of that sit the closed-form two-particle
record amplitudes, the spin singlet tables, CHSH scoring against
brute-forced local models, and multinomial statistics over branches of
N-pair runs.
"""

from .bell import (
    CLASSICAL_BOUND,
    OPTIMAL_SETTINGS,
    TSIRELSON_BOUND,
    ChshSettings,
    ViolationReport,
    chsh_score,
    lhv_max_score,
    violation_report,
)
from .branching import (
    Branch,
    BranchedState,
    ObservableBasis,
    OutcomeLabel,
    coherent_combine,
    from_coefficients,
    identity_basis,
    initial_state,
    measure,
    remeasure_consistency,
)
from .branchstats import (
    CountDistribution,
    branch_count_distribution,
    deviation_weight,
    sample_records,
)
from .epr import (
    CoefficientMatrix,
    JointDistribution,
    KMatrix,
    NoSignalingReport,
    NoSignalingSweep,
    amplitude_grid,
    joint_probability,
    k_matrix,
    marginal,
    no_signaling_report,
    no_signaling_sweep,
    random_coefficients,
    run_epr,
)
from .errors import (
    CapacityError,
    ConsistencyError,
    DimensionError,
    EprError,
    NormalizationError,
    SlotError,
    UnitarityError,
)
from .linalg import (
    basis_ket,
    inner,
    is_normalized,
    is_unitary,
    norm,
    random_ket,
    random_unitary,
    tensor,
)
from .spin import correlation, rotation_overlap, singlet, singlet_joint_probability

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "BranchedState",
    "CLASSICAL_BOUND",
    "CapacityError",
    "ChshSettings",
    "CoefficientMatrix",
    "ConsistencyError",
    "CountDistribution",
    "DimensionError",
    "EprError",
    "JointDistribution",
    "KMatrix",
    "NormalizationError",
    "NoSignalingReport",
    "NoSignalingSweep",
    "OPTIMAL_SETTINGS",
    "ObservableBasis",
    "OutcomeLabel",
    "SlotError",
    "TSIRELSON_BOUND",
    "UnitarityError",
    "ViolationReport",
    "amplitude_grid",
    "basis_ket",
    "branch_count_distribution",
    "chsh_score",
    "coherent_combine",
    "correlation",
    "deviation_weight",
    "from_coefficients",
    "identity_basis",
    "initial_state",
    "inner",
    "is_normalized",
    "is_unitary",
    "joint_probability",
    "k_matrix",
    "lhv_max_score",
    "marginal",
    "measure",
    "no_signaling_report",
    "no_signaling_sweep",
    "norm",
    "random_coefficients",
    "random_ket",
    "random_unitary",
    "remeasure_consistency",
    "rotation_overlap",
    "run_epr",
    "sample_records",
    "singlet",
    "singlet_joint_probability",
    "tensor",
    "violation_report",
    "__version__",
]
