"""Center-focus analysis for planar power-law predator-prey systems.

The library answers one question about the two-species model

    dx/dt = x**a1 * y**b1 - 1
    dy/dt = K * (1 - x**a3 * y**b3)        (K > 0)

on the open positive quadrant: when the equilibrium (1, 1) has purely
imaginary eigenvalues, is it a center or a fine focus?  Closed-form
focal values, a table of first integrals, reversibility transforms, a
numerical Lyapunov engine and a Poincare return map all feed the same
verdict and cross-check each other.
"""

from .classifier import (
    CenterCase,
    CenterClassification,
    LinearType,
    Verdict,
    classification_record,
    classify,
    linear_type,
    match_table_cases,
    witness_factor_value,
)
from .conserved import (
    FirstIntegral,
    IntegralCase,
    build_integral,
    evaluate,
    format_integral,
    gradient,
    invariance_residual,
)
from .dynamics import (
    BautinResult,
    CycleRecord,
    CycleStability,
    LimitCycleReport,
    ReturnRecord,
    TerminationReason,
    Trajectory,
    bautin_scenario,
    detect_limit_cycles,
    displacement_profile,
    format_cycle_report,
    format_return_record,
    format_trajectory,
    integrate,
    poincare_return,
    section_displacement,
)
from .errors import (
    BadBase,
    CaseMismatch,
    DegenerateK,
    DomainError,
    InsufficientDegree,
    IntegrationFailure,
    InternalInconsistency,
    LotkaError,
    NoKnownIntegral,
    NonIsolatedEquilibrium,
    NoPositiveEquilibrium,
    NoReturn,
    PreconditionViolated,
)
from .focal import (
    FocalBranch,
    FocalValues,
    LyapunovQuantities,
    SignProbe,
    TaylorField,
    closed_form_focal,
    focal_record,
    lyapunov_numeric,
    return_map_sign_probe,
    taylor_expand,
)
from .model import (
    CanonicalParams,
    EigenvalueKind,
    JacobianSummary,
    OffsetParams,
    Point,
    RawLotkaParams,
    canonicalize,
    from_offset_form,
    from_record,
    jacobian,
    to_offset_form,
    to_record,
    vector_field,
)
from .symmetry import (
    TransformedField,
    r1_residual,
    r2_residual,
    r2_transform,
    reflection,
    transformed_field_value,
)

__version__ = "0.1.0"

__all__ = [
    "BadBase",
    "BautinResult",
    "CanonicalParams",
    "CaseMismatch",
    "CenterCase",
    "CenterClassification",
    "CycleRecord",
    "CycleStability",
    "DegenerateK",
    "DomainError",
    "EigenvalueKind",
    "FirstIntegral",
    "FocalBranch",
    "FocalValues",
    "InsufficientDegree",
    "IntegralCase",
    "IntegrationFailure",
    "InternalInconsistency",
    "JacobianSummary",
    "LimitCycleReport",
    "LinearType",
    "LotkaError",
    "LyapunovQuantities",
    "NoKnownIntegral",
    "NonIsolatedEquilibrium",
    "NoPositiveEquilibrium",
    "NoReturn",
    "OffsetParams",
    "Point",
    "PreconditionViolated",
    "RawLotkaParams",
    "ReturnRecord",
    "SignProbe",
    "TaylorField",
    "TerminationReason",
    "Trajectory",
    "TransformedField",
    "Verdict",
    "bautin_scenario",
    "build_integral",
    "canonicalize",
    "classification_record",
    "classify",
    "closed_form_focal",
    "detect_limit_cycles",
    "displacement_profile",
    "evaluate",
    "focal_record",
    "format_cycle_report",
    "format_integral",
    "format_return_record",
    "format_trajectory",
    "from_offset_form",
    "from_record",
    "gradient",
    "integrate",
    "invariance_residual",
    "jacobian",
    "linear_type",
    "lyapunov_numeric",
    "match_table_cases",
    "poincare_return",
    "r1_residual",
    "r2_residual",
    "r2_transform",
    "reflection",
    "return_map_sign_probe",
    "section_displacement",
    "taylor_expand",
    "to_offset_form",
    "to_record",
    "transformed_field_value",
    "vector_field",
    "witness_factor_value",
]
