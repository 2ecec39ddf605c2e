"""Numerical laboratory for a degenerate Painleve IV family and its square-root form."""

from .analysis import (GUIDES, BehaviorClass, BehaviorTag, ClassifierParams,
                       Evidence, ExtremaEnvelope, GuideCurves, RegionId,
                       ZeroCheckEntry, ZeroStructureReport, classify,
                       concavity_sign, extrema_envelope, zero_structure_check)
from .equations import (DEFAULT_EPS_S, EquationId, acceleration,
                        acceleration_array, field_for, residual_scaled,
                        trajectory_residual,
                        trajectory_third_derivative_residual)
from .exceptions import (BudgetExceeded, CoverageError, InconclusiveEndpoint,
                         InsufficientOscillation, InvalidInput,
                         NearZeroDenominator, NoSignChange,
                         NotStrictlyPositive, OutOfRangeError, P4LabError,
                         RejectedInput, UnsupportedMultipleZeros)
from .fastpath import integrate_equation, warm_up
from .ode import (BlowUp, MaxSteps, ReachedEnd, Span, State, StepControl,
                  StepUnderflow, Termination, Trajectory, ZeroRecord,
                  detect_zeros, eval_dense, integrate, merge_two_sided)
from .search import (CriticalThreshold, Family, SweepRow, bisect_on,
                     bisect_threshold, sweep)
from .serialize import (SCHEMA, TRAJECTORY_JSONSCHEMA, trajectory_from_json,
                        trajectory_to_csv, trajectory_to_json)
from .transforms import (SignedSqrtPlan, negate_dependent, reverse_time,
                         second_derivative_at, signed_sqrt_at_zero,
                         sqrt_like_signs_at_zero, sqrt_positive,
                         square_trajectory)

__version__ = "0.1.0"

__all__ = [
    "BehaviorClass", "BehaviorTag", "BlowUp", "BudgetExceeded",
    "ClassifierParams", "CoverageError", "CriticalThreshold",
    "DEFAULT_EPS_S", "EquationId", "Evidence", "ExtremaEnvelope", "Family",
    "GUIDES", "GuideCurves", "InconclusiveEndpoint", "InsufficientOscillation",
    "InvalidInput", "MaxSteps", "NearZeroDenominator", "NoSignChange",
    "NotStrictlyPositive", "OutOfRangeError", "P4LabError", "ReachedEnd",
    "RegionId", "RejectedInput", "SCHEMA", "SignedSqrtPlan", "Span", "State",
    "StepControl", "StepUnderflow", "SweepRow", "Termination", "Trajectory",
    "TRAJECTORY_JSONSCHEMA", "UnsupportedMultipleZeros", "ZeroCheckEntry",
    "ZeroRecord", "ZeroStructureReport", "acceleration", "acceleration_array",
    "bisect_on", "bisect_threshold", "classify", "concavity_sign",
    "detect_zeros", "eval_dense", "extrema_envelope", "field_for",
    "integrate", "integrate_equation", "merge_two_sided", "negate_dependent",
    "residual_scaled", "reverse_time", "second_derivative_at",
    "signed_sqrt_at_zero", "sqrt_like_signs_at_zero", "sqrt_positive",
    "square_trajectory", "sweep", "trajectory_from_json",
    "trajectory_residual", "trajectory_third_derivative_residual",
    "trajectory_to_csv", "trajectory_to_json", "warm_up",
    "zero_structure_check",
]
