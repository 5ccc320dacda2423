"""Exact and smoothed analysis of a unit-delay relay equation with periodic piecewise-constant gain.

The package computes solutions of x'(t) = a(t) * f(x(t-1)) exactly as chains
of affine segments, derives the closed-form one-period return map and its
stable fixed point, and verifies that the stable periodic orbit persists when
the discontinuous gain and relay feedback are replaced by ramped continuous
versions.
"""

from .analysis import (
    REFERENCE_ROWS,
    SweepReport,
    TableRow,
    openness_probe,
    sweep,
    symmetry_check,
    verify_table,
)
from .errors import (
    BracketError,
    ConvergenceError,
    DegenerateMapError,
    InvalidParameterError,
    RelayDDEError,
    RunawayError,
)
from .exact import (
    AffineSegment,
    Trajectory,
    is_slowly_oscillating,
    sample_times,
    solve_exact,
    zero_crossings,
)
from .model import (
    ConstantHistory,
    Params,
    SmoothingConfig,
    coefficient,
    feedback,
    validate_smoothing,
)
from .return_map import (
    ConditionReport,
    HInterval,
    ReturnMap,
    ShapeValues,
    check_orbit_conditions,
    empirical_map,
    iterate_map,
    map_coefficients,
    map_intercept,
    map_report,
    map_slope,
    shape_values,
    valid_h_interval,
)
from .smooth import (
    DEFAULT_DELTA_GRID,
    FixedPointResult,
    IntegratorConfig,
    SampledTrajectory,
    convergence_study,
    find_fixed_point,
    integrate,
    orbit_distance,
    poincare_map,
    step_for_delta,
)

__version__ = "0.1.0"

__all__ = [
    "AffineSegment",
    "BracketError",
    "ConditionReport",
    "ConstantHistory",
    "ConvergenceError",
    "DEFAULT_DELTA_GRID",
    "DegenerateMapError",
    "FixedPointResult",
    "HInterval",
    "IntegratorConfig",
    "InvalidParameterError",
    "Params",
    "REFERENCE_ROWS",
    "RelayDDEError",
    "ReturnMap",
    "RunawayError",
    "SampledTrajectory",
    "ShapeValues",
    "SmoothingConfig",
    "SweepReport",
    "TableRow",
    "Trajectory",
    "check_orbit_conditions",
    "coefficient",
    "convergence_study",
    "empirical_map",
    "feedback",
    "find_fixed_point",
    "integrate",
    "is_slowly_oscillating",
    "iterate_map",
    "map_coefficients",
    "map_intercept",
    "map_report",
    "map_slope",
    "openness_probe",
    "orbit_distance",
    "poincare_map",
    "sample_times",
    "shape_values",
    "solve_exact",
    "step_for_delta",
    "sweep",
    "symmetry_check",
    "valid_h_interval",
    "validate_smoothing",
    "verify_table",
    "zero_crossings",
]
