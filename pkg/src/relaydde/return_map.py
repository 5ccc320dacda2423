"""Closed-form scalar return map h -> x(T) of the exact relay system.

For start values h in a computable window the solution over one gain period
has a fixed shape (two zeros t1 and t1 + 2, a positive arch until the period
end), and the state after one period is the affine function m*h + b of the
start value.  This module computes the map, its fixed point, the window
where the formula is the true return map, and the hypothesis checklist for
the stable periodic orbit.
"""

from dataclasses import dataclass

from . import exact
from .errors import DegenerateMapError, InvalidParameterError
from .model import Params


def map_slope(params: Params) -> float:
    """Slope m = 2*a2/a1 - 1 of the one-period return map."""
    return 2.0 * params.a2 / params.a1 - 1.0


def map_intercept(params: Params) -> float:
    """Intercept b = a1*(p1 - 2) + a2*(6 - (2*p1 + p2)) of the return map."""
    return params.a1 * (params.p1 - 2.0) + params.a2 * (6.0 - (2.0 * params.p1 + params.p2))


@dataclass(frozen=True)
class ReturnMap:
    """Affine map h -> slope*h + intercept together with its fixed point."""

    slope: float
    intercept: float
    fixed_point: float

    def __call__(self, h: float) -> float:
        return self.slope * h + self.intercept

    def iterate(self, h0: float, n: int) -> list:
        out = []
        h = h0
        for _ in range(n):
            h = self(h)
            out.append(h)
        return out


def map_coefficients(params: Params) -> ReturnMap:
    """Return-map coefficients (slope, intercept) and fixed point.

    Raises DegenerateMapError when a1 == a2: the slope is then exactly 1 and
    the map has no unique fixed point (the constant-gain case).
    """
    if params.a1 == params.a2:
        raise DegenerateMapError(
            "a1 == a2 gives return-map slope 1 and no unique fixed point"
        )
    m = map_slope(params)
    b = map_intercept(params)
    return ReturnMap(m, b, b / (1.0 - m))


@dataclass(frozen=True)
class ShapeValues:
    """Way-points of one period of the solution started at x(0) = h > 0."""

    h: float
    first_zero: float     # t1 = h/a1, first time the solution crosses zero
    switch_value: float   # x at the gain switch p1
    peak_value: float     # local maximum, reached at first_zero + 3
    return_value: float   # x at the period end T, equal to slope*h + intercept


def shape_values(params: Params, h: float) -> ShapeValues:
    if h <= 0.0:
        raise InvalidParameterError(f"h must be positive, got {h}")
    a1, a2, p1 = params.a1, params.a2, params.p1
    t1 = h / a1
    x1 = -h + a1 * p1 - 2.0 * a1
    x2 = (a2 / a1 - 1.0) * h + a1 * p1 - 2.0 * a1 + 3.0 * a2 - a2 * p1
    x3 = map_slope(params) * h + map_intercept(params)
    return ShapeValues(h, t1, x1, x2, x3)


@dataclass(frozen=True)
class HInterval:
    """Start values h for which the affine formula is the true return map.

    The left end is always open.  The right end is closed unless the
    positivity of the return value trims it, in which case it is open.
    """

    lower: float
    upper: float
    upper_closed: bool

    @property
    def empty(self) -> bool:
        return not self.lower < self.upper

    def contains(self, h: float) -> bool:
        if self.empty or h <= self.lower:
            return False
        return h < self.upper or (self.upper_closed and h == self.upper)


def valid_h_interval(params: Params) -> HInterval:
    """Window of start values where the one-period shape assumptions hold.

    Collects: first zero early enough (t1 + 2 <= p1, i.e. h <= a1*(p1 - 2)),
    feedback flip after the gain switch (p1 < t1 + 3, i.e. h > a1*(p1 - 3)),
    flip not past the period end (t1 + 3 <= T, i.e. h <= a1*(T - 3)), and a
    positive return value m*h + b > 0.  Positivity of h itself closes the set
    from below.
    """
    a1, p1 = params.a1, params.p1
    T = params.period
    lower = max(0.0, a1 * (p1 - 3.0))
    upper = min(a1 * (p1 - 2.0), a1 * (T - 3.0))
    upper_closed = True
    m = map_slope(params)
    b = map_intercept(params)
    if m < 0.0:
        cut = b / -m
        if cut <= upper:
            upper = cut
            upper_closed = False
    elif m > 0.0:
        lower = max(lower, -b / m)
    elif b <= 0.0:
        upper = lower
        upper_closed = False
    return HInterval(lower, upper, upper_closed)


@dataclass(frozen=True)
class ConditionReport:
    """Hypothesis-by-hypothesis checklist for the stable-orbit construction.

    ``overall`` is the conjunction; when it holds, the exact solution started
    from the map's fixed point is periodic with the gain period and
    asymptotically stable (|slope| < 1).
    """

    p1_gt_2: bool
    b_positive: bool
    contraction: bool           # 0 < a2 < a1, equivalent to |slope| < 1
    shape_window: bool          # t1 + 2 <= p1 < t1 + 3 < T at h = fixed point
    fixed_point_positive: bool  # return value at the fixed point stays positive
    degenerate: bool            # a1 == a2: slope exactly 1

    @property
    def overall(self) -> bool:
        return (
            self.p1_gt_2
            and self.b_positive
            and self.contraction
            and self.shape_window
            and self.fixed_point_positive
            and not self.degenerate
        )

    def conditions_dict(self) -> dict:
        return {
            "p1_gt_2": self.p1_gt_2,
            "b_positive": self.b_positive,
            "contraction": self.contraction,
            "shape_window": self.shape_window,
            "fixed_point_positive": self.fixed_point_positive,
        }


def check_orbit_conditions(params: Params) -> ConditionReport:
    """Evaluate every hypothesis of the stable-orbit construction."""
    b = map_intercept(params)
    degenerate = params.a1 == params.a2
    p1_gt_2 = params.p1 > 2.0
    b_positive = b > 0.0
    contraction = params.a1 > params.a2
    shape_window = False
    fixed_point_positive = False
    if not degenerate:
        m = map_slope(params)
        h_star = b / (1.0 - m)
        fixed_point_positive = h_star > 0.0
        if h_star > 0.0:
            t1 = h_star / params.a1
            shape_window = t1 + 2.0 <= params.p1 and params.p1 < t1 + 3.0 < params.period
    return ConditionReport(
        p1_gt_2=p1_gt_2,
        b_positive=b_positive,
        contraction=contraction,
        shape_window=shape_window,
        fixed_point_positive=fixed_point_positive,
        degenerate=degenerate,
    )


def iterate_map(params: Params, h0: float, n: int) -> list:
    """n forward iterates of the return map (h0 excluded from the output)."""
    return map_coefficients(params).iterate(h0, n)


def empirical_map(params: Params, h: float) -> float:
    """x(T) from constant history h, computed by the exact solver.

    Restricted to the valid h window: outside it the trajectory still exists
    but the affine formula is no longer guaranteed, so callers wanting the
    raw state after one period should use the solver directly.
    """
    window = valid_h_interval(params)
    if not window.contains(h):
        raise InvalidParameterError(
            f"h = {h} outside the valid window ({window.lower}, {window.upper}"
            + ("]" if window.upper_closed else ")")
        )
    T = params.period
    return exact.solve_exact(params, h, T).value(T)


def map_report(params: Params) -> dict:
    """JSON-ready summary: coefficients, fixed point, conditions, h window."""
    rm = map_coefficients(params)
    report = check_orbit_conditions(params)
    window = valid_h_interval(params)
    return {
        "m": rm.slope,
        "b": rm.intercept,
        "h_star": rm.fixed_point,
        "conditions": report.conditions_dict(),
        "overall": report.overall,
        "valid_h_interval": {
            "lower": window.lower,
            "upper": window.upper,
            "upper_closed": window.upper_closed,
            "empty": window.empty,
        },
    }
