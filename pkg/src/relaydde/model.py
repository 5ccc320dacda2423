"""Problem data for the relay-feedback delay equation x'(t) = a(t) * f(x(t-1)).

The gain a(t) is periodic with period T = p1 + p2 and piecewise constant:
value a1 on [0, p1), value a2 on [p1, T).  The feedback is the negative
relay f(x) = -sign(x).  Both functions admit a continuous regularization in
which every jump is replaced by an affine ramp of half-width ``delta``;
``delta = 0`` selects the discontinuous originals.

All evaluators accept scalars or numpy arrays and are pure functions, so
values can be shared freely across workers.
"""

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .errors import InvalidParameterError


def _require_finite_number(name, value):
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise InvalidParameterError(f"{name} must be a real number, got {value!r}")
    if not math.isfinite(value):
        raise InvalidParameterError(f"{name} must be finite, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class Params:
    """Gain levels (a1, a2) and phase durations (p1, p2) of the periodic gain.

    All four values are positive and the period p1 + p2 must exceed the
    delay, which is normalized to 1.
    """

    a1: float
    a2: float
    p1: float
    p2: float

    def __post_init__(self):
        for name in ("a1", "a2", "p1", "p2"):
            value = _require_finite_number(name, getattr(self, name))
            if value <= 0.0:
                raise InvalidParameterError(f"{name} must be positive, got {value}")
            object.__setattr__(self, name, value)
        if self.p1 + self.p2 <= 1.0:
            raise InvalidParameterError(
                f"gain period p1 + p2 = {self.p1 + self.p2} must exceed the delay 1"
            )

    @property
    def period(self) -> float:
        return self.p1 + self.p2


@dataclass(frozen=True)
class SmoothingConfig:
    """Half-width of the ramps replacing the jumps; 0 keeps the originals."""

    delta: float = 0.0

    def __post_init__(self):
        value = _require_finite_number("delta", self.delta)
        if value < 0.0:
            raise InvalidParameterError(f"delta must be nonnegative, got {value}")
        object.__setattr__(self, "delta", value)


def validate_smoothing(params: Params, smoothing: SmoothingConfig, fixed_point=None):
    """Reject ramp widths that make the smoothed gain ill-defined.

    The three ramps per period must not overlap (2*delta < min(p1, p2)).
    When the orbit fixed point is supplied, the ramp band must also not
    swallow it (delta < fixed point), otherwise the orbit's extrema would
    never leave the band.
    """
    d = smoothing.delta
    if d == 0.0:
        return
    if 2.0 * d >= min(params.p1, params.p2):
        raise InvalidParameterError(
            f"2*delta = {2.0 * d} must be below min(p1, p2) = {min(params.p1, params.p2)}"
        )
    if fixed_point is not None and d >= fixed_point:
        raise InvalidParameterError(
            f"delta = {d} must be below the orbit fixed point {fixed_point}"
        )


@dataclass(frozen=True)
class ConstantHistory:
    """Initial segment that sits at one value on [-1, 0]."""

    value: float

    def __post_init__(self):
        object.__setattr__(self, "value", _require_finite_number("history value", self.value))

    def __call__(self, s):
        if np.ndim(s) == 0:
            return self.value
        return np.full(np.shape(s), self.value)


History = Union[ConstantHistory, Callable[[float], float]]


def coefficient(params: Params, smoothing: SmoothingConfig, t):
    """Periodic gain a(t), exact for delta = 0 and ramped for delta > 0.

    The time is reduced modulo the period once (exact fmod) and then
    compared against the branch boundaries directly; boundaries are data,
    not computed quantities, so no comparison tolerance is applied.
    """
    validate_smoothing(params, smoothing)
    a1, a2, p1 = params.a1, params.a2, params.p1
    T = params.period
    scalar = np.ndim(t) == 0
    tt = np.asarray(t, dtype=float)
    tau = np.fmod(tt, T)
    tau = np.where(tau < 0.0, tau + T, tau)
    d = smoothing.delta
    if d == 0.0:
        out = np.where(tau < p1, a1, a2)
    else:
        ramp_start = a2 + (a1 - a2) * (tau + d) / (2.0 * d)
        ramp_switch = a1 + (a2 - a1) * (tau - (p1 - d)) / (2.0 * d)
        ramp_wrap = a2 + (a1 - a2) * (tau - (T - d)) / (2.0 * d)
        out = np.select(
            [tau < d, tau < p1 - d, tau < p1 + d, tau < T - d],
            [ramp_start, a1, ramp_switch, a2],
            default=ramp_wrap,
        )
    return float(out) if scalar else out


def feedback(smoothing: SmoothingConfig, x):
    """Relay feedback: -sign(x) for delta = 0, clipped linear ramp otherwise.

    Odd by construction; the ramp has slope -1/delta on [-delta, delta].
    """
    scalar = np.ndim(x) == 0
    xx = np.asarray(x, dtype=float)
    d = smoothing.delta
    if d == 0.0:
        out = -np.sign(xx)
    else:
        out = np.where(xx <= -d, 1.0, np.where(xx >= d, -1.0, -xx / d))
    return float(out) if scalar else out
