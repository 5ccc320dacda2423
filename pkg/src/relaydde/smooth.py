"""Fixed-step integrator for the smoothed system x'(t) = a_d(t) * f_d(x(t-1)).

The method of steps makes each unit interval a non-autonomous quadrature
problem: the delayed argument lies in the previous, already computed
interval.  The right-hand side never involves x(t) itself, so the classical
fourth-order Runge-Kutta step has coinciding middle stages and reduces to
Simpson's rule on g(t) = a(t) * f(x(t-1)); node reads of the delayed state
are exact grid values and midpoint reads go through the dense interpolant.

On top of the integrator: the one-period Poincare map from a constant
history, its fixed point by bracketed bisection, and the uniform distance
between the smoothed periodic orbit and the exact one.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import exact as exact_mod
from .errors import BracketError, ConvergenceError, InvalidParameterError
from .model import (
    ConstantHistory,
    Params,
    SmoothingConfig,
    coefficient,
    feedback,
    validate_smoothing,
)
from .return_map import check_orbit_conditions, map_coefficients

DEFAULT_DELTA_GRID = (0.1, 0.05, 0.025, 0.0125)


@dataclass(frozen=True)
class IntegratorConfig:
    """Fixed step size (an integer divisor of the delay) and dense-output order."""

    step: float = 1e-3
    interpolation: str = "cubic"  # "cubic" or "linear"

    def __post_init__(self):
        if not (isinstance(self.step, (int, float)) and math.isfinite(self.step)):
            raise InvalidParameterError(f"step must be a finite number, got {self.step!r}")
        if self.step <= 0.0:
            raise InvalidParameterError(f"step must be positive, got {self.step}")
        n = round(1.0 / self.step)
        if n < 1 or abs(n * self.step - 1.0) > 1e-9:
            raise InvalidParameterError(
                f"1/step must be a positive integer so the grid aligns with the delay; got step = {self.step}"
            )
        if self.interpolation not in ("cubic", "linear"):
            raise InvalidParameterError(
                f"interpolation must be 'cubic' or 'linear', got {self.interpolation!r}"
            )
        object.__setattr__(self, "step", float(self.step))

    @property
    def nodes_per_unit(self) -> int:
        return round(1.0 / self.step)


def step_for_delta(delta: float, base_step: float = 1e-3) -> float:
    """Largest admissible grid step: at most base_step and at most delta/4."""
    n = round(1.0 / base_step)
    if delta > 0.0:
        n = max(n, math.ceil(4.0 / delta - 1e-9))
    return 1.0 / n


class SampledTrajectory:
    """Uniform-grid samples on [-1, horizon] with dense output between nodes."""

    def __init__(self, times, values, derivs, step, interpolation):
        self.times = times
        self.values = values
        self.derivs = derivs
        self.step = step
        self.interpolation = interpolation
        self.horizon = float(times[-1])

    def value(self, t):
        """Dense-output evaluation on [-1, horizon]; scalars or arrays."""
        scalar = np.ndim(t) == 0
        tt = np.asarray(t, dtype=float)
        if tt.size and (tt.min() < -1.0 - 1e-9 or tt.max() > self.horizon + 1e-9):
            raise InvalidParameterError(
                f"evaluation time outside [-1, {self.horizon}]"
            )
        s = self.step
        pos = (tt - self.times[0]) / s
        i = np.clip(np.floor(pos).astype(int), 0, self.times.size - 2)
        theta = (tt - self.times[i]) / s
        v0, v1 = self.values[i], self.values[i + 1]
        if self.interpolation == "linear":
            out = v0 * (1.0 - theta) + v1 * theta
        else:
            d0, d1 = self.derivs[i], self.derivs[i + 1]
            t2 = theta * theta
            t3 = t2 * theta
            out = (
                (2.0 * t3 - 3.0 * t2 + 1.0) * v0
                + (t3 - 2.0 * t2 + theta) * s * d0
                + (-2.0 * t3 + 3.0 * t2) * v1
                + (t3 - t2) * s * d1
            )
        return float(out) if scalar else out

    def zero_crossings(self):
        """Sign-change times for t >= 0, located by linear interpolation."""
        i0 = int(np.searchsorted(self.times, 0.0))
        t = self.times[i0:]
        v = self.values[i0:]
        out = []
        prod = v[:-1] * v[1:]
        for k in np.nonzero(prod < 0.0)[0]:
            out.append(float(t[k] - v[k] * (t[k + 1] - t[k]) / (v[k + 1] - v[k])))
        for k in np.nonzero(v == 0.0)[0]:
            if 0 < k < v.size - 1 and v[k - 1] * v[k + 1] < 0.0:
                out.append(float(t[k]))
        return sorted(out)

    def write_csv(self, path):
        from .reporting import write_csv

        write_csv(path, ["t", "x"], zip(self.times.tolist(), self.values.tolist()))


def integrate(
    params: Params,
    smoothing: SmoothingConfig,
    icfg: IntegratorConfig,
    history,
    horizon: float,
) -> SampledTrajectory:
    """Forward integration by the method of steps with RK4/Simpson updates.

    ``history`` is a ConstantHistory, a plain number, or any callable on
    [-1, 0].  The returned grid extends to the first node at or beyond the
    horizon.  A positive delta requires step <= delta/4 so each ramp band is
    resolved by several nodes; delta = 0 is accepted for cross-checks only
    (the exact solver is the reference for the discontinuous system).
    """
    validate_smoothing(params, smoothing)
    if not (isinstance(horizon, (int, float)) and math.isfinite(horizon)) or horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be positive and finite, got {horizon!r}")
    d = smoothing.delta
    s = icfg.step
    if d > 0.0 and s > d / 4.0 + 1e-15:
        raise InvalidParameterError(f"step = {s} must be at most delta/4 = {d / 4.0}")
    if isinstance(history, (int, float)):
        history = ConstantHistory(float(history))
    if not callable(history):
        raise InvalidParameterError("history must be a number or a callable on [-1, 0]")

    n = icfg.nodes_per_unit
    n_fwd = int(math.ceil(horizon / s - 1e-9))
    times = s * np.arange(-n, n_fwd + 1)
    x = np.empty(times.size)
    g = np.empty(times.size)

    if isinstance(history, ConstantHistory):
        x[: n + 1] = history.value
    else:
        x[: n + 1] = [float(history(t)) for t in times[: n + 1]]
    # placeholder derivatives on the history segment, used only by the dense
    # output there; the node at t = 0 is overwritten by the forward pass
    g[: n + 1] = np.gradient(x[: n + 1], s)

    base = n  # index of t = 0
    remaining = n_fwd
    first_block = True
    while remaining > 0:
        nb = min(n, remaining)
        idx = base + np.arange(nb)
        t_left = times[idx]
        t_right = times[idx + 1]
        t_mid = t_left + 0.5 * s
        xd_left = x[idx - n]
        xd_right = x[idx - n + 1]
        if first_block:
            tm = t_mid - 1.0
            if isinstance(history, ConstantHistory):
                xd_mid = np.full(nb, history.value)
            else:
                xd_mid = np.array([float(history(v)) for v in tm])
        else:
            j = idx - n
            if icfg.interpolation == "linear":
                xd_mid = 0.5 * (x[j] + x[j + 1])
            else:
                xd_mid = 0.5 * (x[j] + x[j + 1]) + (s / 8.0) * (g[j] - g[j + 1])
        g_left = coefficient(params, smoothing, t_left) * feedback(smoothing, xd_left)
        g_mid = coefficient(params, smoothing, t_mid) * feedback(smoothing, xd_mid)
        g_right = coefficient(params, smoothing, t_right) * feedback(smoothing, xd_right)
        x[idx + 1] = x[base] + np.cumsum((s / 6.0) * (g_left + 4.0 * g_mid + g_right))
        g[idx] = g_left
        g[base + nb] = g_right[-1]
        base += nb
        remaining -= nb
        first_block = False

    return SampledTrajectory(times, x, g, s, icfg.interpolation)


def poincare_map(
    params: Params, smoothing: SmoothingConfig, icfg: IntegratorConfig, h: float
) -> float:
    """State after one gain period from the constant history h.

    delta = 0 falls back to the exact piecewise-affine solver; the numerical
    integrator is reserved for genuinely continuous right-hand sides.
    """
    T = params.period
    if smoothing.delta == 0.0:
        return exact_mod.solve_exact(params, h, T).value(T)
    traj = integrate(params, smoothing, icfg, ConstantHistory(h), T)
    return float(traj.value(T))


@dataclass(frozen=True)
class FixedPointResult:
    """Fixed point of the one-period map with its local slope estimate."""

    h_delta: float
    map_slope: float
    iterations: int
    residual: float


def _bisect_fixed_point(map_fn, lo, hi, residual_tol, max_iter=200):
    """Bisection on g(h) = map(h) - h until |g| <= residual_tol."""
    g_lo = map_fn(lo) - lo
    if abs(g_lo) <= residual_tol:
        return lo, 0, abs(g_lo)
    g_hi = map_fn(hi) - hi
    if abs(g_hi) <= residual_tol:
        return hi, 0, abs(g_hi)
    if (g_lo > 0.0) == (g_hi > 0.0):
        raise BracketError(
            f"no sign change on [{lo}, {hi}]: g(lo) = {g_lo:.6e}, g(hi) = {g_hi:.6e}"
        )
    for it in range(1, max_iter + 1):
        mid = 0.5 * (lo + hi)
        g_mid = map_fn(mid) - mid
        if abs(g_mid) <= residual_tol:
            return mid, it, abs(g_mid)
        if (g_mid > 0.0) == (g_lo > 0.0):
            lo, g_lo = mid, g_mid
        else:
            hi = mid
    raise ConvergenceError(
        f"bisection did not reach residual {residual_tol} in {max_iter} iterations"
    )


def find_fixed_point(
    params: Params,
    smoothing: SmoothingConfig,
    icfg: IntegratorConfig,
    residual_tol: float = 1e-9,
) -> FixedPointResult:
    """Fixed point of the smoothed one-period map near the exact fixed point.

    Brackets [0.8*h*, 1.2*h*] around the exact fixed point h*, bisects
    map(h) - h to the requested residual, and estimates the map slope by a
    central difference with half-width 1e-4*h*.
    """
    if not check_orbit_conditions(params).overall:
        raise InvalidParameterError(
            "parameters do not satisfy the stable-orbit conditions"
        )
    rm = map_coefficients(params)
    validate_smoothing(params, smoothing, fixed_point=rm.fixed_point)

    def poincare(h):
        return poincare_map(params, smoothing, icfg, h)

    radius = 0.2 * rm.fixed_point
    h_fix, iterations, residual = _bisect_fixed_point(
        poincare, rm.fixed_point - radius, rm.fixed_point + radius, residual_tol
    )
    eps = 1e-4 * rm.fixed_point
    slope = (poincare(h_fix + eps) - poincare(h_fix - eps)) / (2.0 * eps)
    return FixedPointResult(h_fix, slope, iterations, residual)


def orbit_distance(
    params: Params,
    smoothing: SmoothingConfig,
    icfg: IntegratorConfig,
    fixed_point_result: FixedPointResult = None,
) -> float:
    """Uniform distance over one period between the smoothed orbit and the exact one.

    Integrates one period from the smoothed fixed point and takes the max of
    |x_smooth(t) - x_exact(t)| over the sample grid, where x_exact starts at
    the exact fixed point.
    """
    fp = fixed_point_result if fixed_point_result is not None else find_fixed_point(
        params, smoothing, icfg
    )
    rm = map_coefficients(params)
    T = params.period
    exact_traj = exact_mod.solve_exact(params, rm.fixed_point, T)
    if smoothing.delta == 0.0:
        smooth_traj = exact_mod.solve_exact(params, fp.h_delta, T)
        ts = exact_mod.sample_times(T, icfg.step)
        return float(np.max(np.abs(smooth_traj.sample(ts) - exact_traj.sample(ts))))
    traj = integrate(params, smoothing, icfg, ConstantHistory(fp.h_delta), T)
    mask = (traj.times >= 0.0) & (traj.times <= T)
    ts = traj.times[mask]
    return float(np.max(np.abs(traj.values[mask] - exact_traj.sample(ts))))


def convergence_study(
    params: Params,
    deltas=DEFAULT_DELTA_GRID,
    base_step: float = 1e-3,
    interpolation: str = "cubic",
) -> dict:
    """Fixed point, slope, and orbit distance across a grid of ramp widths.

    Per-delta bracket failures are recorded instead of raised; the fitted
    constant K is the least-squares slope of distance against delta through
    the origin, over the successful rows.
    """
    report = {
        "delta": [float(d) for d in deltas],
        "h_delta": [],
        "slope": [],
        "orbit_distance": [],
        "errors": [],
        "fitted_K": None,
    }
    for d in deltas:
        smoothing = SmoothingConfig(delta=float(d))
        icfg = IntegratorConfig(step=step_for_delta(float(d), base_step), interpolation=interpolation)
        try:
            fp = find_fixed_point(params, smoothing, icfg)
            dist = orbit_distance(params, smoothing, icfg, fp)
        except (BracketError, ConvergenceError) as exc:
            report["h_delta"].append(None)
            report["slope"].append(None)
            report["orbit_distance"].append(None)
            report["errors"].append(str(exc))
            continue
        report["h_delta"].append(fp.h_delta)
        report["slope"].append(fp.map_slope)
        report["orbit_distance"].append(dist)
        report["errors"].append(None)
    pairs = [
        (d, dist)
        for d, dist in zip(report["delta"], report["orbit_distance"])
        if dist is not None
    ]
    if pairs:
        num = sum(d * dist for d, dist in pairs)
        den = sum(d * d for d, _ in pairs)
        report["fitted_K"] = num / den
    return report
