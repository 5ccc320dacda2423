"""Event-driven exact solver for x'(t) = a(t) * (-sign(x(t-1))) from a constant history.

Between events the delayed state has constant sign and the gain is constant,
so the derivative is constant and the solution is a chain of affine segments
computed with no discretization error.  Events are the gain switches (k*T and
k*T + p1) and the delayed images z + 1 of every zero crossing z found so far;
zeros themselves are obtained in closed form from the segment data.
"""

import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass

import numpy as np

from .errors import InvalidParameterError, RunawayError
from .model import Params

_TIME_TOL = 1e-12  # coincidence tolerance for event timestamps

# event kinds, processed together when their timestamps coincide
_SWITCH = 0    # gain changes value; payload = new gain
_FEEDBACK = 1  # a zero crossed one delay ago; payload = new delayed sign
_END = 2       # horizon reached


@dataclass(frozen=True)
class AffineSegment:
    """One straight piece of the solution: x(t) = x_start + slope*(t - t_start)."""

    t_start: float
    t_end: float
    x_start: float
    slope: float

    @property
    def x_end(self) -> float:
        return self.x_start + self.slope * (self.t_end - self.t_start)

    def value(self, t: float) -> float:
        return self.x_start + self.slope * (t - self.t_start)


class Trajectory:
    """Continuous piecewise-affine solution on [0, horizon].

    Segments chain exactly: each segment starts at the float value the
    previous one ends with, so evaluation at a junction is unambiguous.
    ``zeros`` holds the sign-change times recorded during construction.
    """

    def __init__(self, params, history_value, horizon, segments, zeros):
        self.params = params
        self.history_value = history_value
        self.horizon = horizon
        self.segments = segments
        self.zeros = zeros
        self._starts = [seg.t_start for seg in segments]
        last = segments[-1]
        self._knot_t = np.array(self._starts + [last.t_end])
        self._knot_x = np.array([seg.x_start for seg in segments] + [last.x_end])

    def segment_at(self, t: float) -> AffineSegment:
        i = bisect_right(self._starts, t) - 1
        return self.segments[max(i, 0)]

    def value(self, t: float) -> float:
        """Solution value at a single time in [0, horizon]."""
        if not 0.0 <= t <= self.horizon:
            raise InvalidParameterError(
                f"t = {t} outside the trajectory domain [0, {self.horizon}]"
            )
        return self.segment_at(t).value(t)

    def sample(self, ts):
        """Vectorized evaluation; exact for the affine pieces (linear knots)."""
        ts = np.asarray(ts, dtype=float)
        if ts.size and (ts.min() < 0.0 or ts.max() > self.horizon):
            raise InvalidParameterError("sample times outside [0, horizon]")
        return np.interp(ts, self._knot_t, self._knot_x)

    def write_segments_csv(self, path):
        from .reporting import write_csv

        rows = [(s.t_start, s.t_end, s.x_start, s.slope) for s in self.segments]
        write_csv(path, ["t_start", "t_end", "x_start", "slope"], rows)

    def write_samples_csv(self, path, sample_step: float):
        from .reporting import write_csv

        if sample_step <= 0.0:
            raise InvalidParameterError("sample_step must be positive")
        ts = sample_times(self.horizon, sample_step)
        xs = self.sample(ts)
        write_csv(path, ["t", "x"], zip(ts.tolist(), xs.tolist()))


def sample_times(horizon: float, step: float) -> np.ndarray:
    """Uniform grid 0, step, 2*step, ... with the horizon appended if missed."""
    n = int(math.floor(horizon / step + 1e-9))
    ts = step * np.arange(n + 1)
    if ts[-1] > horizon:
        ts[-1] = horizon
    elif horizon - ts[-1] > 1e-12 * max(1.0, horizon):
        ts = np.append(ts, horizon)
    return ts


def _switch_events(params, horizon, cap):
    """Gain-switch times in (0, horizon]: a2 at k*T + p1, a1 at (k+1)*T."""
    events = []
    T = params.period
    k = 0
    while True:
        t_down = k * T + params.p1
        t_up = (k + 1) * T
        if t_down > horizon and t_up > horizon:
            break
        if t_down <= horizon:
            events.append((t_down, _SWITCH, params.a2))
        if t_up <= horizon:
            events.append((t_up, _SWITCH, params.a1))
        k += 1
        if len(events) > cap:
            raise RunawayError(f"more than {cap} gain switches before the horizon")
    return events


def solve_exact(params: Params, h: float, horizon: float, max_events: int = 10**6) -> Trajectory:
    """Exact forward solution with x(0) = h from the constant history h.

    Returns the unique continuous trajectory whose slope on every segment is
    a(t) * (-sign of the delayed state).  Zero crossings are computed in
    closed form (one division per zero) and immediately scheduled as
    feedback flips one delay later.
    """
    if isinstance(h, bool) or not isinstance(h, (int, float)) or not math.isfinite(h):
        raise InvalidParameterError(f"history value must be a finite number, got {h!r}")
    if h == 0.0:
        raise InvalidParameterError("history value h must be nonzero")
    if not (isinstance(horizon, (int, float)) and math.isfinite(horizon)) or horizon <= 0.0:
        raise InvalidParameterError(f"horizon must be positive and finite, got {horizon!r}")
    h = float(h)
    horizon = float(horizon)

    heap = _switch_events(params, horizon, max_events)
    heap.append((horizon, _END, 0.0))
    heapq.heapify(heap)

    t_cur = 0.0
    x_cur = h
    gain = params.a1                      # a(0), left-closed branch convention
    dsign = 1.0 if h > 0.0 else -1.0      # sign of the delayed state x(t - 1)
    segments = []
    zeros = []
    processed = 0

    while True:
        slope = -gain * dsign
        if slope == 0.0:
            raise RunawayError("zero slope segment: delayed state stuck at zero")
        t_next = heap[0][0]

        # A zero inside this segment schedules a feedback flip at z + 1,
        # which may itself become the earliest event and cut the segment.
        if x_cur != 0.0:
            x_ahead = x_cur + slope * (t_next - t_cur)
            if x_cur * x_ahead < 0.0:
                z = t_cur - x_cur / slope
                if not zeros or z > zeros[-1]:
                    zeros.append(z)
                    if z + 1.0 <= horizon:
                        heapq.heappush(heap, (z + 1.0, _FEEDBACK, -math.copysign(1.0, x_cur)))
                        t_next = heap[0][0]

        segments.append(AffineSegment(t_cur, t_next, x_cur, slope))
        x_next = x_cur + slope * (t_next - t_cur)

        new_gain, new_dsign = gain, dsign
        end_reached = False
        while heap and heap[0][0] <= t_next + _TIME_TOL:
            _, kind, payload = heapq.heappop(heap)
            processed += 1
            if processed > max_events:
                raise RunawayError(f"more than {max_events} events before the horizon")
            if kind == _SWITCH:
                new_gain = payload
            elif kind == _FEEDBACK:
                new_dsign = payload
            else:
                end_reached = True

        # A zero landing exactly on a segment junction: classify once the next
        # slope is known.  Continuing in the approach direction is a genuine
        # sign change; reversing means the solution only touched zero.
        if x_next == 0.0 and not end_reached:
            next_slope = -new_gain * new_dsign
            if (next_slope > 0.0) == (slope > 0.0):
                if not zeros or t_next > zeros[-1]:
                    zeros.append(t_next)
                    if t_next + 1.0 <= horizon:
                        heapq.heappush(
                            heap, (t_next + 1.0, _FEEDBACK, math.copysign(1.0, next_slope))
                        )

        gain, dsign = new_gain, new_dsign
        t_cur, x_cur = t_next, x_next
        if end_reached:
            break

    return Trajectory(params, h, horizon, segments, zeros)


def zero_crossings(traj: Trajectory) -> list:
    """Strictly increasing times where the solution changes sign."""
    return list(traj.zeros)


def is_slowly_oscillating(zeros, delay: float = 1.0) -> bool:
    """True when every gap between consecutive sign changes exceeds the delay.

    Vacuously true for fewer than two zeros.
    """
    zs = list(zeros)
    for a, b in zip(zs, zs[1:]):
        if b <= a:
            raise InvalidParameterError("zeros must be strictly increasing")
    return all(b - a > delay for a, b in zip(zs, zs[1:]))
