import numpy as np
import pytest

from conftest import sample_stable_params
from relaydde import (
    InvalidParameterError,
    Params,
    REFERENCE_ROWS,
    RunawayError,
    SmoothingConfig,
    coefficient,
    feedback,
    is_slowly_oscillating,
    map_coefficients,
    solve_exact,
    zero_crossings,
)

ROW1 = Params(1.0, 0.25, 2.5, 1.5)


def test_row1_closed_form_waypoints():
    traj = solve_exact(ROW1, 0.25, 4.0)
    assert traj.value(2.5) == pytest.approx(0.25, abs=1e-10)
    assert traj.value(3.25) == pytest.approx(0.4375, abs=1e-10)
    assert traj.value(4.0) == pytest.approx(0.25, abs=1e-10)


def test_initial_value_and_first_zero():
    traj = solve_exact(ROW1, 0.25, 4.0)
    assert traj.value(0.0) == 0.25
    assert traj.zeros[0] == pytest.approx(0.25, abs=1e-12)  # t1 = h/a1
    assert traj.value(traj.zeros[0]) == pytest.approx(0.0, abs=1e-12)


def test_zero_crossings_row1_two_periods():
    traj = solve_exact(ROW1, 0.25, 8.0)
    assert zero_crossings(traj) == pytest.approx([0.25, 2.25, 4.25, 6.25], abs=1e-12)


def test_fixed_point_periodicity_all_rows():
    for row in REFERENCE_ROWS:
        params = row.params()
        h_star = map_coefficients(params).fixed_point
        T = params.period
        traj = solve_exact(params, h_star, 10 * T)
        for k in range(1, 11):
            assert abs(traj.value(k * T) - h_star) <= 1e-10


def test_periodicity_dense_at_fixed_point():
    h_star = map_coefficients(ROW1).fixed_point
    T = ROW1.period
    traj = solve_exact(ROW1, h_star, 10 * T)
    ts = np.linspace(0.0, 9 * T, 1000)
    assert np.max(np.abs(traj.sample(ts + T) - traj.sample(ts))) <= 1e-10


def test_no_crossing_before_horizon():
    traj = solve_exact(ROW1, 0.4, 0.2)
    assert zero_crossings(traj) == []


def test_zero_landing_exactly_on_gain_switch():
    # h = a1*(p1 - 2) puts the second zero exactly at p1 (dyadic arithmetic);
    # the crossing must be classified from the post-switch slope
    traj = solve_exact(ROW1, 0.5, 4.0)
    assert traj.zeros == [0.5, 2.5]
    assert traj.value(2.5) == 0.0
    assert traj.value(4.0) == pytest.approx(-0.5 * 0.5 + 0.375, abs=1e-12)


def test_negation_symmetry_exact():
    pos = solve_exact(ROW1, 0.25, 8.0)
    neg = solve_exact(ROW1, -0.25, 8.0)
    ts = np.linspace(0.0, 8.0, 1000)
    assert np.max(np.abs(neg.sample(ts) + pos.sample(ts))) <= 1e-12
    assert neg.zeros == pytest.approx(pos.zeros, abs=1e-15)


def test_segment_continuity():
    traj = solve_exact(ROW1, 0.31, 40.0)
    worst = max(
        abs(a.x_end - b.x_start) for a, b in zip(traj.segments, traj.segments[1:])
    )
    assert worst <= 1e-12 * (1.0 + traj.horizon)
    starts = [s.t_start for s in traj.segments]
    assert all(b > a for a, b in zip(starts, starts[1:]))
    assert traj.segments[0].t_start == 0.0
    assert traj.segments[-1].t_end == 40.0


def test_derivative_matches_branch_lookups():
    rng = np.random.default_rng(3)
    sc0 = SmoothingConfig(0.0)
    traj = solve_exact(ROW1, 0.31, 30.0)
    inner = [s for s in traj.segments if s.t_start >= 1.0]
    for seg in rng.choice(len(inner), size=40, replace=True):
        s = inner[seg]
        t = s.t_start + 0.5 * (s.t_end - s.t_start)
        expected = coefficient(ROW1, sc0, t) * feedback(sc0, traj.value(t - 1.0))
        assert s.slope == expected


def test_eval_errors_and_boundaries():
    traj = solve_exact(ROW1, 0.25, 4.0)
    with pytest.raises(InvalidParameterError):
        traj.value(-0.1)
    with pytest.raises(InvalidParameterError):
        traj.value(4.0001)
    # junction values are shared floats between adjacent segments
    for left, right in zip(traj.segments, traj.segments[1:]):
        assert left.value(left.t_end) == right.x_start


def test_argument_errors():
    with pytest.raises(InvalidParameterError):
        solve_exact(ROW1, 0.0, 4.0)
    with pytest.raises(InvalidParameterError):
        solve_exact(ROW1, 0.25, 0.0)
    with pytest.raises(InvalidParameterError):
        solve_exact(ROW1, 0.25, -1.0)


def test_runaway_cap():
    with pytest.raises(RunawayError):
        solve_exact(ROW1, 0.25, 40.0, max_events=5)


def test_slowly_oscillating_helper():
    assert is_slowly_oscillating([0.25, 2.25, 4.25]) is True
    assert is_slowly_oscillating([]) is True
    assert is_slowly_oscillating([3.0]) is True
    assert is_slowly_oscillating([1.0, 1.5]) is False
    assert is_slowly_oscillating([0.0, 1.0]) is False  # gap equal to the delay
    with pytest.raises(InvalidParameterError):
        is_slowly_oscillating([2.0, 1.0])


def test_one_period_matches_affine_map_random():
    rng = np.random.default_rng(17)
    for params, h in sample_stable_params(rng, 30):
        rm = map_coefficients(params)
        got = solve_exact(params, h, params.period).value(params.period)
        assert abs(got - rm(h)) <= 1e-9


def test_csv_exports(tmp_path):
    traj = solve_exact(ROW1, 0.25, 4.0)
    seg_path = tmp_path / "segments.csv"
    smp_path = tmp_path / "samples.csv"
    traj.write_segments_csv(seg_path)
    traj.write_samples_csv(smp_path, 0.25)
    seg_lines = seg_path.read_text().splitlines()
    assert seg_lines[0] == "t_start,t_end,x_start,slope"
    assert len(seg_lines) == len(traj.segments) + 1
    smp_lines = smp_path.read_text().splitlines()
    assert smp_lines[0] == "t,x"
    t_last, x_last = smp_lines[-1].split(",")
    assert float(t_last) == 4.0
    assert float(x_last) == pytest.approx(0.25, abs=1e-12)
