"""Shared test helpers."""

from relaydde import Params, check_orbit_conditions, valid_h_interval


def sample_stable_params(rng, count, max_attempts=200_000):
    """Rejection-sample parameter sets passing the orbit conditions.

    Returns (params, h) pairs with h drawn from the interior of the valid
    start-value window, so the affine return-map formula applies.
    """
    out = []
    attempts = 0
    while len(out) < count:
        attempts += 1
        if attempts > max_attempts:
            raise RuntimeError("parameter sampler exhausted its attempt budget")
        a1 = rng.uniform(0.5, 4.0)
        a2 = a1 * rng.uniform(0.1, 0.9)
        p1 = rng.uniform(2.05, 3.5)
        p2 = rng.uniform(1.0, 4.0)
        params = Params(a1, a2, p1, p2)
        if not check_orbit_conditions(params).overall:
            continue
        window = valid_h_interval(params)
        if window.empty:
            continue
        h = window.lower + rng.uniform(0.05, 0.95) * (window.upper - window.lower)
        if not window.contains(h):
            continue
        out.append((params, h))
    return out
