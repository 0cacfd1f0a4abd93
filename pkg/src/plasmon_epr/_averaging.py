"""Averages over one oscillation period, shared by traces and comparisons."""

import numpy as np


def trapezoid_weights(n_points: int) -> np.ndarray:
    """Weights of the composite trapezoid rule over ``n_points`` equispaced samples, summing to 1.

    Over a full period the rule averages every harmonic below order n_points - 1 exactly.
    """
    if n_points < 2:
        return np.ones(1)
    w = np.ones(n_points)
    w[0] = w[-1] = 0.5
    return w / (n_points - 1)


def burst_average(times, values, burst: int):
    """Average consecutive groups of ``burst`` samples; returns (centre times, averages)."""
    times = np.asarray(times, dtype=float)
    values = np.asarray(values)
    if burst == 1:
        return times, values
    if times.size % burst:
        raise ValueError(f"{times.size} samples do not split into bursts of {burst}")
    w = trapezoid_weights(burst)
    t = times.reshape(-1, burst)
    grouped = values.reshape((-1, burst) + values.shape[1:])
    return 0.5 * (t[:, 0] + t[:, -1]), np.tensordot(w, grouped, axes=([0], [1]))


def sliding_period_average(times, values, period_samples: int):
    """Centred trapezoid average over windows of ``period_samples`` intervals.

    For a uniform grid with ``period_samples`` steps per period. The output is
    ``period_samples`` samples shorter than the input.
    """
    times = np.asarray(times, dtype=float)
    values = np.asarray(values, dtype=float)
    n = int(period_samples)
    if n < 1 or n >= times.size:
        raise ValueError(f"period_samples must lie in 1..{times.size - 1}, got {n}")
    w = trapezoid_weights(n + 1)
    count = times.size - n
    out = np.zeros((count,) + values.shape[1:])
    for j, wj in enumerate(w):
        out += wj * values[j:j + count]
    return 0.5 * (times[:count] + times[n:]), out
