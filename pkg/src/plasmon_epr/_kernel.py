"""Compiled right-hand side and Dormand-Prince 5(4) stepper.

The stepper follows the classic Hairer/Wanner controller (same tableau and
error norm as scipy's RK45) but runs the whole sampling loop in machine code;
the Python per-step overhead of scipy dominated runs of 1e5-1e6 steps.
"""

import math

import numpy as np
from numba import njit

OK = 0
UNDERFLOW = 1
NONFINITE = 2

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = np.array([
    [0.0, 0.0, 0.0, 0.0, 0.0],
    [1 / 5, 0.0, 0.0, 0.0, 0.0],
    [3 / 40, 9 / 40, 0.0, 0.0, 0.0],
    [44 / 45, -56 / 15, 32 / 9, 0.0, 0.0],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0.0],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
])
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# difference between the 5th-order and embedded 4th-order weights (7 stages, FSAL)
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0


@njit(cache=True)
def rhs(vec, eps0, omega, inv_omega, coupling, backaction, out):
    m = omega.size
    re = vec[0]
    two_re = 2.0 * re
    a_common = coupling * two_re * two_re
    s = 0.0
    for j in range(m):
        x = vec[2 + j]
        y = vec[2 + m + j]
        rho2 = x * x + y * y
        z = math.sqrt(1.0 + rho2)
        # z - 1 computed as rho2 / (z + 1) to avoid cancellation
        s += (rho2 / (z + 1.0) + x) * inv_omega[j]
        a = a_common * inv_omega[j]
        w = 2.0 * (omega[j] + a)
        out[2 + j] = -w * y
        out[2 + m + j] = w * x + 2.0 * a * z
    out[0] = eps0 * vec[1]
    out[1] = -eps0 * re - backaction * two_re * s


@njit(cache=True)
def _error_norm(err, y, y_new, h, rtol, atol):
    total = 0.0
    for i in range(y.size):
        scale = atol + rtol * max(abs(y[i]), abs(y_new[i]))
        e = h * err[i] / scale
        total += e * e
    return math.sqrt(total / y.size)


@njit(cache=True)
def dopri_samples(out, times, start, stop, h, max_step, rtol, atol,
                  eps0, omega, inv_omega, coupling, backaction):
    """Fill out[start:stop] by integrating from out[start - 1] at times[start - 1].

    Returns (status, next step size, accepted+rejected steps, index reached).
    """
    n = out.shape[1]
    k = np.empty((7, n))
    y = out[start - 1].copy()
    y_new = np.empty(n)
    tmp = np.empty(n)
    err = np.empty(n)
    t = times[start - 1]
    rhs(y, eps0, omega, inv_omega, coupling, backaction, k[0])
    steps = 0
    for i in range(start, stop):
        t_target = times[i]
        while t < t_target:
            h = min(h, max_step)
            scale_t = max(abs(t), abs(t_target))
            min_step = 10.0 * (np.nextafter(scale_t, np.inf) - scale_t)
            if h < min_step:
                return UNDERFLOW, h, steps, i
            # a remainder too small to step over is absorbed into this step
            clipped = t + h >= t_target - min_step
            h_use = t_target - t if clipped else h
            accepted = False
            while not accepted:
                if h_use < min_step:
                    return UNDERFLOW, h, steps, i
                for s in range(1, 6):
                    for q in range(n):
                        tmp[q] = y[q]
                    for j in range(s):
                        c = h_use * _A[s, j]
                        for q in range(n):
                            tmp[q] += c * k[j, q]
                    rhs(tmp, eps0, omega, inv_omega, coupling, backaction, k[s])
                for q in range(n):
                    y_new[q] = y[q]
                for j in range(6):
                    c = h_use * _B[j]
                    if c != 0.0:
                        for q in range(n):
                            y_new[q] += c * k[j, q]
                rhs(y_new, eps0, omega, inv_omega, coupling, backaction, k[6])
                for q in range(n):
                    err[q] = 0.0
                for j in range(7):
                    c = _E[j]
                    if c != 0.0:
                        for q in range(n):
                            err[q] += c * k[j, q]
                steps += 1
                norm = _error_norm(err, y, y_new, h_use, rtol, atol)
                if not math.isfinite(norm):
                    for q in range(n):
                        if not math.isfinite(y_new[q]):
                            return NONFINITE, h, steps, i
                    norm = 1e300
                if norm <= 1.0:
                    accepted = True
                    if norm == 0.0:
                        factor = _MAX_FACTOR
                    else:
                        factor = min(_MAX_FACTOR, _SAFETY * norm ** -0.2)
                    if clipped:
                        # land exactly on the sample (t + (t_target - t) can miss by an ulp)
                        # and keep the controller's own step for the next segment
                        h = max(h, h_use * factor) if h_use < h else h_use * factor
                        t = t_target
                    else:
                        t = t + h_use
                        h = h_use * factor
                else:
                    factor = max(_MIN_FACTOR, _SAFETY * norm ** -0.2)
                    h_use = h_use * factor
                    h = h_use
                    clipped = t + h_use >= t_target - min_step
                    if clipped:
                        h_use = t_target - t
            for q in range(n):
                y[q] = y_new[q]
                k[0, q] = k[6, q]
        for q in range(n):
            out[i, q] = y[q]
    return OK, h, steps, stop


def initial_step(y0, consts, max_step, rtol, atol):
    """Starting step size from the usual two-evaluation estimate."""
    f0 = np.empty_like(y0)
    rhs(y0, *consts, f0)
    scale = atol + np.abs(y0) * rtol
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        d0 = np.sqrt(np.mean((y0 / scale) ** 2))
        d1 = np.sqrt(np.mean((f0 / scale) ** 2))
        h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        if not math.isfinite(h0):
            h0 = 1e-6
        y1 = y0 + h0 * f0
        f1 = np.empty_like(y0)
        rhs(y1, *consts, f1)
        d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
        if d1 <= 1e-15 and d2 <= 1e-15:
            h1 = max(1e-6, h0 * 1e-3)
        else:
            h1 = (0.01 / max(d1, d2)) ** 0.2
    h = min(100 * h0, h1, max_step)
    return float(h) if math.isfinite(h) and h > 0 else float(min(1e-6, max_step))
