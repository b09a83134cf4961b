"""Explicit Runge-Kutta propagation for matrix-valued linear ODEs.

``integrate`` runs an adaptive Dormand-Prince 5(4) pair with its free
fourth-order continuous extension, so output grids much finer than the
natural step cost only interpolation.  ``fixed_step`` switches to classic RK4
on a uniform sub-grid, which makes runs bit-reproducible.
"""
from __future__ import annotations

import numpy as np

# Dormand-Prince 5(4) tableau
_C = np.array([0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1, 1])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
_E = _B - np.array([5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40])
# continuous extension: y(t + th h) = y + h sum_i K_i sum_j P[i, j] th^(j+1)
_P = np.array([
    [1, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0, 0, 0, 0],
    [0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])


class StepStats:
    def __init__(self):
        self.accepted = 0
        self.rejected = 0
        self.rhs_calls = 0

    def __repr__(self):
        return f"StepStats(accepted={self.accepted}, rejected={self.rejected}, rhs_calls={self.rhs_calls})"


def _combine(y, h, coeffs, ks):
    out = y.copy()
    for c, k in zip(coeffs, ks):
        if c != 0:
            out += (h * c) * k
    return out


def integrate(rhs, y0, t_out, *, rtol=1e-8, atol=None, fixed_step=None, breakpoints=(), on_output=None, h0=None, max_steps=10_000_000):
    """Propagate ``y' = rhs(t, y)`` through the monotone output times ``t_out``.

    ``rhs(t, y)`` returns a new array.  ``t_out`` may be decreasing for
    backward integration.  ``breakpoints`` are times the step must land on
    (pulse edges).  ``on_output(i, t, y)`` is called at every output time;
    the final state and a ``StepStats`` are returned.
    """
    t_out = np.asarray(t_out, dtype=float)
    if t_out.size == 0:
        raise ValueError("t_out must contain at least one time")
    direction = 1.0 if t_out.size < 2 or t_out[-1] >= t_out[0] else -1.0
    diffs = np.diff(t_out) * direction
    if np.any(diffs <= 0):
        raise ValueError("t_out must be strictly monotone")
    atol = rtol if atol is None else atol
    stats = StepStats()

    y = np.array(y0, dtype=complex, copy=True)
    t = float(t_out[0])
    if on_output is not None:
        on_output(0, t, y)
    if t_out.size == 1:
        return y, stats

    t_end = float(t_out[-1])
    bps = sorted({float(b) for b in breakpoints if (b - t) * direction > 0 and (t_end - b) * direction > 0}, reverse=direction < 0)
    stops = sorted(set(bps) | {t_end}, reverse=direction < 0)

    if fixed_step is not None:
        return _integrate_rk4(rhs, y, t_out, stops, float(fixed_step), direction, on_output, stats)

    span = abs(t_end - t)
    h = h0 if h0 is not None else span * 1e-4
    h = min(abs(h), span)
    out_idx = 1
    k1 = rhs(_inside(t, t, stops[0]), y)
    stats.rhs_calls += 1
    for stop in stops:
        while (stop - t) * direction > 1e-15 * max(1.0, abs(stop)):
            if stats.accepted + stats.rejected > max_steps:
                raise RuntimeError("maximum number of integration steps exceeded")
            remaining = abs(stop - t)
            landing = h >= remaining * (1 - 1e-12)
            step = remaining if landing else h
            hs = direction * step
            t_end_step = stop if landing else t + hs
            ks = [k1]
            for i in range(1, 7):
                yi = _combine(y, hs, _A[i], ks)
                ks.append(rhs(_inside(t + _C[i] * hs, t, t_end_step), yi))
            stats.rhs_calls += 6
            y_new = _combine(y, hs, _A[6], ks[:6])
            err_vec = _combine(np.zeros_like(y), hs, _E, ks)
            scale = atol + rtol * max(np.max(np.abs(y)), np.max(np.abs(y_new)))
            err = np.max(np.abs(err_vec)) / scale
            if err <= 1.0:
                t_new = t_end_step
                if on_output is not None:
                    while out_idx < t_out.size and (t_out[out_idx] - t_new) * direction <= 1e-15 * max(1.0, abs(t_new)):
                        if abs(t_out[out_idx] - t_new) <= 1e-15 * max(1.0, abs(t_new)):
                            on_output(out_idx, float(t_out[out_idx]), y_new)
                        else:
                            theta = (t_out[out_idx] - t) / hs
                            on_output(out_idx, float(t_out[out_idx]), _dense(y, hs, ks, theta))
                        out_idx += 1
                y, t, k1 = y_new, t_new, ks[6]
                stats.accepted += 1
                factor = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * err ** -0.2))
                if landing and step < h:
                    # a short landing step says nothing about the natural step size
                    h = max(h, step * factor)
                else:
                    h = step * factor
            else:
                stats.rejected += 1
                h = step * max(0.2, 0.9 * err ** -0.2)
        # derivative may jump at a breakpoint
        k1 = rhs(_inside(t, t, t + direction * max(abs(t), 1e-9)), y)
        stats.rhs_calls += 1
    return y, stats


def _dense(y, hs, ks, theta):
    powers = theta ** np.arange(1, 5)
    coeffs = _P @ powers
    return _combine(y, hs, coeffs, ks)


def _inside(tau, a, b):
    """Clamp a stage time into the open step (a, b) so pulse edges are seen one-sided."""
    lo, hi = (a, b) if a < b else (b, a)
    return min(max(tau, np.nextafter(lo, np.inf)), np.nextafter(hi, -np.inf))


def _integrate_rk4(rhs, y, t_out, stops, dt, direction, on_output, stats):
    t = float(t_out[0])
    nodes = sorted(set(float(x) for x in t_out[1:]) | set(stops), reverse=direction < 0)
    out_lookup = {float(x): i for i, x in enumerate(t_out)}
    for node in nodes:
        gap = abs(node - t)
        n_sub = max(1, int(np.ceil(gap / dt - 1e-9)))
        h = direction * gap / n_sub
        for i in range(n_sub):
            t1 = node if i == n_sub - 1 else t + h
            k1 = rhs(_inside(t, t, t1), y)
            k2 = rhs(t + h / 2, y + (h / 2) * k1)
            k3 = rhs(t + h / 2, y + (h / 2) * k2)
            k4 = rhs(_inside(t1, t, t1), y + h * k3)
            y = y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4)
            t = t1
            stats.rhs_calls += 4
            stats.accepted += 1
        t = node
        if on_output is not None and node in out_lookup:
            on_output(out_lookup[node], node, y)
    return y, stats
