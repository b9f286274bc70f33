"""Frequency and decay-rate extraction from sampled trajectories.

Used by the run reports and the validation suite to turn a trajectory back
into the physical numbers (precession frequency, relaxation rate) that the
inputs predict, without assuming anything about how the trajectory was
produced.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = ["fit_frequency", "fit_decay_rate"]


def _refine_crossing(times: np.ndarray, values: np.ndarray, i: int) -> float | None:
    """Zero of the signal near the sign change between samples i and i+1.

    A local cubic through the four surrounding samples keeps the bias at
    O((omega h)^4), far below the linear-interpolation error.
    """
    lo = max(0, i - 1)
    hi = min(len(times), i + 3)
    ts = times[lo:hi]
    ys = values[lo:hi]
    if len(ts) < 2:
        return None
    # local coordinates for conditioning
    t0, span = ts[0], ts[-1] - ts[0]
    if span <= 0:
        return None
    x = (ts - t0) / span
    coeffs = np.polynomial.polynomial.polyfit(x, ys, min(3, len(ts) - 1))
    roots = np.polynomial.polynomial.polyroots(coeffs)
    x_lo = (times[i] - t0) / span
    x_hi = (times[i + 1] - t0) / span
    candidates = [
        r.real for r in roots if abs(r.imag) < 1e-9 and x_lo - 1e-12 <= r.real <= x_hi + 1e-12
    ]
    if not candidates:
        # fall back to linear interpolation inside the bracket
        y0, y1 = values[i], values[i + 1]
        return times[i] - y0 * (times[i + 1] - times[i]) / (y1 - y0)
    best = min(candidates, key=lambda r: abs(r - 0.5 * (x_lo + x_hi)))
    return t0 + best * span


def fit_frequency(times, signal, min_crossings: int = 4) -> float | None:
    """Angular frequency of an oscillating real signal by zero-crossing fit.

    Locates all sign changes, refines each crossing with a local cubic, and
    linearly regresses crossing time against crossing index: consecutive
    zeros of a sinusoid are half a period apart, so omega = pi / slope.
    Amplitude decay does not shift the zeros of a damped cosine.  Returns
    None if fewer than ``min_crossings`` crossings are found.
    """
    times = np.asarray(times, dtype=float)
    signal = np.asarray(signal, dtype=float)
    if times.shape != signal.shape or times.ndim != 1:
        raise ValueError("times and signal must be equal-length 1-d arrays")
    product = signal[:-1] * signal[1:]
    crossing_idx = np.nonzero(product < 0)[0]
    crossings = []
    for i in crossing_idx:
        t = _refine_crossing(times, signal, int(i))
        if t is not None:
            crossings.append(t)
    if len(crossings) < min_crossings:
        return None
    k = np.arange(len(crossings))
    slope = np.polyfit(k, crossings, 1)[0]
    if slope <= 0:
        return None
    return math.pi / slope


def fit_decay_rate(
    times,
    values,
    rel_floor: float = 0.2,
    abs_floor: float = 0.0,
    skip_time: float = 0.0,
) -> float | None:
    """Exponential decay rate of |values| by a log-linear least-squares fit.

    Only samples with t >= skip_time (to drop initial transients) and
    |value| above max(rel_floor * initial, abs_floor) (to drop the
    noise-dominated tail) enter the fit.  Returns None if fewer than three
    samples survive.
    """
    times = np.asarray(times, dtype=float)
    mags = np.abs(np.asarray(values))
    if times.shape != mags.shape or times.ndim != 1:
        raise ValueError("times and values must be equal-length 1-d arrays")
    initial = mags[0]
    if initial <= 0:
        return None
    floor = max(rel_floor * initial, abs_floor)
    mask = (mags > floor) & (times >= skip_time)
    if np.count_nonzero(mask) < 3:
        return None
    slope = np.polyfit(times[mask], np.log(mags[mask]), 1)[0]
    return -slope
