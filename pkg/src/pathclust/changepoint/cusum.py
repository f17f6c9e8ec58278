"""Tabular two-sided CUSUM detectors and alarm thinning."""

from __future__ import annotations

import numpy as np

from .types import ChangePointError, ChangePointSet, as_sequence


def cusum_a(seq, threshold: float, accuracy: float) -> ChangePointSet:
    """Two-sided CUSUM around the running mean of the current regime.

    The reference level is the mean of the samples seen since the last alarm
    (the current sample included). An alarm at index ``t`` reports position
    ``t`` and restarts both statistics and the mean at ``t``. ``accuracy`` is
    the slack subtracted at each step; ``threshold`` the alarm level.
    """
    x = as_sequence(seq)
    if threshold <= 0:
        raise ChangePointError("threshold must be positive")
    if accuracy < 0:
        raise ChangePointError("accuracy must be non-negative")
    s_hi = s_lo = 0.0
    total = 0.0
    count = 0
    positions, scores, directions = [], [], []
    for t in range(x.size):
        total += x[t]
        count += 1
        dev = x[t] - total / count
        s_hi = max(0.0, s_hi + dev - accuracy)
        s_lo = max(0.0, s_lo - dev - accuracy)
        if s_hi > threshold or s_lo > threshold:
            up = s_hi >= s_lo
            positions.append(t)
            scores.append(s_hi if up else s_lo)
            directions.append("upper" if up else "lower")
            s_hi = s_lo = 0.0
            total = x[t]
            count = 1
    return ChangePointSet(
        "cusum-a", positions, scores, x.size,
        {"threshold": threshold, "accuracy": accuracy}, directions,
    )


def cusum_b(seq, threshold: float, drift: float) -> ChangePointSet:
    """Two-sided CUSUM on first differences with a fixed drift allowance.

    Sample ``t`` contributes ``x[t] - x[t-1]``; an alarm there reports
    position ``t`` and resets both statistics.
    """
    x = as_sequence(seq)
    if threshold <= 0:
        raise ChangePointError("threshold must be positive")
    d = np.diff(x)
    s_hi = s_lo = 0.0
    positions, scores, directions = [], [], []
    for i, step in enumerate(d):
        s_hi = max(0.0, s_hi + step - drift)
        s_lo = max(0.0, s_lo - step - drift)
        if s_hi > threshold or s_lo > threshold:
            up = s_hi >= s_lo
            positions.append(i + 1)
            scores.append(s_hi if up else s_lo)
            directions.append("upper" if up else "lower")
            s_hi = s_lo = 0.0
    return ChangePointSet(
        "cusum-b", positions, scores, x.size,
        {"threshold": threshold, "drift": drift}, directions,
    )


def filter_changepoints(cps: ChangePointSet, min_gap: int) -> ChangePointSet:
    """Drop change points closer than ``min_gap`` to the last one kept.

    Sweeps left to right keeping the first point; a later point survives only
    if it lies more than ``min_gap`` positions after the previously kept one.
    """
    if min_gap < 0:
        raise ChangePointError("min_gap must be non-negative")
    keep = []
    last = None
    for i, pos in enumerate(cps.positions):
        if last is None or pos - last > min_gap:
            keep.append(i)
            last = pos
    out = cps.subset(keep)
    return ChangePointSet(
        out.detector, out.positions, out.scores, out.n,
        {**out.params, "min_gap": min_gap}, out.directions,
    )


def select_direction(cps: ChangePointSet, direction: str) -> ChangePointSet:
    """Keep only ``"upper"`` or ``"lower"`` alarms; ``"both"`` is a no-op."""
    if direction == "both" or cps.directions is None:
        return cps
    if direction not in ("upper", "lower"):
        raise ChangePointError(f"unknown direction {direction!r}")
    return cps.subset(i for i, d in enumerate(cps.directions) if d == direction)
