"""Exact dynamic-programming segmentation.

``segment_optimal`` picks both the number of segments and their bounds by
minimising ``J = L / SST + k / N`` where ``L`` is the total least-squares
residual of the per-segment fits and ``SST`` the total sum of squares about
the global mean (``J = k / N`` for a constant sequence). ``jenks_breaks`` is
the fixed-``k`` constant-mean case (Fisher's optimal partition of an ordered
sequence).
"""

from __future__ import annotations

import numpy as np

from .types import ChangePointError, ChangePointSet, Segmentation, as_sequence

MODELS = ("constant", "linear")


class _SegmentCost:
    """O(1) residual sum of squares for any ``x[i:j]`` from prefix sums."""

    def __init__(self, x: np.ndarray, model: str):
        if model not in MODELS:
            raise ChangePointError(f"unknown model {model!r}; choose from {MODELS}")
        self.model = model
        n = x.size
        # Centring keeps the prefix sums small and the subtractions accurate.
        xc = x - x.mean()
        t = np.arange(n, dtype=float) - (n - 1) / 2.0

        def prefix(v):
            out = np.zeros(n + 1)
            np.cumsum(v, out=out[1:])
            return out

        self.s1 = prefix(np.ones(n))
        self.sx = prefix(xc)
        self.sxx = prefix(xc * xc)
        if model == "linear":
            self.st = prefix(t)
            self.stt = prefix(t * t)
            self.stx = prefix(t * xc)

    def __call__(self, i, j):
        """Cost of segments ``[i, j)``; ``i`` and ``j`` broadcast."""
        m = self.s1[j] - self.s1[i]
        sx = self.sx[j] - self.sx[i]
        cxx = (self.sxx[j] - self.sxx[i]) - sx * sx / m
        if self.model == "linear":
            st = self.st[j] - self.st[i]
            ctt = (self.stt[j] - self.stt[i]) - st * st / m
            ctx = (self.stx[j] - self.stx[i]) - st * sx / m
            with np.errstate(divide="ignore", invalid="ignore"):
                explained = np.where(ctt > 0, ctx * ctx / np.where(ctt > 0, ctt, 1.0), 0.0)
            cxx = cxx - explained
        return np.maximum(cxx, 0.0)


def _dp(cost: _SegmentCost, n: int, max_k: int):
    """Best cost and backpointers for every (segment count, prefix length).

    ``best[k, j]`` is the minimal cost of splitting ``x[:j]`` into ``k``
    segments; ties resolve to the smallest last breakpoint.
    """
    best = np.full((max_k + 1, n + 1), np.inf)
    back = np.zeros((max_k + 1, n + 1), dtype=np.int64)
    ends = np.arange(n + 1)
    best[1, 1:] = cost(0, ends[1:])
    for j in range(2, n + 1):
        starts = np.arange(1, j)
        seg = cost(starts, j)
        for k in range(2, min(max_k, j) + 1):
            total = best[k - 1, starts] + seg
            i = int(np.argmin(total))
            best[k, j] = total[i]
            back[k, j] = starts[i]
    return best, back


def _trace(back: np.ndarray, k: int, n: int) -> tuple:
    bps = []
    j = n
    for kk in range(k, 1, -1):
        j = int(back[kk, j])
        bps.append(j)
    return tuple(reversed(bps))


def fit_segments(x: np.ndarray, breakpoints, model: str):
    """Least-squares fit of each segment; returns (params, residual sum)."""
    bounds = (0, *breakpoints, x.size)
    params = []
    loss = 0.0
    for a, b in zip(bounds, bounds[1:]):
        seg = x[a:b]
        if model == "constant" or seg.size == 1:
            mu = seg.mean()
            fitted = np.full(seg.size, mu)
            params.append((0.0, float(mu)) if model == "linear" else (float(mu),))
        else:
            t = np.arange(a, b, dtype=float)
            coef = np.polyfit(t, seg, 1)
            fitted = np.polyval(coef, t)
            params.append((float(coef[0]), float(coef[1])))
        loss += float(((seg - fitted) ** 2).sum())
    return tuple(params), loss


def penalized_score(loss: float, k: int, sst: float, n: int) -> float:
    if sst > 0:
        return loss / sst + k / n
    return k / n


def segment_optimal(seq, max_k: int, model: str = "constant") -> Segmentation:
    """Segmentation minimising ``L / SST + k / N`` over ``k`` in ``[1, max_k]``.

    Ties in the score go to the smaller ``k``.
    """
    x = as_sequence(seq)
    n = x.size
    if max_k < 1:
        raise ChangePointError(f"max_k must be >= 1, got {max_k}")
    if max_k > n:
        raise ChangePointError(f"max_k={max_k} exceeds sequence length {n}")
    sst = float(((x - x.mean()) ** 2).sum())
    if sst == 0:
        params, loss = fit_segments(x, (), model)
        return Segmentation((), n, model, params, loss, penalized_score(loss, 1, sst, n))

    cost = _SegmentCost(x, model)
    best, back = _dp(cost, n, max_k)
    scores = [penalized_score(best[k, n], k, sst, n) for k in range(1, max_k + 1)]
    k = int(np.argmin(scores)) + 1
    bps = _trace(back, k, n)
    params, loss = fit_segments(x, bps, model)
    return Segmentation(bps, n, model, params, loss, penalized_score(loss, k, sst, n))


def jenks_breaks(seq, k: int) -> ChangePointSet:
    """Optimal ``k``-class partition of the ordered sequence.

    Each break is scored by how much the within-class sum of squares would
    grow if that break alone were removed.
    """
    x = as_sequence(seq, min_length=1)
    n = x.size
    if k < 1:
        raise ChangePointError(f"k must be >= 1, got {k}")
    if k > n:
        raise ChangePointError(f"k={k} exceeds sequence length {n}")
    if k == 1:
        return ChangePointSet("jenks", (), (), n, {"k": k})
    cost = _SegmentCost(x, "constant")
    _, back = _dp(cost, n, k)
    bps = _trace(back, k, n)
    bounds = (0, *bps, n)
    scores = [
        float(cost(bounds[i - 1], bounds[i + 1]) - cost(bounds[i - 1], bounds[i]) - cost(bounds[i], bounds[i + 1]))
        for i in range(1, k)
    ]
    return ChangePointSet("jenks", bps, [max(s, 0.0) for s in scores], n, {"k": k})


def within_class_ss(seq, breakpoints) -> float:
    x = np.asarray(seq, dtype=float)
    return fit_segments(x, tuple(breakpoints), "constant")[1]
