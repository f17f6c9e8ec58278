"""Single change point posterior for a two-regime linear trend model.

Each side of a candidate split ``theta`` gets its own intercept and slope:

    y[t] = a0 + b0 * t + noise   for t <  theta
    y[t] = a1 + b1 * t + noise   for t >= theta

With a flat prior on the four coefficients, a Jeffreys prior on the noise
scale and a uniform prior on ``theta``, integrating the coefficients and the
noise out gives

    p(theta | y)  ~  det(H'H) ** -1/2  *  R2(theta) ** (-(N - 4) / 2)

where ``H`` is the design matrix and ``R2`` the residual sum of squares of
the least-squares fit. The sides are disjoint, so ``H'H`` is block diagonal
and ``det(H'H)`` factors into ``m * Stt`` per side (``m`` samples, ``Stt``
centred sum of squared times).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .segment import _SegmentCost
from .types import ChangePointError, ChangePointSet, as_sequence

N_COEF = 4
# Sides of 2-4 samples fit noise almost exactly and attract spurious mass at
# the sequence ends; 5 keeps white-noise false alarms well under 10%.
DEFAULT_MIN_SIZE = 5
# Residuals are floored at this fraction of the total sum of squares so a
# noise-free fit does not produce log(0).
RESIDUAL_FLOOR = 1e-12


@dataclass(frozen=True)
class Posterior:
    """Posterior over the change position plus the peaks above ``floor``."""

    curve: np.ndarray
    changepoints: ChangePointSet

    @property
    def argmax(self) -> int:
        return int(np.argmax(self.curve))


def _centred_tt(m: np.ndarray) -> np.ndarray:
    # sum((t - mean t)^2) for m consecutive integers
    return m * (m * m - 1) / 12.0


def log_evidence(seq, min_size: int = DEFAULT_MIN_SIZE) -> np.ndarray:
    """Unnormalised log posterior for every split; ``-inf`` where not allowed.

    ``min_size`` is the fewest samples allowed on each side. It is clipped
    to ``N // 2`` for short sequences but never below 2, the number of
    coefficients per side.
    """
    x = as_sequence(seq)
    n = x.size
    if n < 4:
        raise ChangePointError(f"need at least 4 samples, got {n}")
    min_size = max(2, min(int(min_size), n // 2))
    thetas = np.arange(min_size, n - min_size + 1)
    cost = _SegmentCost(x, "linear")
    r2 = cost(0, thetas) + cost(thetas, n)
    sst = float(((x - x.mean()) ** 2).sum())
    floor = RESIDUAL_FLOOR * sst if sst > 0 else 1.0
    r2 = np.maximum(r2, floor)
    m_left = thetas.astype(float)
    m_right = n - m_left
    log_det = np.log(m_left * _centred_tt(m_left)) + np.log(m_right * _centred_tt(m_right))
    out = np.full(n, -np.inf)
    out[thetas] = -0.5 * log_det - 0.5 * (n - N_COEF) * np.log(r2)
    return out


def local_maxima(curve: np.ndarray) -> list:
    """Indices of strict local maxima; a flat-topped peak reports its leftmost index."""
    peaks = []
    n = curve.size
    i = 0
    while i < n:
        j = i
        while j + 1 < n and curve[j + 1] == curve[i]:
            j += 1
        left_ok = i == 0 or curve[i - 1] < curve[i]
        right_ok = j == n - 1 or curve[j + 1] < curve[i]
        if left_ok and right_ok:
            peaks.append(i)
        i = j + 1
    return peaks


def bcd_posterior(seq, floor: float = 0.5, min_size: int = DEFAULT_MIN_SIZE) -> Posterior:
    """Posterior probability that the single change point sits at each index.

    ``curve[t]`` is the probability that the second regime starts at ``t``;
    it sums to one. The change point set holds the local maxima of the curve
    whose probability exceeds ``floor``.
    """
    logp = log_evidence(seq, min_size)
    curve = np.exp(logp - logsumexp(logp))
    n = curve.size
    peaks = [i for i in local_maxima(curve) if curve[i] > floor and 1 <= i <= n - 1]
    cps = ChangePointSet(
        "bcd", peaks, [float(curve[i]) for i in peaks], n,
        {"floor": floor, "min_size": min_size},
    )
    return Posterior(curve, cps)


def bcd_segment(
    seq, floor: float = 0.5, min_size: int = DEFAULT_MIN_SIZE, min_segment: int = 20
) -> ChangePointSet:
    """Recursive bisection with the single change point posterior.

    The posterior is computed on the whole sequence; if its maximum exceeds
    ``floor`` the sequence is split there and both halves are searched again.
    Halves shorter than ``min_segment`` are not searched. Scores are the
    posterior probabilities found in the window where each split was made.
    """
    x = as_sequence(seq)
    n = x.size
    found = {}
    stack = [(0, n)]
    while stack:
        a, b = stack.pop()
        if b - a < max(min_segment, 4):
            continue
        post = bcd_posterior(x[a:b], floor, min_size)
        t = post.argmax
        if post.curve[t] <= floor:
            continue
        found[a + t] = float(post.curve[t])
        stack.append((a, a + t))
        stack.append((a + t, b))
    positions = sorted(p for p in found if 1 <= p <= n - 1)
    return ChangePointSet(
        "bcd", positions, [found[p] for p in positions], n,
        {"floor": floor, "min_size": min_size, "min_segment": min_segment},
    )
