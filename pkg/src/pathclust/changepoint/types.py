from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Optional

import numpy as np


class ChangePointError(ValueError):
    pass


def as_sequence(values, min_length: int = 2) -> np.ndarray:
    """Validate a gap sequence: 1-D, finite, at least ``min_length`` long."""
    x = np.asarray(values, dtype=float)
    if x.ndim != 1:
        raise ChangePointError(f"sequence must be 1-D, got shape {x.shape}")
    if x.size < min_length:
        raise ChangePointError(f"sequence needs at least {min_length} values, got {x.size}")
    if not np.all(np.isfinite(x)):
        raise ChangePointError("sequence contains non-finite values")
    return x


@dataclass(frozen=True)
class Segmentation:
    """Contiguous segments of a sequence.

    ``breakpoints`` are the start indices of every segment after the first, so
    segment ``i`` covers ``[bounds[i], bounds[i+1])`` with ``bounds =
    (0, *breakpoints, N)``. ``params`` holds per-segment least-squares
    coefficients, highest power first (``(mean,)`` or ``(slope, intercept)``).
    """

    breakpoints: tuple
    n: int
    model: str
    params: tuple
    loss: float
    score: float

    @property
    def k(self) -> int:
        return len(self.breakpoints) + 1

    @property
    def bounds(self) -> tuple:
        return (0, *self.breakpoints, self.n)


@dataclass(frozen=True)
class ChangePointSet:
    """Detected change points of a sequence.

    A position ``t`` means a new regime starts at sequence index ``t``.
    ``directions`` is only filled by the CUSUM detectors (``"upper"`` or
    ``"lower"`` per position).
    """

    detector: str
    positions: tuple
    scores: tuple
    n: int
    params: dict = field(default_factory=dict)
    directions: Optional[tuple] = None

    def __post_init__(self):
        pos = tuple(int(p) for p in self.positions)
        if any(b <= a for a, b in zip(pos, pos[1:])):
            raise ChangePointError(f"positions must be strictly increasing: {pos}")
        if pos and (pos[0] < 1 or pos[-1] > self.n - 1):
            raise ChangePointError(f"positions must lie in [1, {self.n - 1}]: {pos}")
        scores = tuple(float(s) for s in self.scores)
        if len(scores) != len(pos):
            raise ChangePointError("one score per position required")
        if not all(np.isfinite(scores)):
            raise ChangePointError("scores must be finite")
        if self.directions is not None and len(self.directions) != len(pos):
            raise ChangePointError("one direction per position required")
        object.__setattr__(self, "positions", pos)
        object.__setattr__(self, "scores", scores)
        if self.directions is not None:
            object.__setattr__(self, "directions", tuple(self.directions))

    def __len__(self) -> int:
        return len(self.positions)

    def subset(self, keep) -> "ChangePointSet":
        keep = list(keep)
        return ChangePointSet(
            self.detector,
            [self.positions[i] for i in keep],
            [self.scores[i] for i in keep],
            self.n,
            dict(self.params),
            None if self.directions is None else [self.directions[i] for i in keep],
        )

    def to_dict(self) -> dict:
        out = {
            "detector": self.detector,
            "positions": list(self.positions),
            "scores": list(self.scores),
            "params": self.params,
            "n": self.n,
        }
        if self.directions is not None:
            out["directions"] = list(self.directions)
        return out

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, obj: dict) -> "ChangePointSet":
        return cls(
            obj["detector"],
            obj["positions"],
            obj["scores"],
            int(obj["n"]),
            dict(obj.get("params", {})),
            obj.get("directions"),
        )

    @classmethod
    def from_json(cls, text: str) -> "ChangePointSet":
        return cls.from_dict(json.loads(text))
