"""Distance geometry and the greedy nearest-neighbour Hamiltonian path.

The path starts at the densest sample (smallest distance row sum) and then
repeatedly steps to the closest sample not visited yet. The distances between
consecutive samples along the path form the gap sequence that the change-point
detectors segment.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np
from scipy.spatial.distance import cdist

from .dataset import DataMatrix

# Above this many samples the pipeline walks without storing a p x p matrix.
STREAMING_THRESHOLD = 20_000
# Row sums this close (relative) count as tied when choosing the start, so
# round-off in the Gram route cannot break a mathematical tie.
START_TIE_RTOL = 1e-9


def _as_array(data: Union[DataMatrix, np.ndarray]) -> np.ndarray:
    if isinstance(data, DataMatrix):
        return data.values
    return np.asarray(data, dtype=float)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric matrix of Euclidean distances with a zero diagonal."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise ValueError(f"distance matrix must be square, got {d.shape}")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)

    @property
    def size(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class HamiltonianPath:
    start: int
    order: tuple
    gaps: np.ndarray

    @property
    def size(self) -> int:
        return len(self.order)

    def to_json(self) -> str:
        return json.dumps(
            {"start": self.start, "order": list(self.order), "gaps": [float(g) for g in self.gaps]}
        )

    @classmethod
    def from_json(cls, text: str) -> "HamiltonianPath":
        obj = json.loads(text)
        return cls(int(obj["start"]), tuple(int(i) for i in obj["order"]), np.array(obj["gaps"], dtype=float))


def gram_matrix(data: Union[DataMatrix, np.ndarray]) -> np.ndarray:
    """Inner products of every pair of rows."""
    x = _as_array(data)
    g = x @ x.T
    # BLAS may leave the two triangles a few ulps apart.
    return (g + g.T) / 2


def distance_matrix(gram: np.ndarray) -> DistanceMatrix:
    """Euclidean distances from a Gram matrix via ``diag(G)1' - 2G + 1diag(G)'``."""
    g = np.asarray(gram, dtype=float)
    diag = np.diag(g)
    sq = diag[:, None] - 2.0 * g + diag[None, :]
    np.maximum(sq, 0.0, out=sq)
    # (a - 2g) + b and (b - 2g) + a round differently; mirror one triangle.
    sq = np.triu(sq, 1)
    sq = sq + sq.T
    return DistanceMatrix(np.sqrt(sq))


def _lowest_sum(sums: np.ndarray) -> int:
    best = sums.min()
    return int(np.flatnonzero(sums <= best + START_TIE_RTOL * abs(best))[0])


def select_start(dist: DistanceMatrix) -> int:
    """Index of the row with the smallest distance sum; lowest index on ties."""
    return _lowest_sum(dist.d.sum(axis=1))


def _distances_from(x: np.ndarray, i: int) -> np.ndarray:
    # cdist evaluates each pair independently, so a single row here is
    # bit-identical to the same row of the full matrix.
    return cdist(x[i : i + 1], x)[0]


def pairwise_distances(data: Union[DataMatrix, np.ndarray]) -> DistanceMatrix:
    """Distances computed directly from coordinate differences, row by row.

    Unlike the Gram route this has no cancellation error for nearby points,
    which matters when the greedy walk compares two close candidates.
    """
    x = _as_array(data)
    return DistanceMatrix(cdist(x, x))


def _walk(p: int, start: int, row_of) -> HamiltonianPath:
    if not 0 <= start < p:
        raise IndexError(f"start {start} out of range for {p} samples")
    visited = np.zeros(p, dtype=bool)
    order = np.empty(p, dtype=np.int64)
    gaps = np.empty(p - 1)
    cur = start
    visited[cur] = True
    order[0] = cur
    for step in range(1, p):
        masked = np.where(visited, np.inf, row_of(cur))
        nxt = int(np.argmin(masked))
        gaps[step - 1] = masked[nxt]
        visited[nxt] = True
        order[step] = nxt
        cur = nxt
    gaps.setflags(write=False)
    return HamiltonianPath(int(start), tuple(int(i) for i in order), gaps)


def build_path(
    data: Union[DataMatrix, np.ndarray],
    start: int,
    dist: Optional[DistanceMatrix] = None,
) -> HamiltonianPath:
    """Greedy nearest-unvisited-neighbour walk over a stored distance matrix.

    Duplicate points are visited like any other (gap 0). Ties go to the
    smallest candidate index. ``dist`` defaults to ``pairwise_distances``.
    """
    if dist is None:
        dist = pairwise_distances(data)
    d = dist.d
    return _walk(d.shape[0], start, lambda i: d[i])


def build_path_streaming(data: Union[DataMatrix, np.ndarray], start: int) -> HamiltonianPath:
    """Same walk as ``build_path`` but computes each distance row when needed.

    Memory is O(p) instead of O(p^2); the order is bit-for-bit identical.
    """
    x = _as_array(data)
    return _walk(x.shape[0], start, lambda i: _distances_from(x, i))


def discover_path(data: DataMatrix, streaming: Optional[bool] = None) -> HamiltonianPath:
    """Full path discovery: choose the start, then walk.

    Small inputs use the Gram/distance-matrix route; large ones (or
    ``streaming=True``) find the start with a streamed row-sum scan.
    """
    if streaming is None:
        streaming = data.rows > STREAMING_THRESHOLD
    if not streaming:
        start = select_start(distance_matrix(gram_matrix(data)))
        return build_path(data, start)
    x = data.values
    sums = np.array([_distances_from(x, i).sum() for i in range(x.shape[0])])
    return build_path_streaming(data, _lowest_sum(sums))
