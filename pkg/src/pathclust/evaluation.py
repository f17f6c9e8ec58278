"""Cluster labels from change points, AMI scoring, synthetic data, k-means."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Union

import numpy as np
from scipy.spatial.distance import cdist
from scipy.special import gammaln

from .changepoint import ChangePointSet
from .dataset import DataMatrix
from .geometry import HamiltonianPath


class EvaluationError(ValueError):
    pass


@dataclass(frozen=True)
class ClusterLabeling:
    """Integer cluster ids ``0..k-1`` per sample, in original row order."""

    labels: np.ndarray

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1 or labels.size == 0:
            raise EvaluationError("labels must be a non-empty 1-D array")
        if not np.issubdtype(labels.dtype, np.integer):
            raise EvaluationError(f"labels must be integers, got {labels.dtype}")
        used = np.unique(labels)
        if used[0] != 0 or used[-1] != used.size - 1:
            raise EvaluationError("cluster ids must be 0..k-1 with every id used")
        labels = labels.astype(np.int64)
        labels.setflags(write=False)
        object.__setattr__(self, "labels", labels)

    @property
    def k(self) -> int:
        return int(self.labels.max()) + 1

    def __len__(self) -> int:
        return self.labels.size

    @classmethod
    def from_values(cls, values: Iterable) -> "ClusterLabeling":
        """Relabel arbitrary hashable values by order of first appearance."""
        ids: dict = {}
        return cls(np.array([ids.setdefault(v, len(ids)) for v in values], dtype=np.int64))

    def to_json(self) -> str:
        return json.dumps({"k": self.k, "labels": self.labels.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "ClusterLabeling":
        return cls(np.array(json.loads(text)["labels"], dtype=np.int64))


def labels_from_changepoints(
    path: HamiltonianPath, cps: Union[ChangePointSet, Iterable[int]]
) -> ClusterLabeling:
    """Cut the path at each change point and label the pieces in visit order.

    A change point ``t`` starts a new cluster at visit index ``t``, i.e. the
    point reached through gap ``t - 1``. Labels are returned in the original
    row order.
    """
    positions = list(cps.positions if isinstance(cps, ChangePointSet) else cps)
    p = path.size
    if any(b <= a for a, b in zip(positions, positions[1:])):
        raise EvaluationError(f"change points must be strictly increasing: {positions}")
    if positions and (positions[0] < 1 or positions[-1] > p - 1):
        raise EvaluationError(f"change points must lie in [1, {p - 1}]: {positions}")
    visit_ids = np.searchsorted(np.asarray(positions, dtype=np.int64), np.arange(p), side="right")
    labels = np.empty(p, dtype=np.int64)
    labels[np.asarray(path.order)] = visit_ids
    return ClusterLabeling(labels)


@dataclass(frozen=True)
class AmiReport:
    ami: float
    mi: float
    expected_mi: float
    entropy_a: float
    entropy_b: float
    contingency: tuple

    def to_dict(self) -> dict:
        return {
            "ami": self.ami,
            "mi": self.mi,
            "expected_mi": self.expected_mi,
            "entropy_a": self.entropy_a,
            "entropy_b": self.entropy_b,
            "contingency": [list(r) for r in self.contingency],
        }


def contingency_table(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    ua, ia = np.unique(a, return_inverse=True)
    ub, ib = np.unique(b, return_inverse=True)
    table = np.zeros((ua.size, ub.size), dtype=np.int64)
    np.add.at(table, (ia, ib), 1)
    return table


def _entropy(counts: np.ndarray, n: int) -> float:
    p = counts[counts > 0] / n
    # abs() turns the -0.0 of a single cluster into 0.0
    return abs(float(-(p * np.log(p)).sum()))


def expected_mutual_information(table: np.ndarray) -> float:
    """Exact E[MI] of two labelings with the table's margins under random permutation.

    Sums over every feasible cell count with hypergeometric weights.
    """
    n = int(table.sum())
    a = table.sum(axis=1)
    b = table.sum(axis=0)
    gn = gammaln(n + 1)
    emi = 0.0
    for ai in a:
        for bj in b:
            lo = max(1, ai + bj - n)
            hi = min(ai, bj)
            if lo > hi:
                continue
            nij = np.arange(lo, hi + 1, dtype=float)
            log_w = (
                gammaln(ai + 1) + gammaln(bj + 1) + gammaln(n - ai + 1) + gammaln(n - bj + 1)
                - gn - gammaln(nij + 1) - gammaln(ai - nij + 1) - gammaln(bj - nij + 1)
                - gammaln(n - ai - bj + nij + 1)
            )
            term = nij / n * (np.log(n * nij) - np.log(float(ai) * float(bj)))
            emi += float((term * np.exp(log_w)).sum())
    return emi


def ami_score(
    a: Union[ClusterLabeling, Iterable], b: Union[ClusterLabeling, Iterable]
) -> AmiReport:
    """Adjusted mutual information with arithmetic-mean normalisation.

    Labelings identical up to renaming score exactly 1. If exactly one side
    has a single cluster the score is 0.
    """
    la = np.asarray(a.labels if isinstance(a, ClusterLabeling) else list(a))
    lb = np.asarray(b.labels if isinstance(b, ClusterLabeling) else list(b))
    if la.shape != lb.shape:
        raise EvaluationError(f"labelings differ in length: {la.size} vs {lb.size}")
    n = la.size
    table = contingency_table(la, lb)
    ha = _entropy(table.sum(axis=1), n)
    hb = _entropy(table.sum(axis=0), n)
    nz = table[table > 0].astype(float)
    rows, cols = np.nonzero(table)
    outer = table.sum(axis=1)[rows].astype(float) * table.sum(axis=0)[cols]
    mi = float((nz / n * (np.log(nz * n) - np.log(outer))).sum())
    mi = max(mi, 0.0)
    cont = tuple(tuple(int(v) for v in r) for r in table)

    same_partition = (np.count_nonzero(table, axis=0) == 1).all() and (
        np.count_nonzero(table, axis=1) == 1
    ).all()
    if same_partition:
        return AmiReport(1.0, mi, mi if ha == 0 else expected_mutual_information(table), ha, hb, cont)
    if ha == 0 or hb == 0:
        return AmiReport(0.0, mi, 0.0, ha, hb, cont)
    emi = expected_mutual_information(table)
    denom = (ha + hb) / 2 - emi
    if abs(denom) < np.finfo(float).eps:
        denom = np.copysign(np.finfo(float).eps, denom)
    return AmiReport(float((mi - emi) / denom), mi, emi, ha, hb, cont)


def _simplex_vertices(clusters: int, dims: int, separation: float, rng) -> np.ndarray:
    """``clusters`` points with every pairwise distance equal to ``separation``."""
    verts = np.eye(clusters) * (separation / np.sqrt(2.0))
    verts -= verts.mean(axis=0)
    # Coordinates inside the (clusters - 1)-dimensional affine hull.
    u, s, _ = np.linalg.svd(verts, full_matrices=False)
    coords = (u * s)[:, : clusters - 1]
    basis, _ = np.linalg.qr(rng.normal(size=(dims, clusters - 1)))
    return coords @ basis.T


def _box_centers(clusters, dims, separation, box, rng, max_tries):
    for _ in range(max_tries):
        centers = rng.uniform(-box, box, size=(clusters, dims))
        d = cdist(centers, centers)
        np.fill_diagonal(d, np.inf)
        if d.min() >= separation:
            return centers
    raise EvaluationError(
        f"could not place {clusters} centers {separation} apart in a +-{box} box "
        f"in {dims} dimensions after {max_tries} tries"
    )


def generate_mgd(
    p: int = 3000,
    k: int = 60,
    clusters: int = 4,
    separation: float = 10.0,
    seed: int = 0,
    layout: str = "box",
    box: float = 10.0,
    max_tries: int = 1000,
) -> DataMatrix:
    """Isotropic unit-variance Gaussian blobs with well separated centers.

    ``layout="box"`` draws centers uniformly from ``[-box, box]^k`` and
    redraws until every pair is at least ``separation`` apart.
    ``layout="simplex"`` puts them on a randomly rotated regular simplex so
    every pair is exactly ``separation`` apart (needs ``clusters <= k + 1``).
    Class sizes differ by at most one and rows are shuffled.
    """
    if clusters < 2:
        raise EvaluationError("need at least 2 clusters")
    if p < clusters:
        raise EvaluationError("need at least one sample per cluster")
    rng = np.random.default_rng(seed)
    if layout == "box":
        centers = _box_centers(clusters, k, separation, box, rng, max_tries)
    elif layout == "simplex":
        if clusters - 1 > k:
            raise EvaluationError(f"a regular simplex of {clusters} vertices needs k >= {clusters - 1}")
        centers = _simplex_vertices(clusters, k, separation, rng)
    else:
        raise EvaluationError(f"unknown layout {layout!r}")
    sizes = np.full(clusters, p // clusters)
    sizes[: p % clusters] += 1
    truth = np.repeat(np.arange(clusters), sizes)
    x = centers[truth] + rng.normal(size=(p, k))
    perm = rng.permutation(p)
    return DataMatrix(x[perm], tuple(int(t) for t in truth[perm]))


def _blobs(rng, n, centers, std):
    centers = np.asarray(centers, dtype=float)
    std = np.broadcast_to(np.asarray(std, dtype=float), (len(centers),))
    sizes = np.full(len(centers), n // len(centers))
    sizes[: n % len(centers)] += 1
    truth = np.repeat(np.arange(len(centers)), sizes)
    x = centers[truth] + rng.normal(size=(n, centers.shape[1])) * std[truth, None]
    return x, truth


def generate_2d(name: str, n: int = 1500, seed: int = 0) -> DataMatrix:
    """The five classic 2-D clustering benchmarks.

    ``noisy_circles`` (two concentric rings, radius ratio 0.5),
    ``noisy_moons`` (two interleaved half circles), ``blobs`` (three
    isotropic blobs), ``aniso`` (the blobs under a shear) and ``varied``
    (blobs with standard deviations 1, 2.5 and 0.5). Noise level 0.05 for the
    first two.
    """
    rng = np.random.default_rng(seed)
    if name == "noisy_circles":
        outer = n // 2
        ang = rng.uniform(0, 2 * np.pi, n)
        radius = np.where(np.arange(n) < outer, 1.0, 0.5)
        x = np.c_[np.cos(ang), np.sin(ang)] * radius[:, None] + rng.normal(0, 0.05, (n, 2))
        truth = (np.arange(n) >= outer).astype(int)
    elif name == "noisy_moons":
        top = n // 2
        ang = rng.uniform(0, np.pi, n)
        upper = np.arange(n) < top
        x = np.where(
            upper[:, None],
            np.c_[np.cos(ang), np.sin(ang)],
            np.c_[1 - np.cos(ang), 0.5 - np.sin(ang)],
        ) + rng.normal(0, 0.05, (n, 2))
        truth = (~upper).astype(int)
    elif name in ("blobs", "aniso"):
        x, truth = _blobs(rng, n, [[-5.0, -5.0], [0.0, 5.0], [5.0, -2.0]], 1.0)
        if name == "aniso":
            x = x @ np.array([[0.6, -0.6], [-0.4, 0.8]])
    elif name == "varied":
        x, truth = _blobs(rng, n, [[-5.0, -5.0], [0.0, 5.0], [5.0, -2.0]], [1.0, 2.5, 0.5])
    else:
        raise EvaluationError(f"unknown 2-D dataset {name!r}")
    perm = rng.permutation(n)
    return DataMatrix(x[perm], tuple(int(t) for t in truth[perm]))


@dataclass(frozen=True)
class KMeansResult:
    labeling: ClusterLabeling
    centers: np.ndarray
    inertia: float
    n_iter: int


def _kmeans_pp(x: np.ndarray, k: int, rng) -> np.ndarray:
    centers = np.empty((k, x.shape[1]))
    centers[0] = x[rng.integers(x.shape[0])]
    closest = cdist(x, centers[:1], "sqeuclidean")[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(x.shape[0], p=closest / total))
        else:
            idx = int(rng.integers(x.shape[0]))
        centers[c] = x[idx]
        np.minimum(closest, cdist(x, centers[c : c + 1], "sqeuclidean")[:, 0], out=closest)
    return centers


def _lloyd(x: np.ndarray, centers: np.ndarray, max_iter: int):
    k = centers.shape[0]
    labels = None
    inertia_prev = np.inf
    for it in range(1, max_iter + 1):
        d = cdist(x, centers, "sqeuclidean")
        new = np.argmin(d, axis=1)
        inertia = float(d[np.arange(x.shape[0]), new].sum())
        assert inertia <= inertia_prev * (1 + 1e-9) + 1e-12, "k-means inertia increased"
        # Refill empty clusters with the points worst served by their center.
        counts = np.bincount(new, minlength=k)
        if (counts == 0).any():
            far = np.argsort(-d[np.arange(x.shape[0]), new], kind="stable")
            taken = 0
            for c in np.flatnonzero(counts == 0):
                while counts[new[far[taken]]] <= 1:
                    taken += 1
                counts[new[far[taken]]] -= 1
                new[far[taken]] = c
                counts[c] = 1
                taken += 1
        if labels is not None and np.array_equal(new, labels):
            break
        labels = new
        for c in range(k):
            centers[c] = x[labels == c].mean(axis=0)
        inertia_prev = float(((x - centers[labels]) ** 2).sum())
    final = float(((x - centers[labels]) ** 2).sum())
    return labels, centers, final, it


def kmeans(x, k: int, seed: int = 0, restarts: int = 10, max_iter: int = 300) -> KMeansResult:
    """Lloyd's algorithm from k-means++ seeds; keeps the lowest-inertia restart."""
    x = x.values if isinstance(x, DataMatrix) else np.asarray(x, dtype=float)
    if k < 1:
        raise EvaluationError(f"k must be >= 1, got {k}")
    if k > x.shape[0]:
        raise EvaluationError(f"k={k} exceeds the {x.shape[0]} samples")
    best: Optional[KMeansResult] = None
    for child in np.random.SeedSequence(seed).spawn(max(restarts, 1)):
        rng = np.random.default_rng(child)
        labels, centers, inertia, it = _lloyd(x, _kmeans_pp(x, k, rng), max_iter)
        if best is None or inertia < best.inertia:
            best = KMeansResult(ClusterLabeling(labels), centers, inertia, it)
    return best


def kmeans_baseline(data, k: int, seed: int = 0, restarts: int = 10) -> ClusterLabeling:
    return kmeans(data, k, seed, restarts).labeling
