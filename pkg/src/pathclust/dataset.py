"""Numeric dataset loading, z-score standardization and polynomial lifting."""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

DEFAULT_LIFT_CAP = 200_000


class DatasetError(ValueError):
    """Raised when input data cannot be turned into a valid DataMatrix."""


@dataclass(frozen=True)
class DataMatrix:
    """A ``p x k`` table of samples by attributes.

    ``ground_truth`` holds optional per-row class labels (any hashable values;
    the loaders produce strings). ``columns`` are attribute names.
    """

    values: np.ndarray
    ground_truth: Optional[tuple] = None
    columns: tuple = field(default=())

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.ndim != 2:
            raise DatasetError(f"expected a 2-D matrix, got shape {values.shape}")
        if values.shape[0] < 2 or values.shape[1] < 1:
            raise DatasetError(f"need at least 2 rows and 1 column, got {values.shape}")
        if not np.all(np.isfinite(values)):
            r, c = np.argwhere(~np.isfinite(values))[0]
            raise DatasetError(f"non-finite value at row {r}, column {c}")
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if self.ground_truth is not None:
            gt = tuple(self.ground_truth)
            if len(gt) != values.shape[0]:
                raise DatasetError(
                    f"ground truth has {len(gt)} labels for {values.shape[0]} rows"
                )
            object.__setattr__(self, "ground_truth", gt)
        cols = tuple(self.columns) or tuple(f"x{i}" for i in range(values.shape[1]))
        if len(cols) != values.shape[1]:
            raise DatasetError("column names do not match matrix width")
        object.__setattr__(self, "columns", cols)

    @property
    def rows(self) -> int:
        return self.values.shape[0]

    @property
    def cols(self) -> int:
        return self.values.shape[1]

    def with_values(self, values: np.ndarray, columns: Sequence[str] = ()) -> "DataMatrix":
        return DataMatrix(values, self.ground_truth, tuple(columns))

    def truth_ids(self) -> Optional[np.ndarray]:
        """Ground truth mapped to integer ids in order of first appearance."""
        if self.ground_truth is None:
            return None
        ids: dict = {}
        return np.array([ids.setdefault(g, len(ids)) for g in self.ground_truth])


def _resolve_label_column(header, label_column, width):
    if label_column is None:
        return None
    if isinstance(label_column, int) or (isinstance(label_column, str) and label_column.lstrip("-").isdigit()):
        idx = int(label_column)
        if idx < 0:
            idx += width
        if not 0 <= idx < width:
            raise DatasetError(f"label column index {label_column} out of range")
        return idx
    if header is None:
        raise DatasetError("label column given by name but the file has no header")
    try:
        return header.index(label_column)
    except ValueError:
        raise DatasetError(f"label column {label_column!r} not in header {header}") from None


def load_csv(
    path: Union[str, Path],
    label_column: Union[int, str, None] = None,
    header: Optional[bool] = None,
) -> DataMatrix:
    """Read a numeric CSV file into a DataMatrix.

    ``header=None`` sniffs: the first row is a header if any of its cells
    fails to parse as a float. ``label_column`` may be a name or an index
    (negative indices count from the end).
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if r and any(c.strip() for c in r)]
    if not rows:
        raise DatasetError(f"{path}: empty file")

    if header is None:
        header = not all(_is_float(c) for c in rows[0])
    names = [c.strip() for c in rows[0]] if header else None
    body = rows[1:] if header else rows
    if not body:
        raise DatasetError(f"{path}: no data rows")

    width = len(names) if names else len(body[0])
    for i, r in enumerate(body):
        if len(r) != width:
            line = i + (2 if header else 1)
            raise DatasetError(f"{path}: line {line} has {len(r)} fields, expected {width}")

    label_idx = _resolve_label_column(names, label_column, width)
    feature_idx = [j for j in range(width) if j != label_idx]
    values = np.empty((len(body), len(feature_idx)))
    for i, r in enumerate(body):
        for out_j, j in enumerate(feature_idx):
            try:
                values[i, out_j] = float(r[j])
            except ValueError:
                line = i + (2 if header else 1)
                col = names[j] if names else j
                raise DatasetError(
                    f"{path}: line {line}, column {col!r}: cannot parse {r[j]!r} as a number"
                ) from None
    truth = tuple(r[label_idx].strip() for r in body) if label_idx is not None else None
    columns = tuple(names[j] for j in feature_idx) if names else ()
    return DataMatrix(values, truth, columns)


def _is_float(s: str) -> bool:
    try:
        float(s)
    except ValueError:
        return False
    return True


def write_csv(data: DataMatrix, path: Union[str, Path], label_name: str = "label") -> None:
    """Write ``data`` in the dialect ``load_csv`` reads (header row, label last).

    Floats are written with ``repr`` so a reload reproduces them exactly.
    """
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        head = list(data.columns)
        if data.ground_truth is not None:
            head.append(label_name)
        w.writerow(head)
        for i, row in enumerate(data.values):
            out = [repr(float(v)) for v in row]
            if data.ground_truth is not None:
                out.append(data.ground_truth[i])
            w.writerow(out)


def standardize(data: DataMatrix) -> DataMatrix:
    """Column-wise z-score with the population standard deviation.

    Constant columns become all zeros.
    """
    x = data.values
    mean = x.mean(axis=0)
    std = x.std(axis=0)
    centered = x - mean
    scale = np.where(std > 0, std, 1.0)
    out = np.where(std > 0, centered / scale, 0.0)
    return data.with_values(out, data.columns)


def lifted_width(k: int, degree: int) -> int:
    return math.comb(k + degree, degree)


def _monomials(k: int, degree: int):
    for d in range(degree + 1):
        yield from itertools.combinations_with_replacement(range(k), d)


def polynomial_lift(data: DataMatrix, degree: int = 2, max_features: int = DEFAULT_LIFT_CAP) -> DataMatrix:
    """Explicit polynomial feature map: every monomial of total degree <= ``degree``.

    Columns come in graded lexicographic order starting with the constant
    term, e.g. ``(1, a, b, a^2, ab, b^2)`` for two inputs and degree 2.
    """
    if degree < 1:
        raise DatasetError(f"lift degree must be >= 1, got {degree}")
    width = lifted_width(data.cols, degree)
    if width > max_features:
        raise DatasetError(
            f"degree-{degree} lift of {data.cols} columns gives {width} features "
            f"(cap {max_features})"
        )
    x = data.values
    out = np.empty((data.rows, width))
    names = []
    for j, mono in enumerate(_monomials(data.cols, degree)):
        col = np.ones(data.rows)
        for i in mono:
            col = col * x[:, i]
        out[:, j] = col
        names.append("*".join(data.columns[i] for i in mono) or "1")
    return data.with_values(out, names)
