"""End-to-end run: load, preprocess, walk, detect, label, score, write."""

from __future__ import annotations

import csv
import dataclasses
import json
import logging
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

import numpy as np

from . import changepoint as cp
from .dataset import DataMatrix, load_csv, polynomial_lift, standardize
from .evaluation import (
    ClusterLabeling,
    ami_score,
    kmeans_baseline,
    labels_from_changepoints,
)
from .geometry import HamiltonianPath, discover_path
from .svgplot import render_sequence_svg

log = logging.getLogger(__name__)

OUT_DIR_ENV = "PATHCLUST_OUT_DIR"
DETECTORS = ("cusum-a", "cusum-b", "jenks", "bcd", "optimal")
# Tuned on the handwritten digits; not a universal default.
CUSUM_A_DEFAULTS = {"threshold": 19.0, "accuracy": 4.0}
REQUIRED = {
    "cusum-a": ("threshold", "accuracy"),
    "cusum-b": ("threshold", "drift"),
    "jenks": ("k",),
    "bcd": ("prob_floor",),
    "optimal": ("max_k",),
}


class ConfigError(ValueError):
    pass


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage


@dataclass
class PipelineConfig:
    input: Optional[str] = None
    labels_col: Optional[str] = None
    standardize: bool = True
    lift_degree: Optional[int] = None
    detector: str = "cusum-a"
    threshold: Optional[float] = None
    accuracy: Optional[float] = None
    drift: Optional[float] = None
    k: Optional[int] = None
    max_k: Optional[int] = None
    model: str = "constant"
    prob_floor: Optional[float] = 0.5
    min_gap: int = 0
    direction: str = "both"
    seed: int = 0
    out_dir: Optional[str] = None
    svg: bool = True
    streaming: Optional[bool] = None
    baseline: bool = False

    @classmethod
    def keys(cls) -> tuple:
        return tuple(f.name for f in dataclasses.fields(cls))

    @classmethod
    def from_dict(cls, obj: dict) -> "PipelineConfig":
        unknown = set(obj) - set(cls.keys())
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        return cls(**obj)

    @classmethod
    def load(cls, path, overrides: Optional[dict] = None, env=None) -> "PipelineConfig":
        """Merge sources: defaults < environment < config file < overrides."""
        env = os.environ if env is None else env
        merged: dict = {}
        if env.get(OUT_DIR_ENV):
            merged["out_dir"] = env[OUT_DIR_ENV]
        if path is not None:
            with open(path, encoding="utf-8") as f:
                merged.update(json.load(f))
        merged.update({k: v for k, v in (overrides or {}).items() if v is not None})
        return cls.from_dict(merged)

    def detector_params(self) -> dict:
        params = {}
        if self.detector == "cusum-a":
            params = dict(CUSUM_A_DEFAULTS)
        for name in REQUIRED.get(self.detector, ()):
            value = getattr(self, name)
            if value is not None:
                params[name] = value
        return params

    def validate(self) -> None:
        if self.input is None:
            raise ConfigError("no input file given")
        if self.detector not in DETECTORS:
            raise ConfigError(f"unknown detector {self.detector!r}; choose from {DETECTORS}")
        params = self.detector_params()
        missing = [n for n in REQUIRED[self.detector] if n not in params]
        if missing:
            raise ConfigError(f"detector {self.detector} needs: {', '.join(missing)}")
        if self.min_gap < 0:
            raise ConfigError("min_gap must be >= 0")
        if self.direction not in ("both", "upper", "lower"):
            raise ConfigError(f"direction must be both, upper or lower, not {self.direction!r}")
        if self.lift_degree is not None and self.lift_degree < 1:
            raise ConfigError("lift_degree must be >= 1")
        if self.out_dir is None:
            raise ConfigError(f"no output directory (use --out-dir or ${OUT_DIR_ENV})")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def detect(gaps: np.ndarray, config: PipelineConfig) -> cp.ChangePointSet:
    """Run the configured detector, direction selection and thinning."""
    params = config.detector_params()
    det = config.detector
    if det == "cusum-a":
        found = cp.cusum_a(gaps, params["threshold"], params["accuracy"])
    elif det == "cusum-b":
        found = cp.cusum_b(gaps, params["threshold"], params["drift"])
    elif det == "jenks":
        found = cp.jenks_breaks(gaps, int(params["k"]))
    elif det == "bcd":
        found = cp.bcd_segment(gaps, floor=params["prob_floor"])
    else:
        seg = cp.segment_optimal(gaps, int(params["max_k"]), config.model)
        found = cp.ChangePointSet(
            "optimal", seg.breakpoints, [seg.score] * len(seg.breakpoints), seg.n,
            {"max_k": int(params["max_k"]), "model": config.model, "loss": seg.loss},
        )
    found = cp.select_direction(found, config.direction)
    if config.min_gap > 0:
        found = cp.filter_changepoints(found, config.min_gap)
    return found


def _stage(name, fn, *args, **kwargs):
    try:
        return fn(*args, **kwargs)
    except Exception as exc:
        raise PipelineError(name, exc) from exc


def prepare(data: DataMatrix, config: PipelineConfig) -> DataMatrix:
    if config.standardize:
        data = standardize(data)
    if config.lift_degree:
        data = polynomial_lift(data, config.lift_degree)
    return data


def write_labels_csv(path: Path, labeling: ClusterLabeling, truth=None) -> None:
    with path.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(["row", "cluster"] + (["truth"] if truth is not None else []))
        for i, c in enumerate(labeling.labels):
            w.writerow([i, int(c)] + ([truth[i]] if truth is not None else []))


def append_labels_csv(src, dest: Path, labeling: ClusterLabeling, column: str = "cluster") -> None:
    """Copy the input CSV with the cluster ids appended as a last column."""
    with open(src, newline="", encoding="utf-8") as f:
        rows = [r for r in csv.reader(f) if r and any(c.strip() for c in r)]
    has_header = len(rows) == len(labeling) + 1
    if not has_header and len(rows) != len(labeling):
        raise ValueError(f"{src} has {len(rows)} rows for {len(labeling)} labels")
    with dest.open("w", newline="", encoding="utf-8") as f:
        w = csv.writer(f, lineterminator="\n")
        if has_header:
            w.writerow(rows[0] + [column])
        for r, c in zip(rows[1:] if has_header else rows, labeling.labels):
            w.writerow(r + [int(c)])


def read_labels_csv(path, column: str = "cluster") -> list:
    with open(path, newline="", encoding="utf-8") as f:
        return [row[column] for row in csv.DictReader(f)]


def run_pipeline(config: PipelineConfig) -> dict:
    """Execute every stage and write the artifacts into ``config.out_dir``.

    Returns the run report (also written as ``report.json``).
    """
    config.validate()
    out = Path(config.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output directory {out}: {exc}") from exc
    if not os.access(out, os.W_OK):
        raise ConfigError(f"output directory {out} is not writable")

    raw = _stage("dataset", load_csv, config.input, config.labels_col)
    data = _stage("dataset", prepare, raw, config)
    log.info("loaded %d x %d (%d features after preprocessing)", raw.rows, raw.cols, data.cols)

    path: HamiltonianPath = _stage("geometry", discover_path, data, config.streaming)
    found = _stage("changepoint", detect, np.asarray(path.gaps), config)
    labeling = _stage("evaluation", labels_from_changepoints, path, found)

    (out / "path.json").write_text(path.to_json() + "\n", encoding="utf-8")
    (out / "changepoints.json").write_text(found.to_json() + "\n", encoding="utf-8")
    write_labels_csv(out / "labels.csv", labeling, raw.ground_truth)
    _stage("evaluation", append_labels_csv, config.input, out / "clustered.csv", labeling)

    report = {
        "input": str(config.input),
        "samples": raw.rows,
        "attributes": raw.cols,
        "features": data.cols,
        "start": path.start,
        "detector": found.detector,
        "params": found.params,
        "changepoints": list(found.positions),
        "clusters": labeling.k,
        "config": config.to_dict(),
    }
    if raw.ground_truth is not None:
        truth = ClusterLabeling.from_values(raw.ground_truth)
        ami = _stage("evaluation", ami_score, labeling, truth)
        (out / "ami.json").write_text(json.dumps(ami.to_dict(), sort_keys=True) + "\n", encoding="utf-8")
        report["truth_classes"] = truth.k
        report["ami"] = ami.ami
        if config.baseline:
            km = _stage("evaluation", kmeans_baseline, data, truth.k, config.seed)
            report["kmeans_ami"] = ami_score(km, truth).ami
    else:
        truth = None

    if config.svg:
        svg = _stage("render", render_sequence_svg, path, truth, found, title=Path(config.input).name)
        (out / "sequence.svg").write_text(svg, encoding="utf-8")

    (out / "report.json").write_text(json.dumps(report, sort_keys=True, indent=2) + "\n", encoding="utf-8")
    return report
