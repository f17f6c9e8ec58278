"""Command line entry point: ``pathclust {run,path,detect,score,gen}``."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .changepoint import ChangePointError
from .dataset import DatasetError, load_csv, write_csv
from .evaluation import ClusterLabeling, EvaluationError, ami_score, generate_2d, generate_mgd
from .geometry import HamiltonianPath, discover_path
from .pipeline import DETECTORS, ConfigError, PipelineConfig, PipelineError, detect, prepare, run_pipeline

log = logging.getLogger("pathclust")

SHAPES_2D = ("noisy_circles", "noisy_moons", "blobs", "aniso", "varied")


def _add_data_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--input", help="CSV file of samples")
    p.add_argument("--labels-col", dest="labels_col", help="ground-truth column name or index")
    p.add_argument("--standardize", action=argparse.BooleanOptionalAction, default=None,
                   help="z-score every column (default on)")
    p.add_argument("--lift-degree", dest="lift_degree", type=int, help="polynomial feature lift degree")


def _add_detector_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--detector", choices=DETECTORS)
    p.add_argument("--threshold", type=float, help="CUSUM alarm threshold")
    p.add_argument("--accuracy", type=float, help="CUSUM-A slack")
    p.add_argument("--drift", type=float, help="CUSUM-B drift")
    p.add_argument("--k", type=int, help="number of segments for jenks")
    p.add_argument("--max-k", dest="max_k", type=int, help="segment cap for the penalized optimum")
    p.add_argument("--model", choices=("constant", "linear"), help="segment model for the penalized optimum")
    p.add_argument("--prob-floor", dest="prob_floor", type=float, help="BCD posterior floor")
    p.add_argument("--min-gap", dest="min_gap", type=int, help="drop change points closer than this")
    p.add_argument("--direction", choices=("both", "upper", "lower"), help="CUSUM alarm side to keep")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pathclust", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="full pipeline")
    run.add_argument("--config", help="JSON file with PipelineConfig keys")
    _add_data_flags(run)
    _add_detector_flags(run)
    run.add_argument("--seed", type=int)
    run.add_argument("--out-dir", dest="out_dir")
    run.add_argument("--svg", action=argparse.BooleanOptionalAction, default=None, help="write sequence.svg")
    run.add_argument("--baseline", action=argparse.BooleanOptionalAction, default=None,
                     help="also score k-means with the true class count")
    run.add_argument("--streaming", action=argparse.BooleanOptionalAction, default=None,
                     help="force or forbid the row-streaming path builder")

    path = sub.add_parser("path", help="build the greedy path only")
    _add_data_flags(path)
    path.add_argument("--out", help="write path JSON here instead of stdout")

    det = sub.add_parser("detect", help="change points on a saved sequence")
    det.add_argument("sequence", help="path JSON or a text file with one value per line")
    _add_detector_flags(det)
    det.add_argument("--out", help="write change point JSON here instead of stdout")

    score = sub.add_parser("score", help="AMI between two label files")
    score.add_argument("a")
    score.add_argument("b")
    score.add_argument("--col-a", default=None, help="column in a (default: cluster, else last)")
    score.add_argument("--col-b", default=None, help="column in b (default: truth, else last)")

    gen = sub.add_parser("gen", help="synthetic data")
    gen.add_argument("kind", choices=("mgd",) + SHAPES_2D)
    gen.add_argument("--p", type=int, default=3000, help="samples")
    gen.add_argument("--dims", type=int, default=60, help="MGD attributes")
    gen.add_argument("--clusters", type=int, default=4)
    gen.add_argument("--separation", type=float, default=10.0)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--out", required=True, help="CSV to write")
    return parser


_RUN_KEYS = PipelineConfig.keys()


def _overrides(args: argparse.Namespace) -> dict:
    return {k: v for k, v in vars(args).items() if k in _RUN_KEYS and v is not None}


def _read_sequence(path: str) -> np.ndarray:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return np.asarray(HamiltonianPath.from_json(text).gaps)
    return np.array([float(tok) for tok in text.replace(",", " ").split()])


def _read_labels(path: str, column, preferred: str) -> list:
    text = Path(path).read_text(encoding="utf-8")
    if text.lstrip().startswith("{"):
        return ClusterLabeling.from_json(text).labels.tolist()
    rows = list(csv.reader(text.splitlines()))
    header, body = rows[0], rows[1:]
    if column is None:
        column = preferred if preferred in header else header[-1]
    if column not in header:
        raise EvaluationError(f"{path}: no column {column!r} (have {header})")
    j = header.index(column)
    return [r[j] for r in body]


def _emit(text: str, out) -> None:
    if out:
        Path(out).write_text(text + "\n", encoding="utf-8")
    else:
        print(text)


def cmd_run(args) -> int:
    config = PipelineConfig.load(args.config, _overrides(args))
    report = run_pipeline(config)
    summary = {k: report[k] for k in ("samples", "clusters", "changepoints") if k in report}
    for k in ("ami", "kmeans_ami"):
        if k in report:
            summary[k] = report[k]
    print(json.dumps(summary, sort_keys=True))
    return 0


def cmd_path(args) -> int:
    if args.input is None:
        raise ConfigError("--input is required")
    cfg = PipelineConfig(input=args.input, standardize=args.standardize is not False,
                         lift_degree=args.lift_degree)
    data = prepare(load_csv(args.input, args.labels_col), cfg)
    _emit(discover_path(data).to_json(), args.out)
    return 0


def cmd_detect(args) -> int:
    cfg = PipelineConfig(input=args.sequence, out_dir=".")
    for k, v in _overrides(args).items():
        setattr(cfg, k, v)
    cfg.validate()
    gaps = _read_sequence(args.sequence)
    _emit(detect(gaps, cfg).to_json(), args.out)
    return 0


def cmd_score(args) -> int:
    a = ClusterLabeling.from_values(_read_labels(args.a, args.col_a, "cluster"))
    b = ClusterLabeling.from_values(_read_labels(args.b, args.col_b, "truth"))
    print(json.dumps(ami_score(a, b).to_dict(), sort_keys=True))
    return 0


def cmd_gen(args) -> int:
    if args.kind == "mgd":
        data = generate_mgd(args.p, args.dims, args.clusters, args.separation, args.seed)
    else:
        data = generate_2d(args.kind, args.p, args.seed)
    write_csv(data, args.out, label_name="class")
    return 0


COMMANDS = {"run": cmd_run, "path": cmd_path, "detect": cmd_detect, "score": cmd_score, "gen": cmd_gen}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except PipelineError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ConfigError, DatasetError, ChangePointError, EvaluationError, OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
