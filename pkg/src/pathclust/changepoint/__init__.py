"""Change-point detectors for gap sequences."""

from .bayes import Posterior, bcd_posterior, bcd_segment, local_maxima
from .cusum import cusum_a, cusum_b, filter_changepoints, select_direction
from .segment import jenks_breaks, segment_optimal, within_class_ss
from .types import ChangePointError, ChangePointSet, Segmentation, as_sequence

__all__ = [
    "ChangePointError",
    "ChangePointSet",
    "Posterior",
    "Segmentation",
    "as_sequence",
    "bcd_posterior",
    "bcd_segment",
    "cusum_a",
    "cusum_b",
    "filter_changepoints",
    "jenks_breaks",
    "local_maxima",
    "segment_optimal",
    "select_direction",
    "within_class_ss",
]
