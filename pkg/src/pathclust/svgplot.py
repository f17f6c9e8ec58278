"""Plain SVG plot of a gap sequence, coloured by class, with change-point marks."""

from __future__ import annotations

from typing import Optional
from xml.sax.saxutils import escape

import numpy as np

from .changepoint import ChangePointSet
from .evaluation import ClusterLabeling
from .geometry import HamiltonianPath

PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)
MARGIN = 50


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = np.ceil(lo / step) * step
    return [float(t) for t in np.arange(first, hi + step * 1e-9, step)]


def render_sequence_svg(
    path: HamiltonianPath,
    labels: Optional[ClusterLabeling] = None,
    cps: Optional[ChangePointSet] = None,
    width: int = 960,
    height: int = 320,
    title: str = "",
) -> str:
    """Gap value against visit index.

    Gap ``i`` is drawn in the colour of the class of visit ``i`` when
    ``labels`` (in original row order) are given. Change points become
    dashed vertical lines topped with a downward triangle.
    """
    gaps = np.asarray(path.gaps, dtype=float)
    n = gaps.size
    if labels is not None and len(labels) != path.size:
        raise ValueError(f"{len(labels)} labels for a path over {path.size} samples")
    if cps is not None and cps.n != n:
        raise ValueError(f"change points are for length {cps.n}, sequence has {n}")

    plot_w = width - 2 * MARGIN
    plot_h = height - 2 * MARGIN
    y_max = float(gaps.max()) if n and gaps.max() > 0 else 1.0

    def sx(i):
        return MARGIN + (i / max(n - 1, 1)) * plot_w

    def sy(v):
        return height - MARGIN - (v / y_max) * plot_h

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
    ]
    if title:
        out.append(
            f'<text x="{width / 2:.1f}" y="20" text-anchor="middle" font-family="sans-serif" '
            f'font-size="14">{escape(title)}</text>'
        )
    x0, y0 = MARGIN, height - MARGIN
    out.append('<g id="axes" stroke="black" stroke-width="1">')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{width - MARGIN}" y2="{y0}"/>')
    out.append(f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{MARGIN}"/>')
    out.append("</g>")
    out.append('<g id="ticks" font-family="sans-serif" font-size="10">')
    for t in _nice_ticks(0.0, y_max):
        out.append(
            f'<text x="{x0 - 4}" y="{_fmt(sy(t) + 3)}" text-anchor="end">{t:g}</text>'
        )
    for t in _nice_ticks(0.0, max(n - 1, 1)):
        out.append(f'<text x="{_fmt(sx(t))}" y="{y0 + 14}" text-anchor="middle">{int(t)}</text>')
    out.append("</g>")

    if n:
        pts = " ".join(f"{_fmt(sx(i))},{_fmt(sy(v))}" for i, v in enumerate(gaps))
        out.append(
            f'<polyline id="sequence" points="{pts}" fill="none" stroke="#444444" stroke-width="0.6"/>'
        )
    if labels is not None:
        visit_class = labels.labels[np.asarray(path.order)]
        out.append('<g id="classes">')
        for i, v in enumerate(gaps):
            colour = PALETTE[int(visit_class[i]) % len(PALETTE)]
            out.append(
                f'<circle cx="{_fmt(sx(i))}" cy="{_fmt(sy(v))}" r="1.6" fill="{colour}" '
                f'class="c{int(visit_class[i])}"/>'
            )
        out.append("</g>")
    if cps is not None and len(cps):
        out.append('<g id="changepoints" stroke="#d62728" stroke-width="1">')
        for pos in cps.positions:
            x = _fmt(sx(pos))
            out.append(
                f'<line class="cp" x1="{x}" y1="{y0}" x2="{x}" y2="{MARGIN}" stroke-dasharray="4,3"/>'
            )
            out.append(
                f'<path class="cp-mark" d="M {_fmt(sx(pos) - 4)} {MARGIN - 8} '
                f'L {_fmt(sx(pos) + 4)} {MARGIN - 8} L {x} {MARGIN} Z" fill="#d62728"/>'
            )
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
