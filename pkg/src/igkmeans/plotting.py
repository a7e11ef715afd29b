"""Minimal self-contained SVG renderers for 2-D cluster scatters and sweep curves.

Output is plain SVG text built with fixed-precision coordinates and no
timestamps or random ids, so the same inputs always produce the same bytes.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

__all__ = ["scatter_svg", "curve_svg", "PALETTE"]

PALETTE = [
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
    "#393b79", "#637939", "#8c6d31", "#843c39", "#7b4173",
    "#3182bd", "#e6550d", "#31a354", "#756bb1", "#636363",
]

_W, _H, _MARGIN = 640.0, 480.0, 30.0


def _fmt(v: float) -> str:
    return f"{v:.2f}"


class _Frame:
    """Maps data coordinates into the padded SVG viewport (y flipped)."""

    def __init__(self, xs: np.ndarray, ys: np.ndarray):
        x_lo, x_hi = float(xs.min()), float(xs.max())
        y_lo, y_hi = float(ys.min()), float(ys.max())
        x_pad = 0.05 * (x_hi - x_lo) or 1.0
        y_pad = 0.05 * (y_hi - y_lo) or 1.0
        self.x_lo, self.x_span = x_lo - x_pad, (x_hi - x_lo) + 2 * x_pad
        self.y_lo, self.y_span = y_lo - y_pad, (y_hi - y_lo) + 2 * y_pad

    def x(self, v: float) -> float:
        return _MARGIN + (v - self.x_lo) / self.x_span * (_W - 2 * _MARGIN)

    def y(self, v: float) -> float:
        return _H - _MARGIN - (v - self.y_lo) / self.y_span * (_H - 2 * _MARGIN)


def _header(title: str) -> list[str]:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{int(_W)}" height="{int(_H)}" '
        f'viewBox="0 0 {int(_W)} {int(_H)}">',
        f'<rect width="{int(_W)}" height="{int(_H)}" fill="white"/>',
        f'<rect x="{_fmt(_MARGIN)}" y="{_fmt(_MARGIN)}" width="{_fmt(_W - 2 * _MARGIN)}" '
        f'height="{_fmt(_H - 2 * _MARGIN)}" fill="none" stroke="#cccccc"/>',
    ]
    if title:
        parts.append(
            f'<text x="{_fmt(_W / 2)}" y="20" text-anchor="middle" '
            f'font-family="sans-serif" font-size="13">{title}</text>'
        )
    return parts


def scatter_svg(
    points: np.ndarray,
    labels: np.ndarray,
    centroids: np.ndarray,
    removed_points: np.ndarray | None = None,
    title: str = "",
) -> str:
    """Render a labeled 2-D scatter with centroid markers.

    Points are colored from a fixed palette by cluster index; centroids are
    drawn as X marks (``class="centroid"``); removed points, when given, are
    overlaid as open red circles (``class="removed"``).
    """
    points = np.atleast_2d(np.asarray(points, dtype=np.float64))
    centroids = np.atleast_2d(np.asarray(centroids, dtype=np.float64))
    if points.shape[1] != 2 or centroids.shape[1] != 2:
        raise ValueError("scatter plots require 2-D points")
    stacks = [points, centroids]
    if removed_points is not None and len(removed_points):
        removed_points = np.atleast_2d(np.asarray(removed_points, dtype=np.float64))
        stacks.append(removed_points)
    allpts = np.vstack(stacks)
    frame = _Frame(allpts[:, 0], allpts[:, 1])
    parts = _header(title)
    for (px, py), lab in zip(points, labels):
        color = PALETTE[int(lab) % len(PALETTE)]
        parts.append(
            f'<circle class="pt" cx="{_fmt(frame.x(px))}" cy="{_fmt(frame.y(py))}" '
            f'r="2" fill="{color}" fill-opacity="0.7"/>'
        )
    if removed_points is not None and len(removed_points):
        for px, py in removed_points:
            parts.append(
                f'<circle class="removed" cx="{_fmt(frame.x(px))}" cy="{_fmt(frame.y(py))}" '
                f'r="5" fill="none" stroke="#d62728" stroke-width="1.5"/>'
            )
    for cx, cy in centroids:
        x, y = frame.x(cx), frame.y(cy)
        parts.append(
            f'<path class="centroid" d="M {_fmt(x - 5)} {_fmt(y - 5)} L {_fmt(x + 5)} {_fmt(y + 5)} '
            f'M {_fmt(x - 5)} {_fmt(y + 5)} L {_fmt(x + 5)} {_fmt(y - 5)}" '
            f'stroke="black" stroke-width="2" fill="none"/>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def curve_svg(
    xs: np.ndarray,
    ys: np.ndarray,
    x_label: str = "threshold",
    y_label: str = "mse",
    title: str = "",
) -> str:
    """Render a polyline curve with one marked vertex (``class="vertex"``) per point."""
    xs = np.asarray(xs, dtype=np.float64)
    ys = np.asarray(ys, dtype=np.float64)
    if xs.size < 1 or xs.shape != ys.shape:
        raise ValueError("curve needs equally sized nonempty x and y arrays")
    frame = _Frame(xs, ys)
    parts = _header(title)
    coords = " ".join(f"{_fmt(frame.x(x))},{_fmt(frame.y(y))}" for x, y in zip(xs, ys))
    parts.append(
        f'<polyline class="curve" points="{coords}" fill="none" stroke="#1f77b4" stroke-width="1.5"/>'
    )
    for x, y in zip(xs, ys):
        parts.append(
            f'<circle class="vertex" cx="{_fmt(frame.x(x))}" cy="{_fmt(frame.y(y))}" '
            f'r="3" fill="#1f77b4"/>'
        )
    parts.append(
        f'<text x="{_fmt(_W / 2)}" y="{_fmt(_H - 8)}" text-anchor="middle" '
        f'font-family="sans-serif" font-size="11">{x_label}</text>'
    )
    parts.append(
        f'<text x="12" y="{_fmt(_H / 2)}" text-anchor="middle" font-family="sans-serif" '
        f'font-size="11" transform="rotate(-90 12 {_fmt(_H / 2)})">{y_label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def write_svg(path, svg_text: str) -> None:
    Path(path).write_text(svg_text, encoding="utf-8")
