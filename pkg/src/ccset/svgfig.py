"""Deterministic SVG emission for spiral, fill, and coverage figures.

Plain string assembly, fixed decimal formatting, no timestamps: identical
inputs give byte-identical files.
"""

from __future__ import annotations

import math
from typing import Iterable, Optional

from .dynamics import CoverageReport
from .fill import FillCloud, QuadPatch
from .geometry import Point
from .spiral import SpiralState


def _fmt(v: float) -> str:
    return f"{v:.3f}"


class SvgCanvas:
    """World-coordinate canvas with a y-flip onto SVG pixel space."""

    def __init__(self, xmin: float, ymin: float, xmax: float, ymax: float,
                 size: int = 640):
        span = max(xmax - xmin, ymax - ymin, 1e-9)
        pad = 0.06 * span
        self.xmin = xmin - pad
        self.ymax = ymax + pad
        self.scale = size / (span + 2 * pad)
        self.width = (xmax - xmin + 2 * pad) * self.scale
        self.height = (ymax - ymin + 2 * pad) * self.scale
        self._elems: list[str] = []

    def map(self, p: Point) -> tuple[float, float]:
        return ((float(p.x) - self.xmin) * self.scale,
                (self.ymax - float(p.y)) * self.scale)

    def polygon(self, pts: Iterable[Point], fill: str, stroke: str = "none",
                stroke_width: float = 1.0, opacity: float = 1.0) -> None:
        coords = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in map(self.map, pts))
        self._elems.append(
            f'<polygon points="{coords}" fill="{fill}" stroke="{stroke}" '
            f'stroke-width="{_fmt(stroke_width)}" opacity="{_fmt(opacity)}"/>')

    def line(self, p: Point, q: Point, stroke: str, width: float = 1.0,
             dash: Optional[str] = None) -> None:
        (x1, y1), (x2, y2) = self.map(p), self.map(q)
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        self._elems.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="{stroke}" stroke-width="{_fmt(width)}"{dash_attr}/>')

    def dot(self, p: Point, r: float, fill: str) -> None:
        x, y = self.map(p)
        self._elems.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}"/>')

    def text(self, p: Point, s: str, size: int = 14, fill: str = "#000000") -> None:
        x, y = self.map(p)
        self._elems.append(
            f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="monospace" '
            f'font-size="{size}" fill="{fill}">{s}</text>')

    def rect_px(self, x: float, y: float, w: float, h: float, fill: str) -> None:
        self._elems.append(
            f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" '
            f'height="{_fmt(h)}" fill="{fill}"/>')

    def to_svg(self) -> str:
        head = (f'<svg xmlns="http://www.w3.org/2000/svg" '
                f'width="{_fmt(self.width)}" height="{_fmt(self.height)}" '
                f'viewBox="0 0 {_fmt(self.width)} {_fmt(self.height)}">')
        return "\n".join([head, *self._elems, "</svg>"]) + "\n"


def _grey(level: float) -> str:
    v = int(round(40 + 190 * min(max(level, 0.0), 1.0)))
    return f"#{v:02x}{v:02x}{v:02x}"


def spiral_figure(state: SpiralState) -> str:
    """Shaded triangle chain of a spiral orbit.

    The first triangle is darkest; each later similar copy is lighter.  The
    four queue lines through the limit point are drawn dashed.
    """
    pts = [p.as_float() for p in state.points]
    p_inf = state.p_infinity.as_float()
    everything = pts + [p_inf]
    xs = [float(p.x) for p in everything]
    ys = [float(p.y) for p in everything]
    canvas = SvgCanvas(min(xs), min(ys), max(xs), max(ys))

    tris = [(pts[i], pts[i + 1], pts[i + 2]) for i in range(0, len(pts) - 2, 2)]
    for k, tri in enumerate(tris):
        shade = k / max(len(tris) - 1, 1)
        canvas.polygon(tri, fill=_grey(shade), stroke="#303030",
                       stroke_width=0.8, opacity=0.9)

    if len(pts) >= 12:
        span = max(max(xs) - min(xs), max(ys) - min(ys))
        for start, color in zip(range(4), ("#c03030", "#3060c0", "#308040", "#a06010")):
            d = pts[start] - p_inf
            n = d.norm()
            if n == 0:
                continue
            d = d * (1.2 * span / n)
            canvas.line(p_inf - d, p_inf + d, stroke=color, width=0.7, dash="5,4")

    for p in pts:
        canvas.dot(p, 2.4, "#000000")
    canvas.dot(p_inf, 3.2, "#c03030")
    canvas.text(p_inf + Point(0.0, 0.0), " &#8734;", size=16, fill="#c03030")
    return canvas.to_svg()


def fill_figure(cloud: FillCloud, patch: Optional[QuadPatch] = None) -> str:
    """Scatter of a fill cloud with its carrier segment, and optionally the
    quadrilateral patch outline in the cloud's own frame."""
    pts = [p.as_float() for p in cloud.points]
    ends = [cloud.frame(Point(0, 0)).as_float(), cloud.frame(Point(0, 1)).as_float()]
    xs = [float(p.x) for p in pts + ends]
    ys = [float(p.y) for p in pts + ends]
    canvas = SvgCanvas(min(xs), min(ys), max(xs), max(ys))
    canvas.line(ends[0], ends[1], stroke="#3060c0", width=1.2)
    if patch is not None:
        corners = [cloud.frame(v).as_float() for v in patch.vertices()]
        canvas.polygon(corners, fill="none", stroke="#c03030", stroke_width=1.0)
    for p in pts:
        canvas.dot(p, 1.8, "#000000")
    canvas.dot(ends[0], 3.0, "#3060c0")
    canvas.dot(ends[1], 3.0, "#3060c0")
    return canvas.to_svg()


def coverage_figure(report: CoverageReport) -> str:
    """Bar chart of per-bin hit counts over the arccot compactification."""
    bins = report.bins
    peak = max(max(report.counts), 1)
    width, height = 640.0, 320.0
    canvas = SvgCanvas(0, 0, width, height, size=int(width))
    canvas._elems.append(
        f'<rect x="0" y="0" width="{_fmt(canvas.width)}" '
        f'height="{_fmt(canvas.height)}" fill="#ffffff"/>')
    bar_w = canvas.width / bins
    for i, count in enumerate(report.counts):
        h = (count / peak) * (canvas.height * 0.92)
        color = "#3060c0" if count > 0 else "#c03030"
        canvas.rect_px(i * bar_w, canvas.height - h, max(bar_w - 0.5, 0.5), h, color)
    return canvas.to_svg()
