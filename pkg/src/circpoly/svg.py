"""Static SVG pictures of instances, frames, polygons and ray extensions."""

from __future__ import annotations

from collections import Counter
from fractions import Fraction
from typing import Iterable, Sequence

from .frame import Frame
from .geom import Point
from .instance import Polygon, SegmentSet

SIZE = 1000
MARGIN = 40


def _num(v: Fraction) -> str:
    # display only; geometry never reads these back
    return f"{float(v):.6f}"


class _Viewport:
    def __init__(self, pts: Sequence[Point]):
        xs = [p.x for p in pts]
        ys = [p.y for p in pts]
        self.x0, self.y1 = min(xs), max(ys)
        span = max(max(xs) - self.x0, self.y1 - min(ys)) or Fraction(1)
        self.scale = Fraction(SIZE - 2 * MARGIN) / span

    def __call__(self, p: Point) -> str:
        x = MARGIN + (p.x - self.x0) * self.scale
        y = MARGIN + (self.y1 - p.y) * self.scale  # y grows downward in SVG
        return f"{_num(x)},{_num(y)}"


def _path(vp: _Viewport, pts: Sequence[Point]) -> str:
    return "M " + " L ".join(vp(p) for p in pts) + " Z"


def render_svg(s: SegmentSet, frames: Iterable[Frame] = (), polygons: Iterable[Polygon] = (),
               rays: Iterable[tuple[Point, Point]] = ()) -> str:
    """Segments plus optional overlays; byte-identical for identical input."""
    frames, polygons, rays = list(frames), list(polygons), list(rays)
    pts = list(s.points())
    for r in rays:
        pts.extend(r)
    if not pts:
        pts = [Point(Fraction(0), Fraction(0))]
    vp = _Viewport(pts)
    out = ['<?xml version="1.0" encoding="UTF-8"?>',
           f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
           f'viewBox="0 0 {SIZE} {SIZE}">',
           f'<rect width="{SIZE}" height="{SIZE}" fill="white"/>']

    marks: Counter = Counter()
    for f in frames:
        out.append(f'<path class="frame" d="{_path(vp, f.pts())}" fill="#d9d9d9" '
                   f'stroke="#555555" stroke-width="1.5" fill-rule="nonzero"/>')
        for r, m in Counter(f.cycle).items():
            marks[r] = max(marks[r], m)
    for p in polygons:
        out.append(f'<path class="polygon" d="{_path(vp, p.points(s))}" fill="#cfe3f5" '
                   f'stroke="#1f4e79" stroke-width="1.5"/>')
        for r in p.cycle:
            marks[r] = max(marks[r], 1)
    for a, b in rays:
        out.append(f'<path class="ray" d="M {vp(a)} L {vp(b)}" stroke="#b03a2e" '
                   f'stroke-width="1.5" stroke-dasharray="8 5" fill="none"/>')
    for sg in s.segments:
        out.append(f'<path class="segment" d="M {vp(sg.a)} L {vp(sg.b)}" stroke="black" '
                   f'stroke-width="3" fill="none"/>')
    for r in sorted(marks):
        x, y = vp(s.point(r)).split(",")
        fill = "white" if marks[r] >= 2 else "black"
        out.append(f'<circle cx="{x}" cy="{y}" r="5" fill="{fill}" stroke="black" stroke-width="1.5"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
