"""Minimal deterministic SVG emitters for trajectories and the momentum image.

Plain string assembly: no plotting library, so identical inputs give
byte-identical files.  Numbers are written with two decimals, which keeps the
default grids far under the 2 MB budget.
"""

from __future__ import annotations

import math
from typing import Sequence

_HEADER = '<?xml version="1.0" encoding="UTF-8"?>\n'


def _fmt(x: float) -> str:
    return f"{x:.2f}"


def _polyline(points: Sequence[tuple[float, float]], color: str, width: float = 1.2) -> str:
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in points)
    return f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="{width}"/>'


def _circle(x: float, y: float, r: float, fill: str) -> str:
    return f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(r)}" fill="{fill}"/>'


def _text(x: float, y: float, s: str, size: int = 12) -> str:
    return f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-family="monospace" font-size="{size}">{s}</text>'


def _document(width: int, height: int, body: list[str]) -> str:
    open_tag = (
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">'
    )
    return _HEADER + open_tag + "\n" + "\n".join(body) + "\n</svg>\n"


class _Axes:
    """Affine map from data coordinates to one SVG panel."""

    def __init__(self, x0, y0, w, h, xmin, xmax, ymin, ymax):
        self.x0, self.y0, self.w, self.h = x0, y0, w, h
        self.xmin, self.xmax, self.ymin, self.ymax = xmin, xmax, ymin, ymax

    def map(self, x: float, y: float) -> tuple[float, float]:
        fx = (x - self.xmin) / (self.xmax - self.xmin)
        fy = (y - self.ymin) / (self.ymax - self.ymin)
        return self.x0 + fx * self.w, self.y0 + (1.0 - fy) * self.h

    def frame(self) -> str:
        return (
            f'<rect x="{_fmt(self.x0)}" y="{_fmt(self.y0)}" width="{_fmt(self.w)}" '
            f'height="{_fmt(self.h)}" fill="none" stroke="#444" stroke-width="1"/>'
        )


def trajectory_svg(times: Sequence[float], states: Sequence[Sequence[float]]) -> str:
    """Two panels: orthographic view of the sphere path, and z against time."""
    body: list[str] = []
    # left panel: axonometric projection px = x + 0.4 y, py = z + 0.25 y
    left = _Axes(40, 30, 380, 380, -1.6, 1.6, -1.45, 1.45)
    body.append(left.frame())
    # sphere outline (unit circle in the x-z plane)
    outline = [
        left.map(math.cos(a), math.sin(a))
        for a in [2 * math.pi * i / 120 for i in range(121)]
    ]
    body.append(_polyline(outline, "#bbbbbb", 1.0))
    path = [left.map(st[0] + 0.4 * st[1], st[2] + 0.25 * st[1]) for st in states]
    if path:
        body.append(_polyline(path, "#1f4f9f", 1.4))
        body.append(_circle(*path[0], 3.5, "#b03030"))
    body.append(_text(40, 20, "sphere path (orthographic)"))
    # right panel: (t, z)
    tmin, tmax = (times[0], times[-1]) if len(times) > 1 else (0.0, 1.0)
    if tmax == tmin:
        tmax = tmin + 1.0
    right = _Axes(470, 30, 380, 380, tmin, tmax, -1.05, 1.05)
    body.append(right.frame())
    body.append(_polyline([right.map(t, 0.0) for t in (tmin, tmax)], "#cccccc", 0.8))
    body.append(_polyline([right.map(t, st[2]) for t, st in zip(times, states)], "#206020", 1.4))
    body.append(_text(470, 20, "height z against time"))
    return _document(890, 440, body)


def _heat_color(f: float) -> str:
    """Blue (low) to red (high) through white for f in [0, 1]."""
    f = min(max(f, 0.0), 1.0)
    if f < 0.5:
        g = f / 0.5
        r, gr, b = int(255 * g), int(255 * g), 255
    else:
        g = (f - 0.5) / 0.5
        r, gr, b = 255, int(255 * (1 - g)), int(255 * (1 - g))
    return f"#{r:02x}{gr:02x}{b:02x}"


def _image_boundary(ax: _Axes, n: int = 160) -> list[tuple[float, float]]:
    pts = []
    for i in range(n + 1):
        j = ax.xmin + (ax.xmax - ax.xmin) * i / n
        pts.append(ax.map(j, 0.5 * j * j))
    return pts


def period_heatmap_svg(j_vals, h_vals, t_vals) -> str:
    """Heatmap of the return period over the momentum window.

    Cells outside the image (or on singular strata) come as NaN and are left
    blank.  Overlays the boundary parabola and the isolated singular value.
    """
    body: list[str] = []
    ax = _Axes(60, 30, 560, 480, min(j_vals), max(j_vals), min(h_vals), max(h_vals))
    finite = [t for t in t_vals if t == t]
    lo, hi = (min(finite), max(finite)) if finite else (0.0, 1.0)
    span = (hi - lo) or 1.0
    nj, nh = len(j_vals), len(h_vals)
    cw = 560 / nj
    ch = 480 / nh
    idx = 0
    for b in range(nh):
        for a in range(nj):
            t = t_vals[idx]
            idx += 1
            if t != t:
                continue
            px, py = ax.map(j_vals[a], h_vals[b])
            body.append(
                f'<rect x="{_fmt(px - cw / 2)}" y="{_fmt(py - ch / 2)}" width="{_fmt(cw)}" '
                f'height="{_fmt(ch)}" fill="{_heat_color((t - lo) / span)}"/>'
            )
    body.append(_polyline(_image_boundary(ax), "#000000", 1.6))
    body.append(_circle(*ax.map(0.0, 1.0), 4.0, "#000000"))
    body.append(ax.frame())
    body.append(_text(60, 20, f"return period T over (j, h); range [{lo:.3f}, {hi:.3f}]"))
    return _document(660, 540, body)


def map_image_svg(j_half_width: float = 1.6, h_max: float = 2.2) -> str:
    """The momentum-map image: shaded epigraph, boundary parabola, pinch point."""
    body: list[str] = []
    ax = _Axes(60, 30, 560, 480, -j_half_width, j_half_width, -0.3, h_max)
    boundary = _image_boundary(ax)
    top_right = ax.map(j_half_width, h_max)
    top_left = ax.map(-j_half_width, h_max)
    pts = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in
                   [top_left] + boundary + [top_right])
    body.append(f'<polygon points="{pts}" fill="#dce8f5" stroke="none"/>')
    body.append(_polyline(boundary, "#1f4f9f", 2.0))
    body.append(_circle(*ax.map(0.0, 1.0), 4.5, "#b03030"))
    body.append(ax.frame())
    body.append(_text(60, 20, "momentum-map image: h >= j^2/2, pinch at (0, 1)"))
    return _document(660, 540, body)
