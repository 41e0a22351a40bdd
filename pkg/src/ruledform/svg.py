"""Minimal SVG 1.1 line charts with no external assets.

Coordinates are written with fixed precision so equal inputs give
byte-identical files.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from xml.sax.saxutils import escape

COLORS = ("#1f77b4", "#d62728", "#555555", "#2ca02c", "#9467bd")


@dataclass
class Series:
    label: str
    x: list
    y: list
    dashed: bool = False


@dataclass
class Panel:
    title: str
    xlabel: str
    ylabel: str
    series: list = field(default_factory=list)


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=raw)
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _range(values) -> tuple[float, float]:
    finite = [v for v in values if math.isfinite(v)]
    if not finite:
        return -1.0, 1.0
    lo, hi = min(finite), max(finite)
    if hi - lo < 1e-9 * max(1.0, abs(lo), abs(hi)):
        pad = max(abs(lo) * 0.1, 0.5)
        return lo - pad, hi + pad
    pad = 0.05 * (hi - lo)
    return lo - pad, hi + pad


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float) -> str:
    return f"{v:.4g}"


def _panel(p: Panel, ox: float, oy: float, w: float, h: float) -> list[str]:
    left, right, top, bottom = 60.0, 15.0, 30.0, 45.0
    px0, px1 = ox + left, ox + w - right
    py0, py1 = oy + top, oy + h - bottom
    xs = [v for s in p.series for v in s.x]
    ys = [v for s in p.series for v in s.y]
    xlo, xhi = _range(xs)
    ylo, yhi = _range(ys)

    def X(v):
        return px0 + (v - xlo) / (xhi - xlo) * (px1 - px0)

    def Y(v):
        return py1 - (v - ylo) / (yhi - ylo) * (py1 - py0)

    out = [f'<text x="{_fmt((px0 + px1) / 2)}" y="{_fmt(oy + 18)}" text-anchor="middle" '
           f'font-size="14">{escape(p.title)}</text>',
           f'<rect x="{_fmt(px0)}" y="{_fmt(py0)}" width="{_fmt(px1 - px0)}" '
           f'height="{_fmt(py1 - py0)}" fill="none" stroke="#000"/>']
    for t in _nice_ticks(xlo, xhi):
        out.append(f'<line x1="{_fmt(X(t))}" y1="{_fmt(py1)}" x2="{_fmt(X(t))}" '
                   f'y2="{_fmt(py1 + 4)}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(X(t))}" y="{_fmt(py1 + 16)}" text-anchor="middle" '
                   f'font-size="10">{_tick_label(t)}</text>')
    for t in _nice_ticks(ylo, yhi):
        out.append(f'<line x1="{_fmt(px0 - 4)}" y1="{_fmt(Y(t))}" x2="{_fmt(px0)}" '
                   f'y2="{_fmt(Y(t))}" stroke="#000"/>')
        out.append(f'<text x="{_fmt(px0 - 6)}" y="{_fmt(Y(t) + 3)}" text-anchor="end" '
                   f'font-size="10">{_tick_label(t)}</text>')
    out.append(f'<text x="{_fmt((px0 + px1) / 2)}" y="{_fmt(oy + h - 10)}" '
               f'text-anchor="middle" font-size="12">{escape(p.xlabel)}</text>')
    out.append(f'<text x="{_fmt(ox + 14)}" y="{_fmt((py0 + py1) / 2)}" text-anchor="middle" '
               f'font-size="12" transform="rotate(-90 {_fmt(ox + 14)} {_fmt((py0 + py1) / 2)})">'
               f'{escape(p.ylabel)}</text>')
    for k, s in enumerate(p.series):
        color = COLORS[k % len(COLORS)]
        # break the line at non-finite values
        runs, cur = [], []
        for x, y in zip(s.x, s.y):
            if math.isfinite(x) and math.isfinite(y):
                cur.append(f"{_fmt(X(x))},{_fmt(Y(y))}")
            elif cur:
                runs.append(cur)
                cur = []
        if cur:
            runs.append(cur)
        dash = ' stroke-dasharray="6,4"' if s.dashed else ""
        for run in runs:
            out.append(f'<polyline points="{" ".join(run)}" fill="none" stroke="{color}" '
                       f'stroke-width="1.5"{dash}/>')
        ly = py0 + 14 + 14 * k
        out.append(f'<line x1="{_fmt(px1 - 90)}" y1="{_fmt(ly - 4)}" x2="{_fmt(px1 - 70)}" '
                   f'y2="{_fmt(ly - 4)}" stroke="{color}" stroke-width="1.5"{dash}/>')
        out.append(f'<text x="{_fmt(px1 - 65)}" y="{_fmt(ly)}" font-size="10">'
                   f'{escape(s.label)}</text>')
    return out


def render(panels: list[Panel], title: str = "", panel_width: float = 420.0,
           panel_height: float = 320.0) -> str:
    """Lay ``panels`` out left to right and return the SVG document."""
    head = 24.0 if title else 0.0
    width = panel_width * len(panels)
    height = panel_height + head
    parts = ['<?xml version="1.0" encoding="UTF-8" standalone="no"?>',
             f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
             f'width="{_fmt(width)}" height="{_fmt(height)}" '
             f'viewBox="0 0 {_fmt(width)} {_fmt(height)}" font-family="sans-serif">',
             f'<rect width="{_fmt(width)}" height="{_fmt(height)}" fill="#fff"/>']
    if title:
        parts.append(f'<text x="{_fmt(width / 2)}" y="17" text-anchor="middle" '
                     f'font-size="15">{escape(title)}</text>')
    for k, p in enumerate(panels):
        parts.extend(_panel(p, k * panel_width, head, panel_width, panel_height))
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
