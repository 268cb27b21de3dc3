"""Minimal standalone SVG line plots for singular-value spectra."""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 20, 30, 50
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, n: int = 5):
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / n
    mag = 10 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 5, 10) if m * mag >= raw), default=10 * mag)
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-9 * step:
        ticks.append(round(v, 12))
        v += step
    return ticks


def spectrum_svg(series: Sequence[Sequence[float]], *, labels: Sequence[str] = (),
                 logy: bool = True, title: str = "singular values") -> str:
    """SVG 1.1 document plotting each series against its 1-based index.

    Non-positive values are dropped on a log axis.
    """
    pts_all = []
    for ys in series:
        pts = [(i + 1, float(y)) for i, y in enumerate(ys) if not logy or y > 0]
        if logy:
            pts = [(x, math.log10(y)) for x, y in pts]
        pts_all.append(pts)
    xs = [x for pts in pts_all for x, _ in pts] or [1]
    ys = [y for pts in pts_all for _, y in pts] or [0.0]
    x0, x1 = 1, max(max(xs), 2)
    y0, y1 = min(ys), max(ys)
    if logy:
        y0, y1 = math.floor(y0), math.ceil(y1)
    if y1 <= y0:
        y1 = y0 + 1
    pw = WIDTH - MARGIN_L - MARGIN_R
    ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(x):
        return MARGIN_L + (x - x0) / (x1 - x0) * pw

    def py(y):
        return MARGIN_T + (1 - (y - y0) / (y1 - y0)) * ph

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="18" text-anchor="middle" font-family="sans-serif" '
        f'font-size="14">{escape(title)}</text>',
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{pw}" height="{ph}" fill="none" '
        'stroke="black"/>',
    ]
    for xt in _nice_ticks(x0, x1):
        out.append(f'<line x1="{_fmt(px(xt))}" y1="{MARGIN_T + ph}" x2="{_fmt(px(xt))}" '
                   f'y2="{MARGIN_T + ph + 5}" stroke="black"/>')
        out.append(f'<text x="{_fmt(px(xt))}" y="{MARGIN_T + ph + 18}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="11">{int(xt)}</text>')
    if logy:
        span = int(y1 - y0)
        step = max(1, math.ceil(span / 8))
        yticks = range(int(y0), int(y1) + 1, step)
    else:
        yticks = _nice_ticks(y0, y1)
    for yt in yticks:
        label = f"1e{int(yt)}" if logy else f"{yt:g}"
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_fmt(py(yt))}" x2="{MARGIN_L}" '
                   f'y2="{_fmt(py(yt))}" stroke="black"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_fmt(py(yt) + 4)}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11">{label}</text>')
    out.append(f'<text x="{MARGIN_L + pw / 2}" y="{HEIGHT - 10}" text-anchor="middle" '
               'font-family="sans-serif" font-size="12">index n</text>')
    for k, pts in enumerate(pts_all):
        color = COLORS[k % len(COLORS)]
        if pts:
            path = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
            out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" '
                       f'points="{path}"/>')
        if k < len(labels):
            ly = MARGIN_T + 16 + 16 * k
            out.append(f'<line x1="{WIDTH - MARGIN_R - 110}" y1="{ly - 4}" '
                       f'x2="{WIDTH - MARGIN_R - 90}" y2="{ly - 4}" stroke="{color}" '
                       'stroke-width="2"/>')
            out.append(f'<text x="{WIDTH - MARGIN_R - 85}" y="{ly}" font-family="sans-serif" '
                       f'font-size="11">{escape(labels[k])}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
