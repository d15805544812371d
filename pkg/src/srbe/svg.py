"""Minimal deterministic SVG line charts (no plotting library)."""

from __future__ import annotations

from typing import Mapping, Sequence
from xml.sax.saxutils import escape

import numpy as np

WIDTH, HEIGHT = 800, 600
MARGIN = dict(left=80, right=170, top=50, bottom=60)
PALETTE = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
           "#bcbd22", "#17becf")


def _num(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list:
    if hi <= lo:
        hi = lo + 1.0
    raw = (hi - lo) / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    start = np.ceil(lo / step) * step
    ticks = []
    t = start
    while t <= hi + 1e-12 * abs(hi):
        ticks.append(float(round(t, 12)))
        t += step
    return ticks


def line_chart(x: Sequence[float], series: Mapping[str, Sequence[float]], title: str = "",
               xlabel: str = "", ylabel: str = "") -> str:
    """Render one polyline per series on an 800x600 canvas with a legend."""
    x = np.asarray(x, dtype=float)
    names = list(series)
    ys = [np.asarray(series[n], dtype=float) for n in names]
    y_all = np.concatenate(ys) if ys else np.zeros(1)
    y_lo, y_hi = float(np.min(y_all)), float(np.max(y_all))
    if y_hi - y_lo < 1e-12:
        pad = max(abs(y_hi) * 0.05, 1.0)
        y_lo, y_hi = y_lo - pad, y_hi + pad
    x_lo, x_hi = float(x.min()), float(x.max())
    if x_hi - x_lo < 1e-12:
        x_lo, x_hi = x_lo - 0.5, x_hi + 0.5
    left, right = MARGIN["left"], WIDTH - MARGIN["right"]
    top, bottom = MARGIN["top"], HEIGHT - MARGIN["bottom"]

    def px(v):
        return left + (v - x_lo) / (x_hi - x_lo) * (right - left)

    def py(v):
        return bottom - (v - y_lo) / (y_hi - y_lo) * (bottom - top)

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {WIDTH} {HEIGHT}" '
        f'width="{WIDTH}" height="{HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2:.0f}" y="28" text-anchor="middle" font-size="16">{escape(title)}</text>',
        f'<line x1="{left}" y1="{bottom}" x2="{right}" y2="{bottom}" stroke="black"/>',
        f'<line x1="{left}" y1="{top}" x2="{left}" y2="{bottom}" stroke="black"/>',
    ]
    for t in _nice_ticks(x_lo, x_hi):
        out.append(f'<line x1="{_num(px(t))}" y1="{bottom}" x2="{_num(px(t))}" y2="{bottom + 5}" stroke="black"/>')
        out.append(f'<text x="{_num(px(t))}" y="{bottom + 20}" text-anchor="middle">{t:g}</text>')
    for t in _nice_ticks(y_lo, y_hi):
        out.append(f'<line x1="{left - 5}" y1="{_num(py(t))}" x2="{left}" y2="{_num(py(t))}" stroke="black"/>')
        out.append(f'<text x="{left - 8}" y="{_num(py(t) + 4)}" text-anchor="end">{t:g}</text>')
    out.append(f'<text x="{(left + right) / 2:.0f}" y="{HEIGHT - 15}" text-anchor="middle">{escape(xlabel)}</text>')
    out.append(f'<text x="20" y="{(top + bottom) / 2:.0f}" text-anchor="middle" '
               f'transform="rotate(-90 20 {(top + bottom) / 2:.0f})">{escape(ylabel)}</text>')
    for idx, (name, y) in enumerate(zip(names, ys)):
        color = PALETTE[idx % len(PALETTE)]
        pts = " ".join(f"{_num(px(a))},{_num(py(b))}" for a, b in zip(x, y))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="2" points="{pts}">'
                   f'<title>{escape(name)}</title></polyline>')
        ly = top + 10 + 20 * idx
        out.append(f'<line x1="{right + 15}" y1="{ly}" x2="{right + 45}" y2="{ly}" stroke="{color}" stroke-width="2"/>')
        out.append(f'<text x="{right + 52}" y="{ly + 4}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
