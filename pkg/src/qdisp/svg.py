"""Minimal SVG line plots and heat maps (no plotting dependency)."""
from __future__ import annotations

from html import escape

import numpy as np

WIDTH, HEIGHT = 640, 420
MARGIN = dict(left=80, right=20, top=40, bottom=50)
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _fmt(v: float) -> str:
    return f"{v:.6g}"


def _scale(lo: float, hi: float, a: float, b: float):
    if hi == lo:
        hi = lo + 1.0
    return lambda v: a + (np.asarray(v, dtype=float) - lo) * (b - a) / (hi - lo)


def line_plot(x, series: dict[str, np.ndarray], title: str = "", xlabel: str = "",
              ylabel: str = "") -> str:
    """One polyline per entry of ``series`` (label -> y values) over shared ``x``."""
    x = np.asarray(x, dtype=float)
    ys = [np.asarray(v, dtype=float) for v in series.values()]
    ymin = min(float(y.min()) for y in ys)
    ymax = max(float(y.max()) for y in ys)
    pad = 0.05 * (ymax - ymin or 1.0)
    x0, x1 = MARGIN["left"], WIDTH - MARGIN["right"]
    y0, y1 = HEIGHT - MARGIN["bottom"], MARGIN["top"]
    sx = _scale(float(x.min()), float(x.max()), x0, x1)
    sy = _scale(ymin - pad, ymax + pad, y0, y1)
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>',
           f'<line x1="{x0}" y1="{y0}" x2="{x1}" y2="{y0}" stroke="black"/>',
           f'<line x1="{x0}" y1="{y0}" x2="{x0}" y2="{y1}" stroke="black"/>']
    for v in np.linspace(float(x.min()), float(x.max()), 5):
        out.append(f'<text x="{_fmt(sx(v))}" y="{y0 + 18}" text-anchor="middle" '
                   f'font-size="11">{_fmt(v)}</text>')
    for v in np.linspace(ymin - pad, ymax + pad, 5):
        out.append(f'<text x="{x0 - 6}" y="{_fmt(sy(v) + 4)}" text-anchor="end" '
                   f'font-size="11">{_fmt(v)}</text>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{HEIGHT - 12}" text-anchor="middle" '
               f'font-size="13">{escape(xlabel)}</text>')
    out.append(f'<text x="16" y="{(y0 + y1) / 2}" text-anchor="middle" font-size="13" '
               f'transform="rotate(-90 16 {(y0 + y1) / 2})">{escape(ylabel)}</text>')
    for i, (label, y) in enumerate(zip(series, ys)):
        color = COLORS[i % len(COLORS)]
        pts = " ".join(f"{_fmt(a)},{_fmt(b)}" for a, b in zip(sx(x), sy(y)))
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{pts}"/>')
        out.append(f'<text x="{x1 - 4}" y="{y1 + 16 * (i + 1)}" text-anchor="end" '
                   f'font-size="12" fill="{color}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def heat_map(values: np.ndarray, extent: tuple[float, float, float, float], title: str = "",
             max_cells: int = 200) -> str:
    """Gray-scale image of a 2D array; ``extent = (xmin, xmax, ymin, ymax)``.

    Large arrays are block-averaged down to at most ``max_cells`` per side.
    """
    v = np.asarray(values, dtype=float)
    step = max(1, int(np.ceil(max(v.shape) / max_cells)))
    if step > 1:
        ny, nx = (s // step for s in v.shape)
        v = v[:ny * step, :nx * step].reshape(ny, step, nx, step).mean(axis=(1, 3))
    peak = float(v.max()) or 1.0
    size = min(WIDTH - MARGIN["left"] - MARGIN["right"], HEIGHT - MARGIN["top"] - MARGIN["bottom"])
    cw, ch = size / v.shape[1], size / v.shape[0]
    x0, y0 = MARGIN["left"], MARGIN["top"]
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}">',
           '<rect width="100%" height="100%" fill="white"/>',
           f'<text x="{WIDTH / 2}" y="24" text-anchor="middle" font-size="15">{escape(title)}</text>']
    for i in range(v.shape[0]):
        for j in range(v.shape[1]):
            level = int(round(255 * (1.0 - v[i, j] / peak)))
            if level >= 255:
                continue
            # first index runs along x, second along y (drawn upward)
            out.append(f'<rect x="{_fmt(x0 + i * cw)}" y="{_fmt(y0 + size - (j + 1) * ch)}" '
                       f'width="{_fmt(cw)}" height="{_fmt(ch)}" '
                       f'fill="rgb({level},{level},{level})"/>')
    out.append(f'<rect x="{x0}" y="{y0}" width="{_fmt(size)}" height="{_fmt(size)}" '
               'fill="none" stroke="black"/>')
    xmin, xmax, ymin, ymax = extent
    out.append(f'<text x="{x0}" y="{y0 + size + 18}" font-size="11">{_fmt(xmin)}</text>')
    out.append(f'<text x="{_fmt(x0 + size)}" y="{y0 + size + 18}" text-anchor="end" '
               f'font-size="11">{_fmt(xmax)}</text>')
    out.append(f'<text x="{x0 - 6}" y="{_fmt(y0 + size)}" text-anchor="end" '
               f'font-size="11">{_fmt(ymin)}</text>')
    out.append(f'<text x="{x0 - 6}" y="{y0 + 10}" text-anchor="end" font-size="11">{_fmt(ymax)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
