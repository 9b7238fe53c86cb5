"""Minimal SVG 1.1 line, scatter and heat-map renderer.

Output is a plain string with coordinates printed at fixed precision,
so the same data always produces the same bytes.
"""

from __future__ import annotations

import math
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

__all__ = ["Series", "line_plot", "scatter_plot", "heatmap", "write_svg"]

WIDTH, HEIGHT = 640, 420
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 150, 40, 50
PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b")


class Series:
    def __init__(self, label: str, x, y, color: str | None = None):
        self.label = label
        self.x = np.asarray(x, dtype=float)
        self.y = np.asarray(y, dtype=float)
        self.color = color


def _f(v: float) -> str:
    return f"{v:.2f}"


def _tick_label(v: float, log: bool) -> str:
    if log:
        return f"1e{int(round(v))}"
    if v == 0:
        return "0"
    if abs(v) >= 1e4 or abs(v) < 1e-2:
        return f"{v:.1e}"
    return f"{v:.3g}"


def _nice_ticks(lo: float, hi: float, count: int = 5) -> list[float]:
    if hi <= lo:
        return [lo]
    step = (hi - lo) / count
    mag = 10 ** math.floor(math.log10(step))
    for m in (1, 2, 5, 10):
        if step <= m * mag:
            step = m * mag
            break
    start = math.ceil(lo / step) * step
    ticks = []
    v = start
    while v <= hi + 1e-12 * abs(hi):
        ticks.append(round(v, 12))
        v += step
    return ticks


class _Frame:
    def __init__(self, xlo, xhi, ylo, yhi, logy):
        if xhi <= xlo:
            xhi = xlo + 1.0
        if yhi <= ylo:
            yhi = ylo + 1.0
        self.xlo, self.xhi, self.ylo, self.yhi, self.logy = xlo, xhi, ylo, yhi, logy
        self.pw = WIDTH - MARGIN_L - MARGIN_R
        self.ph = HEIGHT - MARGIN_T - MARGIN_B

    def px(self, x):
        return MARGIN_L + (x - self.xlo) / (self.xhi - self.xlo) * self.pw

    def py(self, y):
        return MARGIN_T + self.ph - (y - self.ylo) / (self.yhi - self.ylo) * self.ph


def _transform_y(y: np.ndarray, logy: bool) -> np.ndarray:
    if not logy:
        return y
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(y > 0, np.log10(np.where(y > 0, y, 1.0)), np.nan)


def _axes(fr: _Frame, title: str, xlabel: str, ylabel: str) -> list[str]:
    out = [
        f'<rect x="{MARGIN_L}" y="{MARGIN_T}" width="{fr.pw}" height="{fr.ph}" '
        'fill="none" stroke="#000"/>',
        f'<text x="{_f(MARGIN_L + fr.pw / 2)}" y="22" text-anchor="middle" '
        f'font-size="15">{escape(title)}</text>',
        f'<text x="{_f(MARGIN_L + fr.pw / 2)}" y="{HEIGHT - 10}" text-anchor="middle" '
        f'font-size="12">{escape(xlabel)}</text>',
        f'<text x="16" y="{_f(MARGIN_T + fr.ph / 2)}" text-anchor="middle" font-size="12" '
        f'transform="rotate(-90 16 {_f(MARGIN_T + fr.ph / 2)})">{escape(ylabel)}</text>',
    ]
    for t in _nice_ticks(fr.xlo, fr.xhi):
        x = fr.px(t)
        out.append(f'<line x1="{_f(x)}" y1="{_f(MARGIN_T + fr.ph)}" x2="{_f(x)}" '
                   f'y2="{_f(MARGIN_T + fr.ph + 5)}" stroke="#000"/>')
        out.append(f'<text x="{_f(x)}" y="{_f(MARGIN_T + fr.ph + 18)}" text-anchor="middle" '
                   f'font-size="10">{_tick_label(t, False)}</text>')
    yt = _nice_ticks(fr.ylo, fr.yhi)
    if fr.logy:
        yt = [float(v) for v in range(math.ceil(fr.ylo), math.floor(fr.yhi) + 1)]
        if len(yt) > 8:
            stride = math.ceil(len(yt) / 8)
            yt = yt[::stride]
    for t in yt:
        y = fr.py(t)
        out.append(f'<line x1="{MARGIN_L - 5}" y1="{_f(y)}" x2="{MARGIN_L}" y2="{_f(y)}" stroke="#000"/>')
        out.append(f'<text x="{MARGIN_L - 8}" y="{_f(y + 3)}" text-anchor="end" '
                   f'font-size="10">{_tick_label(t, fr.logy)}</text>')
    return out


def _legend(series: list[Series]) -> list[str]:
    out = []
    for i, s in enumerate(series):
        y = MARGIN_T + 14 + 18 * i
        x = WIDTH - MARGIN_R + 12
        out.append(f'<rect x="{x}" y="{y - 9}" width="12" height="10" fill="{s.color}"/>')
        out.append(f'<text x="{x + 18}" y="{y}" font-size="11">{escape(s.label)}</text>')
    return out


def _wrap(body: list[str]) -> str:
    head = (
        '<?xml version="1.0" encoding="UTF-8"?>\n'
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif">\n'
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="#fff"/>\n'
    )
    return head + "\n".join(body) + "\n</svg>\n"


def _colored(series) -> list[Series]:
    series = list(series)
    for i, s in enumerate(series):
        if s.color is None:
            s.color = PALETTE[i % len(PALETTE)]
    return series


def _frame_for(series, logy, xlim=None) -> _Frame:
    xs = np.concatenate([s.x for s in series]) if series else np.zeros(1)
    ys = np.concatenate([_transform_y(s.y, logy) for s in series]) if series else np.zeros(1)
    ys = ys[np.isfinite(ys)]
    if ys.size == 0:
        ys = np.zeros(1)
    xlo, xhi = xlim if xlim else (float(np.min(xs)), float(np.max(xs)))
    ylo, yhi = float(np.min(ys)), float(np.max(ys))
    if logy:
        ylo, yhi = math.floor(ylo), math.ceil(yhi)
    else:
        pad = 0.05 * (yhi - ylo or 1.0)
        ylo, yhi = min(0.0, ylo) if ylo >= 0 else ylo - pad, yhi + pad
    return _Frame(xlo, xhi, ylo, yhi, logy)


def line_plot(series, title="", xlabel="", ylabel="", logy=False) -> str:
    """Polyline per series; non-positive values are skipped on a log axis."""
    series = _colored(series)
    fr = _frame_for(series, logy)
    body = _axes(fr, title, xlabel, ylabel)
    for s in series:
        ys = _transform_y(s.y, logy)
        pts = [f"{_f(fr.px(x))},{_f(fr.py(y))}" for x, y in zip(s.x, ys) if np.isfinite(y)]
        if pts:
            body.append(f'<polyline fill="none" stroke="{s.color}" stroke-width="1.5" '
                        f'points="{" ".join(pts)}"/>')
    body += _legend(series)
    return _wrap(body)


def scatter_plot(series, title="", xlabel="", ylabel="", logy=False, xlim=None) -> str:
    series = _colored(series)
    fr = _frame_for(series, logy, xlim)
    body = _axes(fr, title, xlabel, ylabel)
    for s in series:
        ys = _transform_y(s.y, logy)
        for x, y in zip(s.x, ys):
            if np.isfinite(y):
                body.append(f'<circle cx="{_f(fr.px(x))}" cy="{_f(fr.py(y))}" r="1.8" '
                            f'fill="{s.color}" fill-opacity="0.6"/>')
    body += _legend(series)
    return _wrap(body)


def _ramp(v: float) -> str:
    # white -> dark blue
    v = min(max(v, 0.0), 1.0)
    r = int(round(255 * (1 - 0.85 * v)))
    g = int(round(255 * (1 - 0.70 * v)))
    b = int(round(255 * (1 - 0.30 * v)))
    return f"#{r:02x}{g:02x}{b:02x}"


def heatmap(values, x_grid, y_grid, title="", xlabel="", ylabel="", logv=False) -> str:
    """Colour grid with ``values[i, j]`` at ``(x_grid[j], y_grid[i])``."""
    V = np.asarray(values, dtype=float)
    x = np.asarray(x_grid, dtype=float)
    y = np.asarray(y_grid, dtype=float)
    T = _transform_y(V, logv)
    finite = T[np.isfinite(T)]
    lo, hi = (float(finite.min()), float(finite.max())) if finite.size else (0.0, 1.0)
    span = hi - lo or 1.0
    fr = _Frame(float(x.min()), float(x.max()), float(y.min()), float(y.max()), False)
    body = _axes(fr, title, xlabel, ylabel)
    cw = fr.pw / max(len(x), 1)
    ch = fr.ph / max(len(y), 1)
    for i in range(len(y)):
        for j in range(len(x)):
            t = T[i, j]
            color = _ramp((t - lo) / span) if np.isfinite(t) else "#ffffff"
            body.append(f'<rect x="{_f(MARGIN_L + j * cw)}" y="{_f(MARGIN_T + fr.ph - (i + 1) * ch)}" '
                        f'width="{_f(cw + 0.3)}" height="{_f(ch + 0.3)}" fill="{color}"/>')
    label = "log10 value" if logv else "value"
    bx = WIDTH - MARGIN_R + 20
    for k in range(11):
        body.append(f'<rect x="{bx}" y="{_f(MARGIN_T + 20 * (10 - k))}" width="16" height="20" '
                    f'fill="{_ramp(k / 10)}"/>')
    body.append(f'<text x="{bx + 22}" y="{MARGIN_T + 10}" font-size="10">{hi:.3g}</text>')
    body.append(f'<text x="{bx + 22}" y="{MARGIN_T + 220}" font-size="10">{lo:.3g}</text>')
    body.append(f'<text x="{bx}" y="{MARGIN_T + 240}" font-size="10">{label}</text>')
    return _wrap(body)


def write_svg(path, svg: str) -> Path:
    path = Path(path)
    path.write_text(svg, encoding="utf-8")
    return path
