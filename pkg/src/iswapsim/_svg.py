"""Minimal self-contained SVG rendering for sweep results.

Deliberately dependency-free: line plots (optionally log-scale y) and
heatmaps with a monotone color ramp.  Publication-grade styling is out of
scope; these are for inspecting sweep output.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ValidationError

HEATMAP_SIZE = (800, 640)
LINE_SIZE = (800, 500)

# monotone-lightness ramp anchors (dark blue -> teal -> yellow)
_RAMP = [
    (0.00, (68, 1, 84)),
    (0.25, (59, 82, 139)),
    (0.50, (33, 145, 140)),
    (0.75, (94, 201, 98)),
    (1.00, (253, 231, 37)),
]
_SERIES_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _ramp_color(x: float) -> str:
    x = min(max(x, 0.0), 1.0)
    for (x0, c0), (x1, c1) in zip(_RAMP, _RAMP[1:]):
        if x <= x1:
            f = 0.0 if x1 == x0 else (x - x0) / (x1 - x0)
            r, g, b = (round(a + f * (b_ - a)) for a, b_ in zip(c0, c1))
            return f"#{r:02x}{g:02x}{b:02x}"
    return "#fde725"


def _fmt(x: float) -> str:
    return format(float(x), ".4g")


def _ticks(lo: float, hi: float, n: int = 5) -> list[float]:
    if hi == lo:
        return [lo]
    return list(np.linspace(lo, hi, n))


class _Svg:
    def __init__(self, width, height):
        self.width, self.height = width, height
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
            f'viewBox="0 0 {width} {height}">',
            f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>',
        ]

    def add(self, s):
        self.parts.append(s)

    def text(self, x, y, s, size=12, anchor="middle", rotate=None, bold=False):
        transform = f' transform="rotate(-90 {x} {y})"' if rotate else ""
        weight = ' font-weight="bold"' if bold else ""
        self.add(
            f'<text x="{x}" y="{y}" font-family="sans-serif" font-size="{size}" '
            f'text-anchor="{anchor}"{weight}{transform}>{s}</text>'
        )

    def line(self, x1, y1, x2, y2, color="#000", width=1):
        self.add(
            f'<line x1="{x1:.2f}" y1="{y1:.2f}" x2="{x2:.2f}" y2="{y2:.2f}" '
            f'stroke="{color}" stroke-width="{width}"/>'
        )

    def rect(self, x, y, w, h, fill, stroke="none"):
        self.add(
            f'<rect x="{x:.2f}" y="{y:.2f}" width="{w:.2f}" height="{h:.2f}" '
            f'fill="{fill}" stroke="{stroke}"/>'
        )

    def polyline(self, pts, color, width=1.8):
        coords = " ".join(f"{x:.2f},{y:.2f}" for x, y in pts)
        self.add(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="{width}"/>'
        )

    def tostring(self):
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def render_line(grid, log_y: bool = False, columns: list[str] | None = None) -> str:
    """Line plot of value columns against the single axis."""
    if len(grid.axes) != 1:
        raise ValidationError("line plot requires a 1-axis grid")
    xname = grid.axes[0][0]
    x = grid.axis_values(0)
    names = columns or list(grid.columns)
    if not names:
        raise ValidationError("no value columns to plot")
    svg = _Svg(*LINE_SIZE)
    ml, mr, mt, mb = 80, 150, 40, 55
    pw = svg.width - ml - mr
    ph = svg.height - mt - mb

    series = {n: np.asarray(grid.columns[n], dtype=float) for n in names}
    allv = np.concatenate([v[np.isfinite(v)] for v in series.values()])
    if allv.size == 0:
        raise ValidationError("no finite data to plot")
    if log_y:
        floor = max(np.min(allv[allv > 0], initial=1e-12), 1e-12)
        tr = {n: np.log10(np.maximum(v, floor / 10)) for n, v in series.items()}
        lo = min(np.nanmin(v) for v in tr.values())
        hi = max(np.nanmax(v) for v in tr.values())
    else:
        tr = series
        lo, hi = float(np.nanmin(allv)), float(np.nanmax(allv))
    if hi == lo:
        hi = lo + 1.0

    def sx(v):
        return ml + (v - x[0]) / (x[-1] - x[0] or 1.0) * pw

    def sy(v):
        return mt + (hi - v) / (hi - lo) * ph

    svg.rect(ml, mt, pw, ph, "none", stroke="#333")
    for tx in _ticks(float(x[0]), float(x[-1])):
        svg.line(sx(tx), mt + ph, sx(tx), mt + ph + 5, "#333")
        svg.text(sx(tx), mt + ph + 18, _fmt(tx), size=11)
    for ty in _ticks(lo, hi):
        svg.line(ml - 5, sy(ty), ml, sy(ty), "#333")
        label = _fmt(10**ty) if log_y else _fmt(ty)
        svg.text(ml - 8, sy(ty) + 4, label, size=11, anchor="end")
    svg.text(ml + pw / 2, svg.height - 12, xname, size=13)
    svg.text(20, mt + ph / 2, "value" + (" (log)" if log_y else ""), size=13, rotate=True)
    title = grid.metadata.get("experiment", "sweep")
    svg.text(ml + pw / 2, 22, title, size=14, bold=True)

    for i, name in enumerate(names):
        color = _SERIES_COLORS[i % len(_SERIES_COLORS)]
        pts = [
            (sx(xx), sy(vv))
            for xx, vv in zip(x, tr[name])
            if math.isfinite(vv)
        ]
        if not pts:
            continue
        svg.polyline(pts, color)
        ly = mt + 16 + 18 * i
        svg.line(ml + pw + 10, ly, ml + pw + 32, ly, color, 2)
        svg.text(ml + pw + 38, ly + 4, name, size=11, anchor="start")
    return svg.tostring()


def render_heatmap(grid, column: str | None = None) -> str:
    """Heatmap of one value column over the two axes (800x640)."""
    if len(grid.axes) != 2:
        raise ValidationError("heatmap requires a 2-axis grid")
    if column is None:
        column = next(iter(grid.columns))
    values = grid.column_grid(column).astype(float)
    xname, yname = grid.axes[0][0], grid.axes[1][0]
    xv, yv = grid.axis_values(0), grid.axis_values(1)
    finite = values[np.isfinite(values)]
    if finite.size == 0:
        raise ValidationError("no finite data to plot")
    vmin, vmax = float(finite.min()), float(finite.max())
    span = vmax - vmin or 1.0

    svg = _Svg(*HEATMAP_SIZE)
    ml, mr, mt, mb = 90, 120, 45, 60
    pw = svg.width - ml - mr
    ph = svg.height - mt - mb
    nx, ny = len(xv), len(yv)
    cw, ch = pw / nx, ph / ny
    for i in range(nx):
        for j in range(ny):
            v = values[i, j]
            fill = "#cccccc" if not math.isfinite(v) else _ramp_color((v - vmin) / span)
            # axis 0 runs along x, axis 1 upward along y
            svg.rect(ml + i * cw, mt + (ny - 1 - j) * ch, cw + 0.5, ch + 0.5, fill)
    svg.rect(ml, mt, pw, ph, "none", stroke="#333")
    for tx in _ticks(float(xv[0]), float(xv[-1])):
        px = ml + (tx - xv[0]) / (xv[-1] - xv[0] or 1.0) * pw
        svg.line(px, mt + ph, px, mt + ph + 5, "#333")
        svg.text(px, mt + ph + 18, _fmt(tx), size=11)
    for ty in _ticks(float(yv[0]), float(yv[-1])):
        py = mt + ph - (ty - yv[0]) / (yv[-1] - yv[0] or 1.0) * ph
        svg.line(ml - 5, py, ml, py, "#333")
        svg.text(ml - 8, py + 4, _fmt(ty), size=11, anchor="end")
    svg.text(ml + pw / 2, svg.height - 15, xname, size=13)
    svg.text(24, mt + ph / 2, yname, size=13, rotate=True)
    title = f"{grid.metadata.get('experiment', 'sweep')}: {column}"
    svg.text(ml + pw / 2, 24, title, size=14, bold=True)

    # colorbar with min/max annotation
    cbx, cbw = svg.width - mr + 30, 18
    steps = 64
    for s in range(steps):
        frac = s / (steps - 1)
        svg.rect(cbx, mt + ph * (1 - (s + 1) / steps), cbw, ph / steps + 0.5, _ramp_color(frac))
    svg.rect(cbx, mt, cbw, ph, "none", stroke="#333")
    svg.text(cbx + cbw + 6, mt + 10, f"max {_fmt(vmax)}", size=11, anchor="start")
    svg.text(cbx + cbw + 6, mt + ph, f"min {_fmt(vmin)}", size=11, anchor="start")
    return svg.tostring()
