"""Static SVG figures written directly, with deterministic bytes.

Two figure kinds mirror the study outputs: estimated-direction overlays
(optionally against the true directions) and grouped boxplots of the
subspace distances per dimension and method.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

_WIDTH, _HEIGHT = 640, 420
_MARGIN = dict(left=60, right=20, top=30, bottom=45)
_COLORS = ["#c02020", "#2050c0", "#208040", "#806010", "#602080", "#106070"]


def _fmt(x: float) -> str:
    return format(float(x), ".2f")


def _tick_label(x: float) -> str:
    return format(float(x), ".3g")


class _Canvas:
    """Accumulates SVG elements over a data-coordinate plot area."""

    def __init__(self, x_range, y_range, title):
        self.parts = [
            f'<svg xmlns="http://www.w3.org/2000/svg" width="{_WIDTH}" '
            f'height="{_HEIGHT}" viewBox="0 0 {_WIDTH} {_HEIGHT}">',
            f'<rect width="{_WIDTH}" height="{_HEIGHT}" fill="white"/>',
            f'<text x="{_WIDTH / 2}" y="18" text-anchor="middle" '
            f'font-family="sans-serif" font-size="14">{title}</text>',
        ]
        x_lo, x_hi = x_range
        y_lo, y_hi = y_range
        if x_hi <= x_lo:
            x_hi = x_lo + 1.0
        if y_hi <= y_lo:
            y_hi = y_lo + 1.0
        pad = 0.05 * (y_hi - y_lo)
        self.x_lo, self.x_hi = x_lo, x_hi
        self.y_lo, self.y_hi = y_lo - pad, y_hi + pad

    def x(self, v) -> float:
        span = _WIDTH - _MARGIN["left"] - _MARGIN["right"]
        return _MARGIN["left"] + (v - self.x_lo) / (self.x_hi - self.x_lo) * span

    def y(self, v) -> float:
        span = _HEIGHT - _MARGIN["top"] - _MARGIN["bottom"]
        return _HEIGHT - _MARGIN["bottom"] - (v - self.y_lo) / (self.y_hi - self.y_lo) * span

    def axes(self, x_ticks, y_ticks, x_label="", y_label=""):
        x0, x1 = _MARGIN["left"], _WIDTH - _MARGIN["right"]
        y0, y1 = _HEIGHT - _MARGIN["bottom"], _MARGIN["top"]
        self.parts.append(
            f'<path d="M {x0} {y1} L {x0} {y0} L {x1} {y0}" '
            f'stroke="black" fill="none" stroke-width="1"/>'
        )
        for tick, label in x_ticks:
            px = self.x(tick)
            self.parts.append(
                f'<line x1="{_fmt(px)}" y1="{y0}" x2="{_fmt(px)}" y2="{y0 + 4}" stroke="black"/>'
            )
            self.parts.append(
                f'<text x="{_fmt(px)}" y="{y0 + 17}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="11">{label}</text>'
            )
        for tick in y_ticks:
            py = self.y(tick)
            self.parts.append(
                f'<line x1="{x0 - 4}" y1="{_fmt(py)}" x2="{x0}" y2="{_fmt(py)}" stroke="black"/>'
            )
            self.parts.append(
                f'<text x="{x0 - 7}" y="{_fmt(py + 3.5)}" text-anchor="end" '
                f'font-family="sans-serif" font-size="11">{_tick_label(tick)}</text>'
            )
        if x_label:
            self.parts.append(
                f'<text x="{(x0 + x1) / 2}" y="{_HEIGHT - 8}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12">{x_label}</text>'
            )
        if y_label:
            self.parts.append(
                f'<text x="14" y="{(y0 + y1) / 2}" text-anchor="middle" '
                f'font-family="sans-serif" font-size="12" '
                f'transform="rotate(-90 14 {(y0 + y1) / 2})">{y_label}</text>'
            )

    def polyline(self, xs, ys, color, width=1.5, dashed=False):
        pts = " ".join(f"{_fmt(self.x(a))},{_fmt(self.y(b))}" for a, b in zip(xs, ys))
        dash = ' stroke-dasharray="6,4"' if dashed else ""
        self.parts.append(
            f'<polyline points="{pts}" fill="none" stroke="{color}" '
            f'stroke-width="{width}"{dash}/>'
        )

    def box(self, x_center, half_width, five_number, color):
        lo, q1, med, q3, hi = five_number
        xl, xr = self.x(x_center - half_width), self.x(x_center + half_width)
        xc = self.x(x_center)
        self.parts.append(
            f'<rect x="{_fmt(xl)}" y="{_fmt(self.y(q3))}" width="{_fmt(xr - xl)}" '
            f'height="{_fmt(self.y(q1) - self.y(q3))}" fill="{color}" '
            f'fill-opacity="0.35" stroke="{color}"/>'
        )
        for a, b in ((q3, hi), (lo, q1)):
            self.parts.append(
                f'<line x1="{_fmt(xc)}" y1="{_fmt(self.y(a))}" x2="{_fmt(xc)}" '
                f'y2="{_fmt(self.y(b))}" stroke="{color}"/>'
            )
        for v in (lo, hi):
            self.parts.append(
                f'<line x1="{_fmt(self.x(x_center - half_width / 2))}" '
                f'y1="{_fmt(self.y(v))}" '
                f'x2="{_fmt(self.x(x_center + half_width / 2))}" '
                f'y2="{_fmt(self.y(v))}" stroke="{color}"/>'
            )
        self.parts.append(
            f'<line x1="{_fmt(xl)}" y1="{_fmt(self.y(med))}" x2="{_fmt(xr)}" '
            f'y2="{_fmt(self.y(med))}" stroke="{color}" stroke-width="2"/>'
        )

    def legend(self, entries):
        x0 = _WIDTH - _MARGIN["right"] - 130
        y0 = _MARGIN["top"] + 8
        for i, (label, color) in enumerate(entries):
            y = y0 + 16 * i
            self.parts.append(
                f'<line x1="{x0}" y1="{y}" x2="{x0 + 22}" y2="{y}" '
                f'stroke="{color}" stroke-width="2"/>'
            )
            self.parts.append(
                f'<text x="{x0 + 28}" y="{y + 4}" font-family="sans-serif" '
                f'font-size="11">{label}</text>'
            )

    def render(self) -> str:
        return "\n".join(self.parts + ["</svg>"]) + "\n"


def _spread_ticks(lo, hi, count=5):
    return list(np.linspace(lo, hi, count))


def direction_overlay_svg(path, grid, directions, truths=None, title="Estimated directions"):
    """Overlay estimated direction curves, optionally with the true ones dashed."""
    rows = [np.asarray(d, dtype=float) for d in directions]
    truth_rows = [np.asarray(t, dtype=float) for t in (truths or [])]
    stack = np.concatenate([np.ravel(r) for r in rows + truth_rows])
    canvas = _Canvas((0.0, 1.0), (stack.min(), stack.max()), title)
    canvas.axes(
        [(v, _tick_label(v)) for v in _spread_ticks(0, 1)],
        _spread_ticks(stack.min(), stack.max()),
        x_label="t",
        y_label="direction value",
    )
    legend = []
    for j, row in enumerate(rows):
        color = _COLORS[j % len(_COLORS)]
        canvas.polyline(grid.points, row, color)
        legend.append((f"estimate {j + 1}", color))
    for j, row in enumerate(truth_rows):
        color = _COLORS[j % len(_COLORS)]
        canvas.polyline(grid.points, row, color, width=1.0, dashed=True)
        legend.append((f"truth {j + 1}", color))
    canvas.legend(legend)
    Path(path).write_text(canvas.render())


def benchmark_boxplot_svg(path, results, title="Subspace distance"):
    """Grouped boxplots: one group per dimension D, one box per method."""
    results = list(results)
    methods = sorted({r.method for r in results})
    dims = sorted({r.n_components for r in results})
    finite = np.concatenate([r.distances for r in results if r.distances.size] or [np.zeros(1)])
    canvas = _Canvas((-0.5, len(dims) - 0.5), (0.0, max(float(finite.max()), 0.1)), title)
    canvas.axes(
        [(i, f"D={d}") for i, d in enumerate(dims)],
        _spread_ticks(0.0, max(float(finite.max()), 0.1)),
        x_label="truncation dimension",
        y_label="Hilbert-Schmidt distance",
    )
    group_width = 0.8
    box_width = group_width / max(len(methods), 1)
    for mi, method in enumerate(methods):
        color = _COLORS[mi % len(_COLORS)]
        for di, dim in enumerate(dims):
            matching = [
                r for r in results if r.method == method and r.n_components == dim
            ]
            if not matching or not matching[0].distances.size:
                continue
            center = di - group_width / 2 + (mi + 0.5) * box_width
            canvas.box(center, box_width * 0.4, matching[0].five_number, color)
    canvas.legend([(m, _COLORS[i % len(_COLORS)]) for i, m in enumerate(methods)])
    Path(path).write_text(canvas.render())
