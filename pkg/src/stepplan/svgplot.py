"""Minimal SVG line charts for convergence curves, no plotting dependency.

Emits SVG 1.1 by hand with fixed-precision coordinates so identical inputs
produce byte-identical files.  The y axis is log-scaled by default (errors
span many decades); non-positive values are clamped to ``Y_FLOOR`` so
exactly-converged runs still plot.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence, Tuple

PALETTE = [
    "#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
]

WIDTH, HEIGHT = 760, 480
MARGIN_L, MARGIN_R, MARGIN_T, MARGIN_B = 70, 170, 20, 45
Y_FLOOR = 1e-16


def _f(x: float) -> str:
    return f"{x:.2f}"


def _nice_linear_ticks(lo: float, hi: float, target: int = 6) -> list:
    if hi <= lo:
        return [lo]
    raw = (hi - lo) / target
    mag = 10 ** math.floor(math.log10(raw))
    for mult in (1, 2, 5, 10):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(t)
        t += step
    return ticks


def render_svg(series: Sequence[Tuple[str, Iterable[float], Iterable[float]]],
               path, log_y: bool = True, x_label: str = "gradient evaluations",
               y_label: str = "error") -> None:
    """Write a line chart of (label, xs, ys) series to ``path``.

    With ``log_y`` the y coordinates are log10-scaled and decade ticks are
    drawn; values below ``Y_FLOOR`` are clamped before scaling.
    """
    prepared = []
    for label, xs, ys in series:
        xs = [float(x) for x in xs]
        ys = [float(y) for y in ys]
        if len(xs) != len(ys):
            raise ValueError(f"series {label!r} has mismatched lengths")
        if log_y:
            ys = [math.log10(max(y, Y_FLOOR)) for y in ys]
        prepared.append((label, xs, ys))
    points = [(x, y) for _, xs, ys in prepared for x, y in zip(xs, ys)]
    if points:
        x_lo = min(p[0] for p in points)
        x_hi = max(p[0] for p in points)
        y_lo = min(p[1] for p in points)
        y_hi = max(p[1] for p in points)
    else:
        x_lo, x_hi, y_lo, y_hi = 0.0, 1.0, 0.0, 1.0
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0

    plot_w = WIDTH - MARGIN_L - MARGIN_R
    plot_h = HEIGHT - MARGIN_T - MARGIN_B

    def px(x: float) -> float:
        return MARGIN_L + (x - x_lo) / (x_hi - x_lo) * plot_w

    def py(y: float) -> float:
        return MARGIN_T + (y_hi - y) / (y_hi - y_lo) * plot_h

    out = []
    out.append('<?xml version="1.0" encoding="UTF-8"?>')
    out.append(
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
        f'width="{WIDTH}" height="{HEIGHT}" viewBox="0 0 {WIDTH} {HEIGHT}">'
    )
    out.append(f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>')
    axis = (
        f'M {_f(MARGIN_L)} {_f(MARGIN_T)} L {_f(MARGIN_L)} {_f(MARGIN_T + plot_h)} '
        f'L {_f(MARGIN_L + plot_w)} {_f(MARGIN_T + plot_h)}'
    )
    out.append(f'<path d="{axis}" stroke="black" fill="none" stroke-width="1"/>')

    if log_y:
        y_ticks = range(math.ceil(y_lo - 1e-9), math.floor(y_hi + 1e-9) + 1)
        y_tick_items = [(float(t), f"1e{t:d}") for t in y_ticks]
    else:
        y_tick_items = [(t, f"{t:g}") for t in _nice_linear_ticks(y_lo, y_hi)]
    for t, text in y_tick_items:
        y = py(t)
        out.append(
            f'<line x1="{_f(MARGIN_L - 4)}" y1="{_f(y)}" x2="{_f(MARGIN_L)}" y2="{_f(y)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_f(MARGIN_L - 8)}" y="{_f(y + 3)}" font-size="11" '
            f'font-family="sans-serif" text-anchor="end">{text}</text>'
        )
    for t in _nice_linear_ticks(x_lo, x_hi):
        x = px(t)
        bottom = MARGIN_T + plot_h
        out.append(
            f'<line x1="{_f(x)}" y1="{_f(bottom)}" x2="{_f(x)}" y2="{_f(bottom + 4)}" stroke="black"/>'
        )
        out.append(
            f'<text x="{_f(x)}" y="{_f(bottom + 16)}" font-size="11" '
            f'font-family="sans-serif" text-anchor="middle">{t:g}</text>'
        )
    out.append(
        f'<text x="{_f(MARGIN_L + plot_w / 2)}" y="{_f(HEIGHT - 8)}" font-size="12" '
        f'font-family="sans-serif" text-anchor="middle">{x_label}</text>'
    )
    out.append(
        f'<text x="14" y="{_f(MARGIN_T + plot_h / 2)}" font-size="12" font-family="sans-serif" '
        f'text-anchor="middle" transform="rotate(-90 14 {_f(MARGIN_T + plot_h / 2)})">{y_label}</text>'
    )

    for idx, (label, xs, ys) in enumerate(prepared):
        color = PALETTE[idx % len(PALETTE)]
        if xs:
            coords = " ".join(f"{_f(px(x))},{_f(py(y))}" for x, y in zip(xs, ys))
            out.append(f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.5"/>')
        ly = MARGIN_T + 14 + 16 * idx
        lx = MARGIN_L + plot_w + 12
        out.append(
            f'<line x1="{_f(lx)}" y1="{_f(ly - 4)}" x2="{_f(lx + 18)}" y2="{_f(ly - 4)}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{_f(lx + 24)}" y="{_f(ly)}" font-size="11" font-family="sans-serif">{label}</text>'
        )
    out.append("</svg>")
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(out) + "\n")


def render_traces(labeled_traces, path, log_y: bool = True) -> None:
    """Plot (label, Trace) pairs as error versus gradient evaluations."""
    series = []
    for label, trace in labeled_traces:
        xs = [r.grad_evals for r in trace.records]
        ys = [r.error for r in trace.records]
        series.append((label, xs, ys))
    render_svg(series, path, log_y=log_y)
