"""Tiny deterministic SVG line plots.

No plotting dependency: experiments only need a handful of log-log curves,
and writing the SVG ourselves guarantees byte-identical output for identical
inputs, which the replot command relies on.
"""

from __future__ import annotations

import math

__all__ = ["line_plot"]

WIDTH, HEIGHT = 720, 480
ML, MR, MT, MB = 78, 24, 42, 58
PALETTE = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"]


def _fmt(v: float) -> str:
    return f"{v:.2f}"


def _nice_ticks(lo: float, hi: float, target: int = 5):
    if not (hi > lo):
        hi = lo + 1.0
    raw = (hi - lo) / target
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        if raw <= mult * mag:
            step = mult * mag
            break
    first = math.ceil(lo / step) * step
    ticks = []
    t = first
    while t <= hi + 1e-9 * step:
        ticks.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return ticks


def _log_ticks(lo: float, hi: float):
    a = math.floor(math.log10(lo))
    b = math.ceil(math.log10(hi))
    return [10.0 ** e for e in range(a, b + 1)]


def _tick_label(v: float) -> str:
    return f"{v:g}"


def line_plot(
    path: str,
    series,
    title: str = "",
    xlabel: str = "",
    ylabel: str = "",
    xlog: bool = False,
    ylog: bool = False,
):
    """Write a line plot to `path`.

    `series` is a list of (label, xs, ys) with matching-length sequences;
    non-finite points (and non-positive ones on log axes) are dropped.
    """
    cleaned = []
    for label, xs, ys in series:
        pts = [
            (float(x), float(y))
            for x, y in zip(xs, ys)
            if math.isfinite(x) and math.isfinite(y)
            and (not xlog or x > 0) and (not ylog or y > 0)
        ]
        if pts:
            cleaned.append((label, pts))
    if not cleaned:
        raise ValueError("nothing to plot")

    def tx(v):
        return math.log10(v) if xlog else v

    def ty(v):
        return math.log10(v) if ylog else v

    all_x = [p[0] for _, pts in cleaned for p in pts]
    all_y = [p[1] for _, pts in cleaned for p in pts]
    x_lo, x_hi = min(all_x), max(all_x)
    y_lo, y_hi = min(all_y), max(all_y)
    if xlog:
        xt = _log_ticks(x_lo, x_hi)
        u_lo, u_hi = math.log10(xt[0]), math.log10(xt[-1])
    else:
        xt = _nice_ticks(x_lo, x_hi)
        pad = 0.02 * (x_hi - x_lo or 1.0)
        u_lo, u_hi = x_lo - pad, x_hi + pad
    if ylog:
        yt = _log_ticks(y_lo, y_hi)
        v_lo, v_hi = math.log10(yt[0]), math.log10(yt[-1])
    else:
        yt = _nice_ticks(y_lo, y_hi)
        pad = 0.05 * (y_hi - y_lo or 1.0)
        v_lo, v_hi = y_lo - pad, y_hi + pad
    if u_hi <= u_lo:
        u_hi = u_lo + 1.0
    if v_hi <= v_lo:
        v_hi = v_lo + 1.0

    pw = WIDTH - ML - MR
    ph = HEIGHT - MT - MB

    def px(v):
        return ML + (tx(v) - u_lo) / (u_hi - u_lo) * pw

    def py(v):
        return MT + ph - (ty(v) - v_lo) / (v_hi - v_lo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<rect x="{ML}" y="{MT}" width="{pw}" height="{ph}" fill="none" '
        f'stroke="#333333" stroke-width="1"/>',
    ]
    font = 'font-family="Helvetica,Arial,sans-serif"'
    for v in xt:
        if not (u_lo - 1e-9 <= tx(v) <= u_hi + 1e-9):
            continue
        x = px(v)
        out.append(
            f'<line x1="{_fmt(x)}" y1="{MT}" x2="{_fmt(x)}" y2="{MT + ph}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{_fmt(x)}" y="{MT + ph + 18}" {font} font-size="12" '
            f'text-anchor="middle">{_tick_label(v)}</text>'
        )
    for v in yt:
        if not (v_lo - 1e-9 <= ty(v) <= v_hi + 1e-9):
            continue
        y = py(v)
        out.append(
            f'<line x1="{ML}" y1="{_fmt(y)}" x2="{ML + pw}" y2="{_fmt(y)}" '
            f'stroke="#dddddd" stroke-width="1"/>'
        )
        out.append(
            f'<text x="{ML - 8}" y="{_fmt(y + 4)}" {font} font-size="12" '
            f'text-anchor="end">{_tick_label(v)}</text>'
        )
    for i, (label, pts) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        coords = " ".join(f"{_fmt(px(x))},{_fmt(py(y))}" for x, y in pts)
        out.append(
            f'<polyline points="{coords}" fill="none" stroke="{color}" stroke-width="1.8"/>'
        )
    lx, lyy = ML + pw - 150, MT + 12
    for i, (label, _) in enumerate(cleaned):
        color = PALETTE[i % len(PALETTE)]
        y = lyy + 18 * i
        out.append(
            f'<line x1="{lx}" y1="{y}" x2="{lx + 24}" y2="{y}" '
            f'stroke="{color}" stroke-width="2"/>'
        )
        out.append(
            f'<text x="{lx + 30}" y="{y + 4}" {font} font-size="12">{label}</text>'
        )
    if title:
        out.append(
            f'<text x="{WIDTH // 2}" y="24" {font} font-size="15" '
            f'text-anchor="middle">{title}</text>'
        )
    if xlabel:
        out.append(
            f'<text x="{ML + pw // 2}" y="{HEIGHT - 14}" {font} font-size="13" '
            f'text-anchor="middle">{xlabel}</text>'
        )
    if ylabel:
        out.append(
            f'<text x="20" y="{MT + ph // 2}" {font} font-size="13" '
            f'text-anchor="middle" transform="rotate(-90 20 {MT + ph // 2})">{ylabel}</text>'
        )
    out.append("</svg>")
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
