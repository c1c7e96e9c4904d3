"""Tiny SVG line plots (path elements only, no renderer dependency).

Convenience output for eyeballing trajectories and scans; never a source
of truth. Numbers are formatted to fixed precision so identical inputs
yield identical bytes.
"""

from __future__ import annotations

import math

_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b")
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 64, 16, 28, 44


def _ticks(lo, hi, n=5):
    if not (hi > lo):
        hi = lo + 1.0
    raw = (hi - lo) / max(n - 1, 1)
    mag = 10.0 ** math.floor(math.log10(raw))
    for mult in (1.0, 2.0, 2.5, 5.0, 10.0):
        step = mult * mag
        if step >= raw:
            break
    start = math.ceil(lo / step) * step
    out = []
    t = start
    while t <= hi + 1e-9 * step:
        out.append(0.0 if abs(t) < 1e-12 * step else t)
        t += step
    return out


def _fmt(x):
    return f"{x:.6g}"


def line_plot(series, title="", xlabel="", ylabel="", width=640, height=420):
    """series: iterable of (label, xs, ys) or (label, xs, ys, yerr)."""
    series = [tuple(s) for s in series]
    xs_all = [float(x) for s in series for x in s[1]]
    ys_all = [float(y) for s in series for y in s[2]]
    for s in series:
        if len(s) > 3 and s[3] is not None:
            ys_all += [float(y) + float(e) for y, e in zip(s[2], s[3])]
            ys_all += [float(y) - float(e) for y, e in zip(s[2], s[3])]
    x_lo, x_hi = min(xs_all), max(xs_all)
    y_lo, y_hi = min(ys_all), max(ys_all)
    if x_hi == x_lo:
        x_hi = x_lo + 1.0
    if y_hi == y_lo:
        y_hi = y_lo + 1.0
    pad = 0.04 * (y_hi - y_lo)
    y_lo, y_hi = y_lo - pad, y_hi + pad

    plot_w = width - _MARGIN_L - _MARGIN_R
    plot_h = height - _MARGIN_T - _MARGIN_B

    def px(x):
        return _MARGIN_L + plot_w * (x - x_lo) / (x_hi - x_lo)

    def py(y):
        return _MARGIN_T + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo))

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" '
           f'height="{height}" viewBox="0 0 {width} {height}">',
           f'<rect width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{width / 2:.1f}" y="18" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="13">{title}</text>')

    # frame and ticks
    out.append(f'<path d="M{_MARGIN_L} {_MARGIN_T} V{_MARGIN_T + plot_h} '
               f'H{_MARGIN_L + plot_w}" fill="none" stroke="black"/>')
    for t in _ticks(x_lo, x_hi):
        x = px(t)
        out.append(f'<path d="M{x:.1f} {_MARGIN_T + plot_h:.1f} v5" '
                   f'stroke="black"/>')
        out.append(f'<text x="{x:.1f}" y="{_MARGIN_T + plot_h + 18:.1f}" '
                   f'text-anchor="middle" font-family="sans-serif" '
                   f'font-size="11">{_fmt(t)}</text>')
    for t in _ticks(y_lo, y_hi):
        y = py(t)
        out.append(f'<path d="M{_MARGIN_L} {y:.1f} h-5" stroke="black"/>')
        out.append(f'<text x="{_MARGIN_L - 8}" y="{y + 4:.1f}" '
                   f'text-anchor="end" font-family="sans-serif" '
                   f'font-size="11">{_fmt(t)}</text>')
    if xlabel:
        out.append(f'<text x="{_MARGIN_L + plot_w / 2:.1f}" '
                   f'y="{height - 8}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12">{xlabel}</text>')
    if ylabel:
        x0, y0 = 14, _MARGIN_T + plot_h / 2
        out.append(f'<text x="{x0}" y="{y0:.1f}" text-anchor="middle" '
                   f'font-family="sans-serif" font-size="12" '
                   f'transform="rotate(-90 {x0} {y0:.1f})">{ylabel}</text>')

    for i, s in enumerate(series):
        label, xs, ys = s[0], s[1], s[2]
        yerr = s[3] if len(s) > 3 else None
        color = _PALETTE[i % len(_PALETTE)]
        pts = " ".join(f"{'M' if j == 0 else 'L'}{px(float(x)):.2f} "
                       f"{py(float(y)):.2f}"
                       for j, (x, y) in enumerate(zip(xs, ys)))
        out.append(f'<path d="{pts}" fill="none" stroke="{color}" '
                   f'stroke-width="1.5"/>')
        if yerr is not None:
            for x, y, e in zip(xs, ys, yerr):
                xp, lo, hi = px(float(x)), py(float(y) - float(e)), \
                    py(float(y) + float(e))
                out.append(f'<path d="M{xp:.2f} {lo:.2f} V{hi:.2f}" '
                           f'stroke="{color}" stroke-width="1"/>')
        ty = _MARGIN_T + 14 + 16 * i
        tx = _MARGIN_L + plot_w - 8
        out.append(f'<text x="{tx}" y="{ty}" text-anchor="end" '
                   f'font-family="sans-serif" font-size="11" '
                   f'fill="{color}">{label}</text>')

    out.append("</svg>")
    return "\n".join(out) + "\n"
