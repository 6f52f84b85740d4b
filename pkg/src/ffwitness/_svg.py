"""Minimal SVG line charts (no plotting dependency)."""
from __future__ import annotations

import math
from xml.sax.saxutils import escape

WIDTH, HEIGHT, PAD = 480, 320, 48
COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e")


def _scale(values, log):
    vals = [math.log10(v) if log else v for v in values]
    lo, hi = min(vals), max(vals)
    if hi == lo:
        lo, hi = lo - 1.0, hi + 1.0
    return vals, lo, hi


def line_chart(series: dict, title: str = "", xlabel: str = "", ylabel: str = "",
               logx: bool = False, logy: bool = False) -> str:
    """``series`` maps a label to ``(xs, ys)``; nonpositive values are dropped on log axes."""
    clean = {}
    for name, (xs, ys) in series.items():
        pts = [(x, y) for x, y in zip(xs, ys)
               if math.isfinite(x) and math.isfinite(y)
               and (not logx or x > 0) and (not logy or y > 0)]
        if pts:
            clean[name] = pts
    allx = [x for pts in clean.values() for x, _ in pts] or [0.0, 1.0]
    ally = [y for pts in clean.values() for _, y in pts] or [0.0, 1.0]
    _, x0, x1 = _scale(allx, logx)
    _, y0, y1 = _scale(ally, logy)

    def px(x):
        x = math.log10(x) if logx else x
        return PAD + (x - x0) / (x1 - x0) * (WIDTH - 2 * PAD)

    def py(y):
        y = math.log10(y) if logy else y
        return HEIGHT - PAD - (y - y0) / (y1 - y0) * (HEIGHT - 2 * PAD)

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
           f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="11">',
           f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
           f'<line x1="{PAD}" y1="{HEIGHT - PAD}" x2="{WIDTH - PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
           f'<line x1="{PAD}" y1="{PAD}" x2="{PAD}" y2="{HEIGHT - PAD}" stroke="black"/>',
           f'<text x="{WIDTH / 2}" y="{PAD / 2}" text-anchor="middle" font-size="13">{escape(title)}</text>',
           f'<text x="{WIDTH / 2}" y="{HEIGHT - 10}" text-anchor="middle">'
           f'{escape(xlabel)}{" (log)" if logx else ""}</text>',
           f'<text x="12" y="{HEIGHT / 2}" text-anchor="middle" transform="rotate(-90 12 {HEIGHT / 2})">'
           f'{escape(ylabel)}{" (log)" if logy else ""}</text>']
    for k, (name, pts) in enumerate(clean.items()):
        color = COLORS[k % len(COLORS)]
        path = " ".join(f"{px(x):.2f},{py(y):.2f}" for x, y in pts)
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{path}"/>')
        for x, y in pts:
            out.append(f'<circle cx="{px(x):.2f}" cy="{py(y):.2f}" r="2.5" fill="{color}"/>')
        out.append(f'<text x="{WIDTH - PAD + 4 - 120}" y="{PAD + 14 * (k + 1)}" fill="{color}">{escape(name)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
