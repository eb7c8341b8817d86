"""Hand-written SVG convergence plots: log |(1-s) E_s - rhs| against log (1-s)."""

import math
from xml.sax.saxutils import escape

from . import __version__

W, H = 480, 320
LEFT, RIGHT, TOP, BOTTOM = 64, 16, 28, 44


def _decades(lo, hi):
    return list(range(math.floor(lo), math.ceil(hi) + 1))


def convergence_svg(report):
    pts = []
    for r in report.rows:
        x = 1.0 - r["s"]
        y = abs(r["scaled"] - report.rhs)
        if x > 0 and y > 0 and math.isfinite(y):
            pts.append((math.log10(x), math.log10(y)))
    title = f"config {report.digest}, asymsob {__version__}, verdict {report.verdict}"
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{W}" height="{H}" viewBox="0 0 {W} {H}">',
        f"<!-- config_digest={report.digest} version={__version__} -->",
        f'<rect x="0" y="0" width="{W}" height="{H}" fill="white"/>',
        f'<text x="{W / 2}" y="18" font-family="sans-serif" font-size="12" text-anchor="middle">{escape(title)}</text>',
    ]
    x0, x1 = LEFT, W - RIGHT
    y0, y1 = H - BOTTOM, TOP
    out.append(f'<path d="M{x0} {y1} L{x0} {y0} L{x1} {y0}" stroke="black" fill="none"/>')
    out.append(f'<text x="{(x0 + x1) / 2}" y="{H - 8}" font-family="sans-serif" font-size="11" text-anchor="middle">1 - s (log scale)</text>')
    out.append(f'<text x="14" y="{(y0 + y1) / 2}" font-family="sans-serif" font-size="11" text-anchor="middle" transform="rotate(-90 14 {(y0 + y1) / 2})">|scaled - rhs| (log scale)</text>')
    if not pts:
        out.append(f'<text x="{(x0 + x1) / 2}" y="{(y0 + y1) / 2}" font-family="sans-serif" font-size="12" text-anchor="middle">all deviations are zero</text>')
        out.append("</svg>")
        return "\n".join(out) + "\n"

    xs = [p[0] for p in pts]
    ys = [p[1] for p in pts]
    xlo, xhi = math.floor(min(xs)), math.ceil(max(xs))
    ylo, yhi = math.floor(min(ys)), math.ceil(max(ys))
    xhi = max(xhi, xlo + 1)
    yhi = max(yhi, ylo + 1)

    def sx(v):
        return x0 + (v - xlo) / (xhi - xlo) * (x1 - x0)

    def sy(v):
        return y0 - (v - ylo) / (yhi - ylo) * (y0 - y1)

    for d in _decades(xlo, xhi):
        X = sx(d)
        out.append(f'<line x1="{X:.2f}" y1="{y0}" x2="{X:.2f}" y2="{y0 + 4}" stroke="black"/>')
        out.append(f'<text x="{X:.2f}" y="{y0 + 16}" font-family="sans-serif" font-size="10" text-anchor="middle">1e{d}</text>')
    for d in _decades(ylo, yhi):
        Y = sy(d)
        out.append(f'<line x1="{x0 - 4}" y1="{Y:.2f}" x2="{x0}" y2="{Y:.2f}" stroke="black"/>')
        out.append(f'<text x="{x0 - 6}" y="{Y + 3:.2f}" font-family="sans-serif" font-size="10" text-anchor="end">1e{d}</text>')
    path = " ".join(f"{'M' if i == 0 else 'L'}{sx(a):.2f} {sy(b):.2f}" for i, (a, b) in enumerate(pts))
    out.append(f'<path d="{path}" stroke="steelblue" stroke-width="1.5" fill="none"/>')
    for a, b in pts:
        out.append(f'<circle cx="{sx(a):.2f}" cy="{sy(b):.2f}" r="3" fill="steelblue"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
