"""Static SVG line chart of a bound report: lhs and rhs against N, log y-axis."""

from __future__ import annotations

import math

import numpy as np

from .bounds import BoundReport

WIDTH, HEIGHT = 640, 400
LEFT, RIGHT, TOP, BOTTOM = 70, 20, 40, 50
COLORS = {"lhs": "#1f77b4", "rhs": "#d62728"}


def _c(x: float) -> str:
    return f"{x:.2f}"


def _log_values(v: np.ndarray, floor: float) -> np.ndarray:
    return np.log10(np.maximum(v, floor))


def report_svg(report: BoundReport, title: str | None = None) -> str:
    if len(report) == 0:
        raise ValueError("cannot plot an empty report")
    N = np.asarray(report.N, dtype=float)
    lhs = np.asarray(report.lhs, dtype=float)
    rhs = np.asarray(report.rhs, dtype=float)
    both = np.concatenate([lhs, rhs])
    positive = both[both > 0]
    # nonpositive entries sit on the bottom edge
    floor = float(positive.min()) / 10 if len(positive) else 1e-16
    ylo = math.floor(float(np.min(_log_values(both, floor))))
    yhi = math.ceil(float(np.max(_log_values(both, floor))))
    if yhi == ylo:
        yhi = ylo + 1
    xlo, xhi = float(N.min()), float(N.max())
    if xhi == xlo:
        xhi = xlo + 1

    pw = WIDTH - LEFT - RIGHT
    ph = HEIGHT - TOP - BOTTOM

    def sx(x):
        return LEFT + (x - xlo) / (xhi - xlo) * pw

    def sy(logy):
        return TOP + (yhi - logy) / (yhi - ylo) * ph

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}">',
        f'<rect x="0" y="0" width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<line x1="{LEFT}" y1="{TOP + ph}" x2="{LEFT + pw}" y2="{TOP + ph}" stroke="black"/>',
        f'<line x1="{LEFT}" y1="{TOP}" x2="{LEFT}" y2="{TOP + ph}" stroke="black"/>',
    ]
    for e in range(ylo, yhi + 1):
        y = sy(e)
        out.append(f'<line x1="{LEFT - 5}" y1="{_c(y)}" x2="{LEFT}" y2="{_c(y)}" stroke="black"/>')
        out.append(f'<text x="{LEFT - 8}" y="{_c(y + 4)}" font-size="11" '
                   f'text-anchor="end">1e{e}</text>')
    for x in np.linspace(xlo, xhi, 6):
        px = sx(x)
        out.append(f'<line x1="{_c(px)}" y1="{TOP + ph}" x2="{_c(px)}" y2="{TOP + ph + 5}" '
                   f'stroke="black"/>')
        out.append(f'<text x="{_c(px)}" y="{TOP + ph + 18}" font-size="11" '
                   f'text-anchor="middle">{x:g}</text>')
    out.append(f'<text x="{LEFT + pw / 2:.2f}" y="{HEIGHT - 10}" font-size="12" '
               f'text-anchor="middle">N</text>')
    heading = title or f"{report.theorem or 'bound'}: lhs vs rhs"
    out.append(f'<text x="{WIDTH / 2:.2f}" y="22" font-size="14" '
               f'text-anchor="middle">{heading}</text>')

    for name, vals in (("lhs", lhs), ("rhs", rhs)):
        ly = _log_values(vals, floor)
        pts = " ".join(f"{_c(sx(x))},{_c(sy(y))}" for x, y in zip(N, ly))
        out.append(f'<polyline fill="none" stroke="{COLORS[name]}" stroke-width="1.5" '
                   f'points="{pts}"/>')
    for i, name in enumerate(("lhs", "rhs")):
        y = TOP + 12 + 16 * i
        x0 = LEFT + pw - 80
        out.append(f'<line x1="{x0}" y1="{y}" x2="{x0 + 20}" y2="{y}" '
                   f'stroke="{COLORS[name]}" stroke-width="1.5"/>')
        out.append(f'<text x="{x0 + 26}" y="{y + 4}" font-size="11">{name}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path: str, report: BoundReport, title: str | None = None):
    with open(path, "w") as fh:
        fh.write(report_svg(report, title))
