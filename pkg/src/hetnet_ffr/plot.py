"""Minimal standalone SVG line plots from the CSV files the CLI writes.

The CSV is the artifact of record; the SVG is a convenience view with no
pixel-exactness contract.
"""

import csv
import math
from pathlib import Path
from xml.sax.saxutils import escape

X_LABEL = "SINR threshold (dB)"
Y_LABEL = "Coverage probability"
PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")
DASHES = ("", "6,3", "2,3", "8,3,2,3")


def _float(s):
    try:
        return float(s)
    except (TypeError, ValueError):
        return math.nan


def read_curves(path):
    """``[(label, xs, ys)]`` from an analyze/simulate/compare/sweep CSV."""
    path = Path(path)
    with open(path, newline="", encoding="utf-8") as fh:
        rows = list(csv.DictReader(fh))
        fields = list(rows[0].keys()) if rows else []
    if not rows or "T_dB" not in fields:
        raise ValueError(f"{path}: expected a CSV with a T_dB column")
    stem = path.stem
    if "param_value" in fields:
        groups = {}
        for r in rows:
            groups.setdefault(r["param_value"], []).append(r)
        return [(f"{stem} {v}", [_float(r["T_dB"]) for r in g], [_float(r["coverage"]) for r in g])
                for v, g in groups.items()]
    cols = [c for c in fields if c == "coverage" or c.endswith("_coverage")]
    if not cols:
        raise ValueError(f"{path}: no coverage column")
    xs = [_float(r["T_dB"]) for r in rows]
    return [(stem if c == "coverage" else f"{stem} {c[:-9]}", xs, [_float(r[c]) for r in rows]) for c in cols]


def _ticks(lo, hi, target=6):
    span = hi - lo
    raw = span / target
    mag = 10.0 ** math.floor(math.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=10 * mag)
    first = math.ceil(lo / step - 1e-9) * step
    out = []
    v = first
    while v <= hi + 1e-9 * span:
        out.append(round(v, 10))
        v += step
    return out


def svg_plot(curves, width=720, height=480, title=None):
    """Render ``[(label, xs, ys)]`` as an SVG document string."""
    ml, mr, mt, mb = 70, 190, 30 if title else 15, 55
    pw, ph = width - ml - mr, height - mt - mb
    xs_all = [x for _, xs, _ in curves for x in xs if math.isfinite(x)]
    if not xs_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    if x1 == x0:
        x0, x1 = x0 - 1.0, x1 + 1.0

    def sx(x):
        return ml + (x - x0) / (x1 - x0) * pw

    def sy(y):
        return mt + (1.0 - y) * ph

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
           f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
           f'<rect x="0" y="0" width="{width}" height="{height}" fill="white"/>']
    if title:
        out.append(f'<text x="{ml + pw / 2:.1f}" y="18" text-anchor="middle" font-size="14">{escape(title)}</text>')
    out.append(f'<rect x="{ml}" y="{mt}" width="{pw}" height="{ph}" fill="none" stroke="black"/>')
    for t in _ticks(x0, x1):
        X = sx(t)
        out.append(f'<line x1="{X:.1f}" y1="{mt}" x2="{X:.1f}" y2="{mt + ph}" stroke="#ddd"/>')
        out.append(f'<text x="{X:.1f}" y="{mt + ph + 16}" text-anchor="middle">{t:g}</text>')
    for i in range(6):
        y = i / 5
        Y = sy(y)
        out.append(f'<line x1="{ml}" y1="{Y:.1f}" x2="{ml + pw}" y2="{Y:.1f}" stroke="#ddd"/>')
        out.append(f'<text x="{ml - 6}" y="{Y + 4:.1f}" text-anchor="end">{y:.1f}</text>')
    out.append(f'<text x="{ml + pw / 2:.1f}" y="{height - 12}" text-anchor="middle">{X_LABEL}</text>')
    out.append(f'<text x="18" y="{mt + ph / 2:.1f}" text-anchor="middle" '
               f'transform="rotate(-90 18 {mt + ph / 2:.1f})">{Y_LABEL}</text>')
    for i, (label, xs, ys) in enumerate(curves):
        color = PALETTE[i % len(PALETTE)]
        dash = DASHES[(i // len(PALETTE)) % len(DASHES)]
        pts = " ".join(f"{sx(x):.2f},{sy(min(max(y, 0.0), 1.0)):.2f}"
                       for x, y in zip(xs, ys) if math.isfinite(x) and math.isfinite(y))
        dash_attr = f' stroke-dasharray="{dash}"' if dash else ""
        out.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.8"{dash_attr} points="{pts}">'
                   f'<title>{escape(label)}</title></polyline>')
        ly = mt + 14 + 18 * i
        lx = ml + pw + 12
        out.append(f'<line x1="{lx}" y1="{ly - 4}" x2="{lx + 22}" y2="{ly - 4}" stroke="{color}" '
                   f'stroke-width="1.8"{dash_attr}/>')
        out.append(f'<text x="{lx + 28}" y="{ly}">{escape(label)}</text>')
    out.append("</svg>")
    return "\n".join(out) + "\n"
