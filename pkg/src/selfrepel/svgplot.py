"""Dependency-free SVG line plots for quick looks at CSV outputs."""

from __future__ import annotations

import math

_COLORS = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#8c564b", "#e377c2")


def line_plot(path, series, title: str = "", width: int = 720, height: int = 480,
              x_label: str = "", y_label: str = "") -> None:
    """Write a minimal SVG with one polyline per (xs, ys, label) triple."""
    margin = 56
    xs_all = [float(v) for s in series for v in s[0]]
    ys_all = [float(v) for s in series for v in s[1] if math.isfinite(v)]
    if not xs_all or not ys_all:
        raise ValueError("nothing to plot")
    x0, x1 = min(xs_all), max(xs_all)
    y0, y1 = min(ys_all), max(ys_all)
    if x1 == x0:
        x1 = x0 + 1.0
    if y1 == y0:
        y1 = y0 + 1.0

    def sx(x):
        return margin + (x - x0) / (x1 - x0) * (width - 2 * margin)

    def sy(y):
        return height - margin - (y - y0) / (y1 - y0) * (height - 2 * margin)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}">',
        f'<rect width="{width}" height="{height}" fill="white"/>',
        f'<rect x="{margin}" y="{margin}" width="{width - 2 * margin}" '
        f'height="{height - 2 * margin}" fill="none" stroke="#444"/>',
    ]
    if title:
        parts.append(f'<text x="{width / 2:.1f}" y="{margin / 2:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="14">{title}</text>')
    for corner, value in ((x0, "start"), (x1, "end")):
        parts.append(f'<text x="{sx(corner):.1f}" y="{height - margin / 3:.1f}" '
                     f'text-anchor="{value}" font-family="sans-serif" font-size="11">'
                     f'{corner:.4g}</text>')
    for corner in (y0, y1):
        parts.append(f'<text x="{margin - 6:.1f}" y="{sy(corner):.1f}" text-anchor="end" '
                     f'font-family="sans-serif" font-size="11">{corner:.4g}</text>')
    if x_label:
        parts.append(f'<text x="{width / 2:.1f}" y="{height - 8:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12">{x_label}</text>')
    if y_label:
        parts.append(f'<text x="14" y="{height / 2:.1f}" text-anchor="middle" '
                     f'font-family="sans-serif" font-size="12" '
                     f'transform="rotate(-90 14 {height / 2:.1f})">{y_label}</text>')
    for i, entry in enumerate(series):
        xs, ys = entry[0], entry[1]
        label = entry[2] if len(entry) > 2 else ""
        color = _COLORS[i % len(_COLORS)]
        pts = " ".join(f"{sx(float(x)):.2f},{sy(float(y)):.2f}"
                       for x, y in zip(xs, ys) if math.isfinite(float(y)))
        parts.append(f'<polyline points="{pts}" fill="none" stroke="{color}" stroke-width="1.2"/>')
        if label:
            parts.append(f'<text x="{width - margin - 4}" y="{margin + 16 + 14 * i}" '
                         f'text-anchor="end" font-family="sans-serif" font-size="11" '
                         f'fill="{color}">{label}</text>')
    parts.append("</svg>")
    with open(path, "w") as fh:
        fh.write("\n".join(parts) + "\n")
