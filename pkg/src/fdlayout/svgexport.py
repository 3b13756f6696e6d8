"""Deterministic SVG rendering of a layout: lines for edges, circles
for vertices, viewBox fitted to the layout AABB with a 5% margin."""

from __future__ import annotations

import io
import math
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from .graph import Graph
from .layout import Layout


@dataclass(frozen=True)
class SvgStyle:
    edge_color: str = "#4a4a4a"
    edge_width_frac: float = 0.001  # of the AABB diagonal
    vertex_color: str = "#c0392b"
    vertex_radius_frac: float = 0.003  # of the AABB diagonal
    background: str | None = "#ffffff"


def render_svg(layout: Layout, graph: Graph, style: SvgStyle = SvgStyle()) -> str:
    pos = layout.positions
    if not np.isfinite(pos).all():
        raise ValueError("layout contains non-finite positions")
    if graph.vertex_count != layout.vertex_count:
        raise ValueError("graph and layout sizes differ")
    lo = pos.min(axis=0)
    hi = pos.max(axis=0)
    span = hi - lo
    diag = math.hypot(float(span[0]), float(span[1]))
    if diag == 0.0:
        diag = 1.0
    margin_x = max(float(span[0]), diag) * 0.05
    margin_y = max(float(span[1]), diag) * 0.05
    vb_x = float(lo[0]) - margin_x
    vb_y = float(lo[1]) - margin_y
    vb_w = float(span[0]) + 2 * margin_x
    vb_h = float(span[1]) + 2 * margin_y
    radius = style.vertex_radius_frac * diag
    stroke = max(style.edge_width_frac * diag, radius * 0.2)

    buf = io.StringIO()
    buf.write('<?xml version="1.0" encoding="UTF-8"?>\n')
    buf.write(
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="{vb_x:.6g} {vb_y:.6g} {vb_w:.6g} {vb_h:.6g}">\n'
    )
    if style.background is not None:
        buf.write(
            f'<rect x="{vb_x:.6g}" y="{vb_y:.6g}" width="{vb_w:.6g}" '
            f'height="{vb_h:.6g}" fill="{style.background}"/>\n'
        )
    buf.write(
        f'<g stroke="{style.edge_color}" stroke-width="{stroke:.6g}" '
        f'stroke-linecap="round">\n'
    )
    for u, v in graph.edges.tolist():
        x1, y1 = pos[u]
        x2, y2 = pos[v]
        buf.write(
            f'<line x1="{x1:.6g}" y1="{y1:.6g}" x2="{x2:.6g}" y2="{y2:.6g}"/>\n'
        )
    buf.write("</g>\n")
    buf.write(f'<g fill="{style.vertex_color}">\n')
    for x, y in pos.tolist():
        buf.write(f'<circle cx="{x:.6g}" cy="{y:.6g}" r="{radius:.6g}"/>\n')
    buf.write("</g>\n</svg>\n")
    return buf.getvalue()


def export_svg(
    layout: Layout,
    graph: Graph,
    path_or_buf: str | TextIO,
    style: SvgStyle = SvgStyle(),
) -> None:
    text = render_svg(layout, graph, style)
    if isinstance(path_or_buf, str):
        with open(path_or_buf, "w") as fh:
            fh.write(text)
    else:
        path_or_buf.write(text)
