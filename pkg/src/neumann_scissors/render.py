"""SVG pictures of a dissection: the cut parallelogram next to the assembled rectangle."""
from __future__ import annotations

import xml.etree.ElementTree as ET

from .geometry import Polygon
from .scissors import Dissection

PALETTE = ["#4e79a7", "#f28e2b", "#e15759", "#76b7b2", "#59a14f",
           "#edc948", "#b07aa1", "#ff9da7", "#9c755f", "#bab0ac"]


def _points(poly: Polygon, dx: float, scale: float, top: float, margin: float) -> str:
    # flip y so the base sits at the bottom of the picture
    return " ".join(f"{margin + (q.x + dx) * scale:.3f},{margin + (top - q.y) * scale:.3f}"
                    for q in poly.vertices)


def _centroid(poly: Polygon) -> tuple[float, float]:
    n = len(poly.vertices)
    return (sum(q.x for q in poly.vertices) / n, sum(q.y for q in poly.vertices) / n)


def dissection_svg(d: Dissection, width: int = 900) -> str:
    x0, _, x1, top = d.source.bbox()
    gap = 0.15 * (x1 - x0 + d.target.w)
    target_dx = x1 + gap  # target panel placed to the right of the source
    span = target_dx + d.target.w - min(x0, 0.0)
    margin = 20.0
    scale = (width - 2 * margin) / span
    height = int(round(top * scale + 2 * margin + 20))

    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", width=str(width),
                     height=str(height), viewBox=f"0 0 {width} {height}")
    src = ET.SubElement(svg, "g", id="source")
    tgt = ET.SubElement(svg, "g", id="target")
    font = max(8.0, min(14.0, 0.25 * scale * d.target.w))
    for i, piece in enumerate(d.pieces):
        color = PALETTE[i % len(PALETTE)]
        style = {"fill": color, "fill-opacity": "0.7", "stroke": "black", "stroke-width": "1"}
        ET.SubElement(src, "polygon", points=_points(piece.polygon, 0.0, scale, top, margin), **style)
        ET.SubElement(tgt, "polygon",
                      points=_points(piece.placed(), target_dx, scale, top, margin), **style)
        cx, cy = _centroid(piece.polygon)
        label = ET.SubElement(src, "text", x=f"{margin + cx * scale:.3f}",
                              y=f"{margin + (top - cy) * scale:.3f}",
                              **{"font-size": f"{font:.1f}", "text-anchor": "middle"})
        label.text = f"{piece.shift:+.3g}"
    ET.SubElement(svg, "polygon", points=_points(d.source, 0.0, scale, top, margin),
                  fill="none", stroke="black", **{"stroke-width": "2"})
    ET.SubElement(svg, "polygon", points=_points(d.target.polygon(), target_dx, scale, top, margin),
                  fill="none", stroke="black", **{"stroke-width": "2"})
    return ET.tostring(svg, encoding="unicode")


def write_dissection_svg(d: Dissection, path: str) -> None:
    with open(path, "w") as fh:
        fh.write(dissection_svg(d))
