"""SVG rendering of planar covers: unit square, level-n cylinders, slabs."""

from __future__ import annotations

import math
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field

from .cover import CoverCertificate
from .digits import iter_words, cylinder_cube

PALETTE = ("#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")

# background, clip rectangle and frame
CHROME_SHAPES = 3


@dataclass(frozen=True)
class RenderSpec:
    size: int = 512
    show_cylinders: bool = True
    colors: dict[str, str] = field(default_factory=dict)
    stroke: float = 1.0
    opacity: float = 0.25

    def __post_init__(self) -> None:
        if self.size < 64:
            raise ValueError("canvas must be at least 64 px")

    def color(self, key: str, index: int) -> str:
        return self.colors.get(key, PALETTE[index % len(PALETTE)])


def render_cover(cover: CoverCertificate, spec: RenderSpec | None = None) -> str:
    """SVG text with one ``rect`` per slab and per cylinder plus the fixed chrome."""
    spec = spec or RenderSpec()
    if cover.system.d != 2:
        raise ValueError("SVG rendering is planar only")
    if cover.slabs is None:
        raise ValueError("aggregated covers carry no slab positions to draw")
    S = spec.size
    svg = ET.Element("svg", xmlns="http://www.w3.org/2000/svg", version="1.1", width=str(S), height=str(S))
    svg.set("viewBox", f"0 0 {S} {S}")
    ET.SubElement(svg, "rect", x="0", y="0", width=str(S), height=str(S), fill="white")
    clip = ET.SubElement(ET.SubElement(svg, "defs"), "clipPath", id="unit")
    ET.SubElement(clip, "rect", x="0", y="0", width="1", height="1")
    # unit square with y pointing up
    world = ET.SubElement(svg, "g", transform=f"translate(0,{S}) scale({S},{-S})")
    world.set("clip-path", "url(#unit)")
    stroke = {"vector-effect": "non-scaling-stroke", "stroke-width": f"{spec.stroke:g}"}

    if spec.show_cylinders:
        cyl = ET.SubElement(world, "g", fill="#444444", stroke="none")
        cyl.set("fill-opacity", "0.35")
        side = 1 / cover.system.N**cover.n
        for w in iter_words(cover.system, cover.n):
            x, y = (float(c) for c in cylinder_cube(w).corner)
            ET.SubElement(cyl, "rect", x=f"{x:.9g}", y=f"{y:.9g}", width=f"{side:.9g}", height=f"{side:.9g}")

    for k, (key, positions) in enumerate(cover.slabs.items()):
        vx, vy = (int(c) for c in key.split(","))
        norm = math.hypot(vx, vy)
        angle = math.degrees(math.atan2(vy, vx))
        low, high = min(vx, 0) + min(vy, 0), max(vx, 0) + max(vy, 0)
        den = cover.system.N**cover.n
        group = ET.SubElement(world, "g", fill=spec.color(key, k), stroke=spec.color(key, k))
        group.set("fill-opacity", f"{spec.opacity:g}")
        for q in positions:
            lo, hi = (q + low) / den / norm, (q + high) / den / norm
            rect = ET.SubElement(
                group,
                "rect",
                x=f"{lo:.9g}",
                y="-2",
                width=f"{hi - lo:.9g}",
                height="4",
                transform=f"rotate({angle:.9g})",
            )
            rect.set("data-direction", key)
            for name, val in stroke.items():
                rect.set(name, val)

    frame = ET.SubElement(svg, "rect", x="0", y="0", width=str(S), height=str(S), fill="none", stroke="black")
    frame.set("stroke-width", "2")
    return ET.tostring(svg, encoding="unicode", xml_declaration=True)
