"""SVG schematics with edge stroke width proportional to a plotted quantity."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping
from xml.sax.saxutils import escape

import numpy as np

from .netgraph import Kind, Network, close

QUANTITIES = ("forward_p", "backward_p", "weak_re", "encounter", "encounter_normalized")
ZERO_TOL = 1e-12
MIN_WIDTH, MAX_WIDTH = 0.5, 12.0


@dataclass(frozen=True)
class RenderSpec:
    quantity: str = "forward_p"
    scale: float = 16.0  # px per unit of |value|
    negative_class: str = "neg"
    zero_class: str = "zero"

    def __post_init__(self):
        if self.quantity not in QUANTITIES:
            raise ValueError(f"unknown quantity {self.quantity!r}")


# Hand-placed coordinates, forward direction top to bottom.
LAYOUTS: dict[str, dict[str, tuple[float, float]]] = {
    "simple": {
        "S1": (60, 30), "V_BS1_in2": (20, 90), "BS1": (60, 90), "M1": (60, 270), "M2": (240, 90),
        "BS2": (240, 270), "D1": (240, 340), "D2": (310, 270),
    },
    "nested": {
        "S1": (80, 30), "V_BS1_in2": (40, 90), "BS1": (80, 90),
        "M1": (80, 430), "A2": (280, 430), "BS4": (480, 430), "D1": (480, 500), "D2": (550, 430),
        "A1": (200, 90), "V_BS2_in2": (320, 40), "BS2": (320, 90),
        "M2": (480, 90), "B1": (480, 170), "M3": (320, 250), "C1": (400, 250), "BS3": (480, 250),
        "E1": (480, 340), "D3": (550, 250),
    },
    "double_nested": {
        "S1": (360, 20), "V_BS1_in2": (320, 60), "BS1": (360, 60),
        "M1L": (140, 60), "M1R": (580, 60),
        "V_BS2L_in2": (100, 110), "BS2L": (140, 140), "ML1": (60, 220), "ML2": (220, 220), "BS3L": (140, 300),
        "V_BS2R_in2": (620, 110), "BS2R": (580, 140), "MR1": (500, 220), "MR2": (660, 220), "BS3R": (580, 300),
        "D1": (140, 380), "D4": (580, 380), "M2L": (340, 300), "M2R": (380, 300),
        "BS4": (360, 380), "D2": (320, 450), "D3": (400, 450),
    },
}

_STYLE = """
  .edge { fill: none; stroke: #2b6cb0; stroke-linecap: round; }
  .edge.neg { stroke: #d53f8c; }
  .edge.zero { stroke: #000; stroke-dasharray: 4 3; }
  .comp { fill: #fff; stroke: #333; stroke-width: 1; }
  .virtual { fill: #eee; stroke: #999; stroke-dasharray: 2 2; }
  text { font-family: sans-serif; font-size: 10px; }
"""


def _layered_layout(net: Network) -> dict[str, tuple[float, float]]:
    depth: dict[str, int] = {}
    for name in net.topological_order():
        preds = [e.src for e in net.edges if e.dst == name]
        depth[name] = 1 + max((depth[p] for p in preds), default=-1)
    rows: dict[int, int] = {}
    pos = {}
    for comp in net.components:
        d = depth[comp.name]
        pos[comp.name] = (60 + 90 * rows.get(d, 0), 40 + 80 * d)
        rows[d] = rows.get(d, 0) + 1
    return pos


def layout(net: Network) -> dict[str, tuple[float, float]]:
    net = close(net)
    preset = LAYOUTS.get(str(net.metadata.get("preset")), {})
    if preset and all(c.name in preset for c in net.components):
        return dict(preset)
    return _layered_layout(net)


def _num(x: float) -> str:
    return f"{x:.2f}"


def render_schematic(net: Network, values: Mapping[str, complex | float], spec: RenderSpec | None = None,
                     title: str | None = None) -> str:
    """SVG document: one polyline per edge, width = scale*|value| clamped to [0.5, 12] px."""
    spec = spec or RenderSpec()
    net = close(net)
    names = {e.name for e in net.edges}
    unknown = set(values) - names
    if unknown:
        raise KeyError(f"values given for unknown edges: {sorted(unknown)}")
    pos = layout(net)
    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    width, height = max(xs) + 80, max(ys) + 90
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{_num(width)}" height="{_num(height)}" '
           f'viewBox="0 0 {_num(width)} {_num(height)}">',
           f"<style>{_STYLE}</style>"]
    if title:
        out.append(f'<text x="10" y="14">{escape(title)}</text>')
    for e in net.edges:
        value = complex(values.get(e.name, 0.0))
        mag = abs(value)
        classes = ["edge"]
        if mag < ZERO_TOL:
            classes.append(spec.zero_class)
            w = MIN_WIDTH
        else:
            w = float(np.clip(spec.scale * mag, MIN_WIDTH, MAX_WIDTH))
            if value.real < 0:
                classes.append(spec.negative_class)
        (x1, y1), (x2, y2) = pos[e.src], pos[e.dst]
        # an L-shaped route keeps connections axis-aligned like the hand-drawn schematics
        points = [(x1, y1), (x2, y1), (x2, y2)] if x1 != x2 and y1 != y2 else [(x1, y1), (x2, y2)]
        pts = " ".join(f"{_num(x)},{_num(y)}" for x, y in points)
        out.append(f'<polyline class="{" ".join(classes)}" data-edge="{escape(e.name)}" '
                   f'data-value="{value.real:.6g}" stroke-width="{_num(w)}" points="{pts}"/>')
    for comp in net.components:
        x, y = pos[comp.name]
        cls = "comp virtual" if comp.virtual else "comp"
        if comp.kind is Kind.BEAMSPLITTER:
            shape = f'<rect class="{cls}" x="{_num(x - 7)}" y="{_num(y - 7)}" width="14" height="14" transform="rotate(45 {_num(x)} {_num(y)})"/>'
        elif comp.kind is Kind.MIRROR:
            shape = f'<rect class="{cls}" x="{_num(x - 8)}" y="{_num(y - 2)}" width="16" height="4"/>'
        elif comp.kind is Kind.MODULATOR:
            shape = f'<circle class="{cls}" cx="{_num(x)}" cy="{_num(y)}" r="6"/>'
        else:
            shape = f'<rect class="{cls}" x="{_num(x - 6)}" y="{_num(y - 6)}" width="12" height="12"/>'
        out.append(shape)
        if not comp.virtual:
            out.append(f'<text x="{_num(x + 9)}" y="{_num(y - 8)}">{escape(comp.name)}</text>')
    ly = height - 40
    out.append(f'<g class="legend"><text x="10" y="{_num(ly)}">{escape(spec.quantity)}: width = {spec.scale:g} px per unit</text>'
               f'<polyline class="edge" stroke-width="2" points="10,{_num(ly + 12)} 40,{_num(ly + 12)}"/>'
               f'<text x="45" y="{_num(ly + 15)}">positive</text>'
               f'<polyline class="edge {spec.negative_class}" stroke-width="2" points="110,{_num(ly + 12)} 140,{_num(ly + 12)}"/>'
               f'<text x="145" y="{_num(ly + 15)}">negative</text>'
               f'<polyline class="edge {spec.zero_class}" stroke-width="0.5" points="210,{_num(ly + 12)} 240,{_num(ly + 12)}"/>'
               f'<text x="245" y="{_num(ly + 15)}">zero</text></g>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def lines_schematic(net: Network, orders: Mapping[str, int], title: str | None = None) -> str:
    """Panel for a modulation scenario: listed targets are drawn with width 2, others dashed.

    ``orders`` maps an edge name to the lowest order seen there (0 for none).
    """
    values = {e: (1.0 if o > 0 else 0.0) for e, o in orders.items()}
    return render_schematic(net, values, RenderSpec("forward_p", scale=2.0), title)
