import re
import xml.etree.ElementTree as ET

import pytest

from wavecut.netgraph import close, parse_network
from wavecut.propagate import intensities, propagate
from wavecut.render import RenderSpec, lines_schematic, render_schematic
from wavecut.tsvf import backward_field, weak_values

NS = "{http://www.w3.org/2000/svg}"


def _edges(svg):
    root = ET.fromstring(svg)
    return {p.get("data-edge"): p for p in root.iter(f"{NS}polyline") if p.get("data-edge")}


def test_forward_widths_follow_intensity(nested):
    svg = render_schematic(nested, intensities(propagate(nested, "S1")).edges)
    edges = _edges(svg)
    assert len(edges) == len(close(nested).edges)
    q1, q2 = float(edges["q1c"].get("stroke-width")), float(edges["q2c"].get("stroke-width"))
    assert q1 == pytest.approx(2 * q2)
    assert "zero" in edges["e1b"].get("class").split()
    assert float(edges["e1b"].get("stroke-width")) == 0.5


def test_all_zero_map_is_dashed(nested):
    edges = _edges(render_schematic(nested, {}))
    assert all("zero" in p.get("class").split() for p in edges.values())


def test_weak_value_signs_are_classes(nested):
    w = weak_values(propagate(nested, "S1"), backward_field(nested, "D2"))
    edges = _edges(render_schematic(nested, {k: v.real for k, v in w.values.items()}, RenderSpec("weak_re")))
    q2, q3 = edges["q2c"], edges["q3c"]
    assert q2.get("stroke-width") == q3.get("stroke-width")
    assert "neg" in q2.get("class").split()
    assert "neg" not in q3.get("class").split()


def test_width_is_clamped(nested):
    edges = _edges(render_schematic(nested, {"q1c": 10.0, "q2c": 1e-3}))
    assert float(edges["q1c"].get("stroke-width")) == 12.0
    assert float(edges["q2c"].get("stroke-width")) == 0.5
    assert "zero" not in edges["q2c"].get("class")


def test_render_is_deterministic(double_nested):
    values = intensities(propagate(double_nested, "S1")).edges
    assert render_schematic(double_nested, values) == render_schematic(double_nested, values)


def test_unknown_edges_are_rejected(nested):
    with pytest.raises(KeyError):
        render_schematic(nested, {"nope": 1.0})


def test_unknown_quantity():
    with pytest.raises(ValueError):
        RenderSpec("phase")


def test_fallback_layout_for_netlists():
    net = parse_network("component S1 source\ncomponent BS beamsplitter\ncomponent D1 detector\n"
                        "connect S1.out -> BS.in1\nconnect BS.out1 -> D1.in\n")
    svg = render_schematic(net, intensities(propagate(net, "S1")).edges, title="a <b>")
    assert len(_edges(svg)) == 4
    assert "a &lt;b&gt;" in svg


def test_lines_schematic(nested):
    svg = lines_schematic(nested, {"d1": 1, "e1b": 0}, "panel")
    edges = _edges(svg)
    assert "zero" in edges["e1b"].get("class")
    assert float(edges["d1"].get("stroke-width")) == 2.0
    assert re.search(r"<text[^>]*>panel</text>", svg)
