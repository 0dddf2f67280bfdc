"""Hypothesis strategy for random valid netlists.

Components are laid down in sweeps over a set of open "wires" (output
ports not yet connected).  After every step the wire set is recorded as a
cut; vacuum inputs opened later are appended to the earlier cuts so every
cut stays crossed exactly once by every path.
"""

import math

from hypothesis import strategies as st


@st.composite
def netlists(draw, max_sources=2, max_steps=8, modulated=False):
    n_sources = draw(st.integers(1, max_sources))
    lines = []
    wires = []
    for i in range(1, n_sources + 1):
        lines.append(f"component S{i} source")
        wires.append(f"S{i}.out")
    cuts = [list(wires)]
    counter = {"bs": 0, "m": 0, "mod": 0}
    steps = draw(st.integers(1, max_steps))
    for _ in range(steps):
        op = draw(st.sampled_from(["bs2", "bs1", "mirror", "mod"] if wires else ["bs0"]))
        if op in ("bs2", "bs1") and (op == "bs2" and len(wires) < 2):
            op = "bs1"
        if op in ("bs2", "bs1", "bs0"):
            counter["bs"] += 1
            name = f"BS{counter['bs']}"
            lines.append(f"component {name} beamsplitter")
            if op == "bs2":
                i = draw(st.integers(0, len(wires) - 1))
                a = wires.pop(i)
                j = draw(st.integers(0, len(wires) - 1))
                b = wires.pop(j)
                lines.append(f"connect {a} -> {name}.in1")
                lines.append(f"connect {b} -> {name}.in2")
            else:
                port = draw(st.sampled_from(["in1", "in2"]))
                spare = "in2" if port == "in1" else "in1"
                if wires:
                    i = draw(st.integers(0, len(wires) - 1))
                    a = wires.pop(i)
                    lines.append(f"connect {a} -> {name}.{port}")
                    for c in cuts:
                        c.append(f"{name}.{spare}")
                else:
                    for c in cuts:
                        c.extend([f"{name}.in1", f"{name}.in2"])
            wires.extend([f"{name}.out1", f"{name}.out2"])
        else:
            i = draw(st.integers(0, len(wires) - 1))
            a = wires.pop(i)
            if op == "mirror":
                counter["m"] += 1
                name = f"M{counter['m']}"
                lines.append(f"component {name} mirror")
            else:
                counter["mod"] += 1
                name = f"X{counter['mod']}"
                delta = draw(st.floats(-math.pi, math.pi, allow_nan=False))
                if modulated:
                    freq = draw(st.integers(1, 20))
                    eps = draw(st.sampled_from([0.0, 0.01, 0.05]))
                    lines.append(f"component {name} modulator tau0=1.0 eps={eps!r} freq={float(freq)!r} delta={delta!r}")
                else:
                    lines.append(f"component {name} modulator delta={delta!r}")
            lines.append(f"connect {a} -> {name}.in")
            wires.append(f"{name}.out")
        cuts.append(list(wires))
    # close most wires with detectors, leave some open for virtual detectors
    final = []
    for k, w in enumerate(list(wires), start=1):
        if draw(st.booleans()) or k == 1:
            lines.append(f"component D{k} detector")
            lines.append(f"connect {w} -> D{k}.in")
            final.append(f"D{k}.in")
        else:
            final.append(w)
    cuts.append(final)
    for k, c in enumerate(cuts, start=1):
        lines.append(f"cut L{k} = {', '.join(c)}")
    return "\n".join(lines) + "\n"
