"""Amplitude propagation through a port graph.

Amplitudes are complex scalars, or complex arrays when ``time`` is an
array (one entry per sample); every scattering rule is elementwise, so a
whole modulated time series is a single pass over the graph.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .netgraph import Kind, ModulatorSpec, Network, close, cut_issues, reverse, validate

T = 1 / np.sqrt(2)
R = 1j / np.sqrt(2)
MIRROR_PHASE = 1j
TOL = 1e-12


class PropagationError(ValueError):
    pass


class InvalidCut(ValueError):
    pass


def scatter_beamsplitter(a, b):
    """Symmetric 50:50 splitter: ``c = t*a + r*b``, ``d = r*a + t*b``."""
    return T * a + R * b, R * a + T * b


def scatter_mirror(a):
    return MIRROR_PHASE * a


def scatter_modulator(a, spec: ModulatorSpec, time=0.0):
    return spec.tau(time) * a


@dataclass(frozen=True)
class FieldMap:
    amplitudes: Mapping[str, complex | np.ndarray]
    seed: tuple[str, complex]
    time: float | np.ndarray
    direction: str
    network: Network = field(repr=False, compare=False)

    def __getitem__(self, ref: str):
        return self.amplitudes[self.network.edge(ref).name]

    def detector_amplitudes(self) -> dict[str, complex | np.ndarray]:
        out = {}
        for det in self.network.detectors:
            (edge,) = self.network.incoming(det.name).values()
            out[det.name] = self.amplitudes[edge.name]
        return out

    def to_json(self) -> str:
        return json.dumps({
            "direction": self.direction,
            "seed": self.seed[0],
            "edges": {k: {"re": _f17(np.real(v)), "im": _f17(np.imag(v))} for k, v in self.amplitudes.items()},
        }, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["edge", "re", "im"])
        for k, v in self.amplitudes.items():
            writer.writerow([k, f"{np.real(v):.17g}", f"{np.imag(v):.17g}"])
        return buf.getvalue()


@dataclass(frozen=True)
class IntensityMap:
    edges: Mapping[str, float | np.ndarray]
    detectors: Mapping[str, float | np.ndarray]
    seed: tuple[str, complex]
    network: Network = field(repr=False, compare=False)

    def __getitem__(self, ref: str):
        return self.edges[self.network.edge(ref).name]

    def to_json(self) -> str:
        return json.dumps({
            "seed": self.seed[0],
            "edges": {k: _f17(v) for k, v in self.edges.items()},
            "detectors": {k: _f17(v) for k, v in self.detectors.items()},
        }, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["edge", "p"])
        for k, v in self.edges.items():
            writer.writerow([k, f"{float(v):.17g}"])
        return buf.getvalue()


def _f17(x) -> float:
    # round-trip through 17 significant digits so JSON and CSV agree
    return float(f"{float(x):.17g}")


def propagate(net: Network, seed_site: str, time=0.0, amplitude: complex = 1.0) -> FieldMap:
    """Seed ``amplitude`` at a source and propagate to every edge."""
    net = close(net)
    try:
        seed = net.component(seed_site)
    except KeyError:
        raise PropagationError(f"unknown seed site {seed_site!r}") from None
    if seed.kind is not Kind.SOURCE:
        raise PropagationError(f"seed site {seed_site!r} is a {seed.kind.value}, not a source")
    try:
        order = net.topological_order()
    except Exception as exc:
        raise PropagationError("forward graph must be acyclic") from exc

    time = np.asarray(time, dtype=float) if np.ndim(time) else float(time)
    zero = np.zeros(np.shape(time), dtype=complex) if np.ndim(time) else 0j
    amp: dict[str, complex | np.ndarray] = {}
    by_name = {c.name: c for c in net.components}
    incoming = {c.name: {} for c in net.components}
    outgoing = {c.name: {} for c in net.components}
    for e in net.edges:
        incoming[e.dst][e.dst_port] = e.name
        outgoing[e.src][e.src_port] = e.name

    for name in order:
        comp = by_name[name]
        ins = {p: amp[incoming[name][p]] for p in comp.inputs}
        kind = comp.kind
        if kind is Kind.SOURCE:
            outs = {"out": zero + amplitude if name == seed_site else zero}
        elif kind is Kind.BEAMSPLITTER:
            c, d = scatter_beamsplitter(ins["in1"], ins["in2"])
            outs = {"out1": c, "out2": d}
        elif kind is Kind.MIRROR:
            outs = {"out": scatter_mirror(ins["in"])}
        elif kind is Kind.MODULATOR:
            outs = {"out": scatter_modulator(ins["in"], comp.modulator, time)}
        else:
            outs = {}
        for port, value in outs.items():
            amp[outgoing[name][port]] = value

    ordered = {e.name: amp[e.name] for e in net.edges}
    direction = str(net.metadata.get("direction", "forward"))
    return FieldMap(ordered, (seed_site, amplitude), time, direction, net)


def intensities(f: FieldMap) -> IntensityMap:
    edges = {k: np.abs(v) ** 2 for k, v in f.amplitudes.items()}
    dets = {k: np.abs(v) ** 2 for k, v in f.detector_amplitudes().items()}
    return IntensityMap(edges, dets, f.seed, f.network)


def _cut_members(net: Network, cut) -> tuple[str, tuple[str, ...]]:
    if isinstance(cut, str):
        return cut, net.cut_edges(cut)
    refs = tuple(cut)
    return "<anonymous>", net.resolve(refs)


def check_cut_sum(im: IntensityMap, cut: str | Iterable[str], strict: bool = True):
    """``|sum of p over the cut - |seed|^2|``; raises InvalidCut for a bad cut when strict."""
    name, edges = _cut_members(im.network, cut)
    if strict:
        issues = cut_issues(im.network, name, edges)
        if issues:
            raise InvalidCut("; ".join(i.message for i in issues))
    total = sum(im.edges[e] for e in edges)
    return np.abs(total - abs(im.seed[1]) ** 2)


def valid_cuts(net: Network) -> list[str]:
    """Declared cuts that pass the exactly-once crossing check."""
    closed = close(net)
    return [name for name in net.cuts if not cut_issues(closed, name, net.cuts[name])]


def absorbed(f: FieldMap):
    """Probability removed by modulators with ``|tau| < 1``."""
    net = f.network
    total = 0.0
    for mod in net.modulators:
        (e_in,) = net.incoming(mod.name).values()
        (e_out,) = net.outgoing(mod.name).values()
        total = total + np.abs(f.amplitudes[e_in.name]) ** 2 - np.abs(f.amplitudes[e_out.name]) ** 2
    return total


def backward_sites(net: Network) -> list[str]:
    """Backward seed names, one per detector of the closed network."""
    names = {old: new for new, old in reverse(net).metadata["reverse_names"].items()}
    return [names[d.name] for d in close(net).detectors]


@dataclass(frozen=True)
class SumRuleReport:
    """Maximum residual per rule; ``rules`` maps a label to that residual."""

    rules: Mapping[str, float]

    @property
    def max_residual(self) -> float:
        return max(self.rules.values(), default=0.0)

    def ok(self, tol: float = TOL) -> bool:
        return self.max_residual <= tol


def energy_sum_rules(net: Network, forward_seed: str | None = None, time=0.0) -> SumRuleReport:
    """Forward and backward cut sums, plus the per-edge sum over backward seeds.

    The last rule holds for lossless networks with as many detectors as
    sources, which every closed terminator-free network is.
    """
    closed = close(net)
    cuts = valid_cuts(closed)
    forward_seed = forward_seed or next(s.name for s in closed.sources if not s.virtual)
    rules: dict[str, float] = {}
    fwd = intensities(propagate(closed, forward_seed, time))
    rules["forward_cut_sum"] = max((float(np.max(check_cut_sum(fwd, c))) for c in cuts), default=0.0)
    rev = reverse(closed)
    back_total = {e.name: 0.0 for e in closed.edges}
    worst = 0.0
    for site in backward_sites(closed):
        im = intensities(propagate(rev, site, time))
        worst = max([worst] + [float(np.max(check_cut_sum(im, c))) for c in cuts])
        for k, v in im.edges.items():
            back_total[k] = back_total[k] + v
    rules["backward_cut_sum"] = worst
    lossless = not closed.of_kind(Kind.TERMINATOR) and all(
        m.modulator.eps0 == 0 and abs(m.modulator.tau0) == 1 for m in closed.modulators)
    if lossless:
        rules["backward_seed_sum"] = max(float(np.max(np.abs(v - 1))) for v in back_total.values())
    return SumRuleReport(rules)


def validated(net: Network) -> Network:
    report = validate(net)
    if not report.ok:
        raise PropagationError("; ".join(i.message for i in report.errors()))
    return net
