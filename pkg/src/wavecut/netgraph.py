"""Port-graph model of linear-optical networks.

A network is a set of named components joined by directed edges
(output port -> input port), plus named channels (edge sequences) and
cuts (edge sets).  Cut entries may be edge names, edge aliases, or a bare
port reference ``Comp.port`` meaning "the edge attached to that port";
the last form lets a cut name the edge that auto-termination will attach
to an open splitter input.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field, replace
from graphlib import CycleError, TopologicalSorter
from typing import Iterable, Iterator, Mapping

import numpy as np


class NetlistError(ValueError):
    """Parse or construction error, with an optional source position."""

    def __init__(self, message: str, line: int | None = None, col: int | None = None):
        self.message = message
        self.line = line
        self.col = col
        where = f"line {line}, col {col}: " if line is not None else ""
        super().__init__(where + message)


class Kind(str, enum.Enum):
    SOURCE = "source"
    DETECTOR = "detector"
    BEAMSPLITTER = "beamsplitter"
    MIRROR = "mirror"
    MODULATOR = "modulator"
    TERMINATOR = "terminator"


# (input ports, output ports) per kind
PORTS: dict[Kind, tuple[tuple[str, ...], tuple[str, ...]]] = {
    Kind.SOURCE: ((), ("out",)),
    Kind.DETECTOR: (("in",), ()),
    Kind.BEAMSPLITTER: (("in1", "in2"), ("out1", "out2")),
    Kind.MIRROR: (("in",), ("out",)),
    Kind.MODULATOR: (("in",), ("out",)),
    Kind.TERMINATOR: (("in",), ()),
}

# port correspondence when every edge direction is flipped
_FLIP_PORT = {"in": "out", "out": "in", "in1": "out1", "in2": "out2", "out1": "in1", "out2": "in2"}


@dataclass(frozen=True)
class ModulatorSpec:
    """Transmission ``[tau0 - eps0*cos(2*pi*freq*t)] * exp(i*delta)``."""

    tau0: float = 1.0
    eps0: float = 0.0
    freq: float = 0.0
    delta: float = 0.0

    def __post_init__(self):
        if self.eps0 < 0:
            raise ValueError(f"eps0 must be >= 0, got {self.eps0}")
        if self.freq < 0:
            raise ValueError(f"freq must be >= 0, got {self.freq}")
        if self.eps0 > abs(self.tau0) and self.eps0 > 0:
            raise ValueError(f"eps0={self.eps0} exceeds tau0={self.tau0}")

    @property
    def active(self) -> bool:
        return self.eps0 > 0

    def tau(self, t):
        t = np.asarray(t, dtype=float)
        value = (self.tau0 - self.eps0 * np.cos(2 * np.pi * self.freq * t)) * np.exp(1j * self.delta)
        return value if value.ndim else complex(value)


@dataclass(frozen=True)
class Component:
    name: str
    kind: Kind
    modulator: ModulatorSpec | None = None
    # auto-terminations: vacuum sources and virtual detectors
    virtual: bool = False
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    @property
    def inputs(self) -> tuple[str, ...]:
        return PORTS[self.kind][0]

    @property
    def outputs(self) -> tuple[str, ...]:
        return PORTS[self.kind][1]


@dataclass(frozen=True)
class Edge:
    src: str
    src_port: str
    dst: str
    dst_port: str
    alias: str | None = None
    pos: tuple[int, int] | None = field(default=None, compare=False, repr=False)

    @property
    def canonical(self) -> str:
        return f"{self.src}.{self.src_port}->{self.dst}.{self.dst_port}"

    @property
    def name(self) -> str:
        return self.alias or self.canonical


@dataclass(frozen=True)
class Network:
    components: tuple[Component, ...]
    edges: tuple[Edge, ...]
    channels: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    cuts: Mapping[str, tuple[str, ...]] = field(default_factory=dict)
    metadata: Mapping[str, object] = field(default_factory=dict, compare=False)

    def component(self, name: str) -> Component:
        for comp in self.components:
            if comp.name == name:
                return comp
        raise KeyError(f"unknown component {name!r}")

    def has_component(self, name: str) -> bool:
        return any(c.name == name for c in self.components)

    def edge(self, ref: str) -> Edge:
        """Look up an edge by alias, canonical name, or attached port."""
        ref = ref.replace(" ", "")
        for e in self.edges:
            if ref == e.alias or ref == e.canonical:
                return e
        if "->" not in ref and "." in ref:
            comp, port = ref.split(".", 1)
            for e in self.edges:
                if (e.src, e.src_port) == (comp, port) or (e.dst, e.dst_port) == (comp, port):
                    return e
        raise KeyError(f"unknown edge {ref!r}")

    def resolve(self, refs: Iterable[str]) -> tuple[str, ...]:
        return tuple(self.edge(r).name for r in refs)

    def cut_edges(self, name: str) -> tuple[str, ...]:
        return self.resolve(self.cuts[name])

    def channel_edges(self, name: str) -> tuple[str, ...]:
        return self.resolve(self.channels[name])

    def of_kind(self, kind: Kind) -> list[Component]:
        return [c for c in self.components if c.kind is kind]

    @property
    def sources(self) -> list[Component]:
        return self.of_kind(Kind.SOURCE)

    @property
    def detectors(self) -> list[Component]:
        return self.of_kind(Kind.DETECTOR)

    @property
    def modulators(self) -> list[Component]:
        return self.of_kind(Kind.MODULATOR)

    def incoming(self, comp: str) -> dict[str, Edge]:
        return {e.dst_port: e for e in self.edges if e.dst == comp}

    def outgoing(self, comp: str) -> dict[str, Edge]:
        return {e.src_port: e for e in self.edges if e.src == comp}

    def open_ports(self) -> list[tuple[str, str, bool]]:
        """(component, port, is_input) for every unattached port, in declaration order."""
        used = {(e.src, e.src_port) for e in self.edges} | {(e.dst, e.dst_port) for e in self.edges}
        found = []
        for comp in self.components:
            for port in comp.inputs:
                if (comp.name, port) not in used:
                    found.append((comp.name, port, True))
            for port in comp.outputs:
                if (comp.name, port) not in used:
                    found.append((comp.name, port, False))
        return found

    def topological_order(self) -> list[str]:
        graph = TopologicalSorter()
        for comp in self.components:
            graph.add(comp.name)
        for e in self.edges:
            graph.add(e.dst, e.src)
        return list(graph.static_order())

    def with_modulators(self, updates: Mapping[str, Mapping[str, float] | ModulatorSpec]) -> "Network":
        """Copy with selected modulator specs replaced or field-updated."""
        comps = []
        for comp in self.components:
            if comp.name in updates:
                if comp.kind is not Kind.MODULATOR:
                    raise KeyError(f"{comp.name} is not a modulator")
                upd = updates[comp.name]
                spec = upd if isinstance(upd, ModulatorSpec) else replace(comp.modulator, **upd)
                comp = replace(comp, modulator=spec)
            comps.append(comp)
        missing = set(updates) - {c.name for c in comps}
        if missing:
            raise KeyError(f"unknown modulators: {sorted(missing)}")
        return replace(self, components=tuple(comps))


# ---------------------------------------------------------------------------
# Construction helper used by presets and tests


class NetworkBuilder:
    def __init__(self):
        self._components: list[Component] = []
        self._edges: list[Edge] = []
        self._channels: dict[str, tuple[str, ...]] = {}
        self._cuts: dict[str, tuple[str, ...]] = {}
        self._ports_used: set[tuple[str, str]] = set()
        self._names: set[str] = set()

    def add(self, name: str, kind: Kind | str, modulator: ModulatorSpec | None = None,
            virtual: bool = False, pos=None) -> "NetworkBuilder":
        kind = Kind(kind)
        if name in self._names:
            raise NetlistError(f"duplicate component name {name!r}", *(pos or (None, None)))
        if kind is Kind.MODULATOR and modulator is None:
            modulator = ModulatorSpec()
        self._names.add(name)
        self._components.append(Component(name, kind, modulator, virtual, pos))
        return self

    def connect(self, src: str, dst: str, alias: str | None = None, pos=None) -> "NetworkBuilder":
        where = pos or (None, None)
        (sc, sp), (dc, dp) = _split_port(src, where), _split_port(dst, where)
        comps = {c.name: c for c in self._components}
        for cname in (sc, dc):
            if cname not in comps:
                raise NetlistError(f"reference to undeclared component {cname!r}", *where)
        if sp not in comps[sc].outputs:
            raise NetlistError(f"{sc} ({comps[sc].kind.value}) has no output port {sp!r}", *where)
        if dp not in comps[dc].inputs:
            raise NetlistError(f"{dc} ({comps[dc].kind.value}) has no input port {dp!r}", *where)
        for key in ((sc, sp), (dc, dp)):
            if key in self._ports_used:
                raise NetlistError(f"port {key[0]}.{key[1]} already connected", *where)
        edge = Edge(sc, sp, dc, dp, alias, pos)
        names = {e.name for e in self._edges} | {e.canonical for e in self._edges}
        if edge.name in names:
            raise NetlistError(f"duplicate edge name {edge.name!r}", *where)
        self._ports_used.update({(sc, sp), (dc, dp)})
        self._edges.append(edge)
        return self

    def channel(self, name: str, refs: Iterable[str], pos=None) -> "NetworkBuilder":
        self._named_set(self._channels, "channel", name, refs, pos)
        return self

    def cut(self, name: str, refs: Iterable[str], pos=None) -> "NetworkBuilder":
        self._named_set(self._cuts, "cut", name, refs, pos)
        return self

    def _named_set(self, target, what, name, refs, pos):
        where = pos or (None, None)
        if name in target:
            raise NetlistError(f"duplicate {what} name {name!r}", *where)
        refs = tuple(r.replace(" ", "") for r in refs)
        probe = Network(tuple(self._components), tuple(self._edges))
        for ref in refs:
            try:
                probe.edge(ref)
            except KeyError:
                if "->" not in ref and "." in ref:
                    comp, port = ref.split(".", 1)
                    if probe.has_component(comp):
                        c = probe.component(comp)
                        if port in c.inputs + c.outputs:
                            continue  # open port, resolved after auto-termination
                    raise NetlistError(f"{what} {name}: reference to undeclared port {ref!r}", *where) from None
                raise NetlistError(f"{what} {name}: reference to undeclared edge {ref!r}", *where) from None
        target[name] = refs

    def build(self, **metadata) -> Network:
        return Network(tuple(self._components), tuple(self._edges), dict(self._channels),
                       dict(self._cuts), dict(metadata))


def _split_port(ref: str, where) -> tuple[str, str]:
    if ref.count(".") != 1:
        raise NetlistError(f"expected <component>.<port>, got {ref!r}", *where)
    comp, port = ref.split(".")
    return comp, port


# ---------------------------------------------------------------------------
# Netlist text format

_NAME = r"[A-Za-z_][A-Za-z0-9_]*"
_PORTREF = rf"{_NAME}\.{_NAME}"
_RE_COMPONENT = re.compile(rf"component\s+({_NAME})\s+(\w+)((?:\s+\w+\s*=\s*\S+)*)\s*$")
_RE_CONNECT = re.compile(rf"connect\s+({_PORTREF})\s*->\s*({_PORTREF})(?:\s+as\s+({_NAME}))?\s*$")
_RE_SET = re.compile(rf"(channel|cut)\s+({_NAME})\s*=\s*(.+?)\s*$")
_MOD_KEYS = {"tau0": "tau0", "eps": "eps0", "eps0": "eps0", "freq": "freq", "delta": "delta"}


def parse_network(text: str) -> Network:
    """Parse netlist text into a :class:`Network`.

    Raises :class:`NetlistError` carrying the 1-based line and column of
    the offending statement.
    """
    builder = NetworkBuilder()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].rstrip()
        stripped = line.lstrip()
        if not stripped:
            continue
        col = len(line) - len(stripped) + 1
        pos = (lineno, col)
        keyword = stripped.split(None, 1)[0]
        if keyword == "component":
            m = _RE_COMPONENT.match(stripped)
            if not m:
                raise NetlistError("malformed component statement", *pos)
            name, kind, params = m.groups()
            try:
                kind = Kind(kind)
            except ValueError:
                raise NetlistError(f"unknown component kind {kind!r}", *pos) from None
            spec = None
            pairs = re.findall(r"(\w+)\s*=\s*(\S+)", params or "")
            if pairs and kind is not Kind.MODULATOR:
                raise NetlistError(f"{kind.value} takes no parameters", *pos)
            if kind is Kind.MODULATOR:
                kwargs = {}
                for key, value in pairs:
                    if key not in _MOD_KEYS:
                        raise NetlistError(f"unknown modulator parameter {key!r}", *pos)
                    try:
                        kwargs[_MOD_KEYS[key]] = float(value)
                    except ValueError:
                        raise NetlistError(f"bad number {value!r} for {key}", *pos) from None
                try:
                    spec = ModulatorSpec(**kwargs)
                except ValueError as exc:
                    raise NetlistError(str(exc), *pos) from None
            builder.add(name, kind, spec, pos=pos)
        elif keyword == "connect":
            m = _RE_CONNECT.match(stripped)
            if not m:
                raise NetlistError("malformed connect statement", *pos)
            src, dst, alias = m.groups()
            ref_col = col + stripped.index(src)
            for ref in (src, dst):
                cname = ref.split(".")[0]
                if cname not in builder._names:
                    ref_col = col + stripped.index(ref)
                    raise NetlistError(f"reference to undeclared component {cname!r}", lineno, ref_col)
            builder.connect(src, dst, alias, pos=(lineno, ref_col))
        elif keyword in ("channel", "cut"):
            m = _RE_SET.match(stripped)
            if not m:
                raise NetlistError(f"malformed {keyword} statement", *pos)
            what, name, body = m.groups()
            refs = [r.strip() for r in body.split(",")]
            if any(not r for r in refs):
                raise NetlistError(f"empty entry in {what} {name}", *pos)
            getattr(builder, what)(name, refs, pos=pos)
        else:
            raise NetlistError(f"unknown statement {keyword!r}", *pos)
    return builder.build()


def _fmt(x: float) -> str:
    return repr(float(x))


def serialize_network(net: Network) -> str:
    """Canonical netlist text; ``parse_network`` inverts it."""
    lines = []
    if net.metadata.get("preset"):
        lines.append(f"# preset: {net.metadata['preset']}")
    for comp in net.components:
        if comp.virtual:
            continue
        text = f"component {comp.name} {comp.kind.value}"
        if comp.kind is Kind.MODULATOR:
            m = comp.modulator
            text += f" tau0={_fmt(m.tau0)} eps={_fmt(m.eps0)} freq={_fmt(m.freq)} delta={_fmt(m.delta)}"
        lines.append(text)
    virtual = {c.name for c in net.components if c.virtual}
    for e in net.edges:
        if e.src in virtual or e.dst in virtual:
            continue
        text = f"connect {e.src}.{e.src_port} -> {e.dst}.{e.dst_port}"
        if e.alias:
            text += f" as {e.alias}"
        lines.append(text)
    for name, refs in net.channels.items():
        lines.append(f"channel {name} = {', '.join(refs)}")
    for name, refs in net.cuts.items():
        lines.append(f"cut {name} = {', '.join(refs)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Auto-termination, validation, reversal


def vacuum_name(comp: str, port: str) -> str:
    return f"V_{comp}_{port}"


def virtual_detector_name(comp: str, port: str) -> str:
    return f"X_{comp}_{port}"


def close(net: Network) -> Network:
    """Attach a vacuum source to every open input and a virtual detector to every open output."""
    opened = net.open_ports()
    if not opened:
        return net
    comps = list(net.components)
    edges = list(net.edges)
    for comp, port, is_input in opened:
        if is_input:
            name = vacuum_name(comp, port)
            comps.append(Component(name, Kind.SOURCE, virtual=True))
            edges.append(Edge(name, "out", comp, port))
        else:
            name = virtual_detector_name(comp, port)
            comps.append(Component(name, Kind.DETECTOR, virtual=True))
            edges.append(Edge(comp, port, name, "in"))
    return replace(net, components=tuple(comps), edges=tuple(edges))


@dataclass(frozen=True)
class Issue:
    severity: str  # "error" | "warning"
    message: str
    location: str | None = None


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[Issue, ...]
    auto_terminations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not any(i.severity == "error" for i in self.issues)

    def errors(self) -> list[Issue]:
        return [i for i in self.issues if i.severity == "error"]


def iter_paths(net: Network) -> Iterator[tuple[str, ...]]:
    """Every directed source-to-detector path, as a tuple of edge names.

    The network must be closed and acyclic; terminators end paths too.
    """
    out: dict[str, list[Edge]] = {}
    for e in net.edges:
        out.setdefault(e.src, []).append(e)
    kinds = {c.name: c.kind for c in net.components}

    def walk(comp, trail):
        if kinds[comp] in (Kind.DETECTOR, Kind.TERMINATOR):
            yield tuple(trail)
            return
        for e in out.get(comp, ()):
            trail.append(e.name)
            yield from walk(e.dst, trail)
            trail.pop()

    for src in net.sources:
        yield from walk(src.name, [])


def cut_issues(net: Network, name: str, refs: Iterable[str], paths=None) -> list[Issue]:
    """Exactly-once crossing check for one cut on a closed network."""
    try:
        cut = set(net.resolve(refs))
    except KeyError as exc:
        return [Issue("error", f"cut {name}: {exc.args[0]}", name)]
    if paths is None:
        paths = list(iter_paths(net))
    edge_channel = {}
    for cname in net.channels:
        for ename in net.channel_edges(cname):
            edge_channel.setdefault(ename, set()).add(cname)
    missed: list[tuple[str, ...]] = []
    repeated: list[tuple[str, ...]] = []
    for path in paths:
        hits = sum(1 for e in path if e in cut)
        if hits == 0:
            missed.append(path)
        elif hits > 1:
            repeated.append(path)
    issues = []
    if missed:
        chans = sorted({c for p in missed for e in p for c in edge_channel.get(e, ())})
        via = ", ".join(chans) if chans else "; ".join(f"{p[0]} ... {p[-1]}" for p in missed[:3])
        issues.append(Issue("error", f"cut {name} misses paths via {via}", name))
    if repeated:
        issues.append(Issue("error", f"cut {name} is crossed more than once by {len(repeated)} path(s)", name))
    return issues


def validate(net: Network) -> ValidationReport:
    issues: list[Issue] = []
    terminations = tuple(
        f"{comp}.{port} <- vacuum source" if is_input else f"{comp}.{port} -> virtual detector"
        for comp, port, is_input in net.open_ports()
    )
    kinds = {c.name: c for c in net.components}
    seen_ports: set[tuple[str, str]] = set()
    for e in net.edges:
        for cname, port, is_input in ((e.src, e.src_port, False), (e.dst, e.dst_port, True)):
            comp = kinds.get(cname)
            if comp is None:
                issues.append(Issue("error", f"edge {e.name} references undeclared component {cname}", e.name))
                continue
            allowed = comp.inputs if is_input else comp.outputs
            if port not in allowed:
                issues.append(Issue("error", f"port arity: {cname} has no {'input' if is_input else 'output'} port {port}", e.name))
            if (cname, port) in seen_ports:
                issues.append(Issue("error", f"port {cname}.{port} has more than one edge", e.name))
            seen_ports.add((cname, port))
    for comp in net.components:
        if comp.kind is Kind.MODULATOR and comp.modulator is None:
            issues.append(Issue("error", f"modulator {comp.name} has no spec", comp.name))
    if issues:
        return ValidationReport(tuple(issues), terminations)

    try:
        net.topological_order()
    except CycleError:
        issues.append(Issue("error", "forward graph must be acyclic"))
        return ValidationReport(tuple(issues), terminations)

    for cname, refs in net.channels.items():
        try:
            edges = [net.edge(r) for r in refs]
        except KeyError as exc:
            issues.append(Issue("error", f"channel {cname}: {exc.args[0]}", cname))
            continue
        for a, b in zip(edges, edges[1:]):
            if a.dst != b.src:
                issues.append(Issue("error", f"channel {cname} is not a connected path at {a.name} / {b.name}", cname))
                break

    closed = close(net)
    paths = list(iter_paths(closed))
    for cname, refs in net.cuts.items():
        issues.extend(cut_issues(closed, cname, refs, paths))
    return ValidationReport(tuple(issues), terminations)


def backward_seed_name(detector: str) -> str:
    """Backward source site for a forward detector: D2 -> S22."""
    m = re.fullmatch(r"D(\d+)", detector)
    return f"S{m.group(1) * 2}" if m else f"S_{detector}"


def reverse(net: Network) -> Network:
    """Flip every edge; detectors become sources and sources detectors.

    Component names are rewritten to the backward convention (forward
    detector ``D2`` becomes backward source ``S22``; the i-th forward
    source, real ones first, becomes backward detector ``D{i}{i}``).
    Edge names are preserved so forward and backward field maps align.
    Applying ``reverse`` twice restores the original names.
    """
    net = close(net)
    inverse = net.metadata.get("reverse_names")
    if inverse:
        names = dict(inverse)
    else:
        names = {}
        srcs = sorted(net.sources, key=lambda c: c.virtual)
        for i, comp in enumerate(srcs, start=1):
            names[comp.name] = f"D{i}{i}"
        for comp in net.detectors:
            names[comp.name] = backward_seed_name(comp.name)
        taken = set(names.values())
        clashes = [c.name for c in net.components if c.name not in names and c.name in taken]
        if clashes:
            raise NetlistError(f"cannot reverse: component names {clashes} clash with backward site names")
    flip_kind = {Kind.SOURCE: Kind.DETECTOR, Kind.DETECTOR: Kind.SOURCE, Kind.TERMINATOR: Kind.SOURCE}
    comps = []
    for comp in net.components:
        kind = flip_kind.get(comp.kind, comp.kind)
        virtual = comp.virtual or comp.kind is Kind.TERMINATOR
        comps.append(Component(names.get(comp.name, comp.name), kind, comp.modulator, virtual))
    edges = []
    for e in net.edges:
        edges.append(Edge(names.get(e.dst, e.dst), _FLIP_PORT[e.dst_port],
                          names.get(e.src, e.src), _FLIP_PORT[e.src_port], alias=e.name))

    def rename_ref(ref):
        if "->" in ref or "." not in ref:
            return ref
        comp, port = ref.split(".", 1)
        return f"{names.get(comp, comp)}.{_FLIP_PORT.get(port, port)}"

    channels = {k: tuple(rename_ref(r) for r in v) for k, v in net.channels.items()}
    # a channel keeps its edges but traverses them in the opposite order
    channels = {k: tuple(reversed(v)) for k, v in channels.items()}
    cuts = {k: tuple(rename_ref(r) for r in v) for k, v in net.cuts.items()}
    # edge names were frozen into aliases; strip the forward-only aliases on the way back
    meta = dict(net.metadata)
    direction = "forward" if meta.get("direction") == "backward" else "backward"
    meta["direction"] = direction
    meta["reverse_names"] = {v: k for k, v in names.items()}
    rev = Network(tuple(comps), tuple(edges), channels, cuts, meta)
    if inverse:
        rev = _restore_aliases(rev, meta.get("forward_aliases", {}))
        meta.pop("reverse_names")
        rev = replace(rev, metadata=meta)
    else:
        meta["forward_aliases"] = {e.name: e.alias for e in net.edges}
    return rev


def _restore_aliases(net: Network, aliases: Mapping[str, str | None]) -> Network:
    edges = tuple(replace(e, alias=aliases.get(e.name, e.alias)) for e in net.edges)
    return replace(net, edges=edges)


# ---------------------------------------------------------------------------
# Presets


PRESETS = ("simple", "nested", "double_nested")


def build_preset(kind: str) -> Network:
    """One of the three reference interferometers.

    Forward propagation runs from top to bottom.  Open splitter inputs are
    left open on purpose; :func:`close` attaches vacuum sources there, and
    those ports become the backward detector sites (see :func:`reverse`).
    """
    try:
        builder = {"simple": _simple, "nested": _nested, "double_nested": _double_nested}[kind]
    except KeyError:
        raise ValueError(f"unknown preset {kind!r}; choose from {', '.join(PRESETS)}") from None
    return builder()


def _simple() -> Network:
    b = NetworkBuilder()
    for name, kind in [("S1", "source"), ("BS1", "beamsplitter"), ("M1", "mirror"), ("M2", "mirror"),
                       ("BS2", "beamsplitter"), ("D1", "detector"), ("D2", "detector")]:
        b.add(name, kind)
    b.connect("S1.out", "BS1.in1", "in")
    b.connect("BS1.out1", "M1.in", "q1a")
    b.connect("M1.out", "BS2.in1", "q1b")
    b.connect("BS1.out2", "M2.in", "q2a")
    b.connect("M2.out", "BS2.in2", "q2b")
    b.connect("BS2.out1", "D1.in", "d1")
    b.connect("BS2.out2", "D2.in", "d2")
    b.channel("Q1", ["q1a", "q1b"])
    b.channel("Q2", ["q2a", "q2b"])
    b.cut("L1", ["in", "BS1.in2"])
    b.cut("L2", ["q1a", "q2a"])
    b.cut("L3", ["q1b", "q2b"])
    b.cut("L4", ["d1", "d2"])
    return b.build(preset="simple")


def _nested() -> Network:
    """Single-nested MZI.

    Q1 is the reflected branch of BS1 (BS1-M1-A2-BS4); the transmitted
    branch carries A1 into the nested MZI BS2-{Q2: M2,B1 | Q3: M3,C1}-BS3.
    BS3's dark output passes E1 to BS4; its bright output is D3.
    Cut ``L6`` (alias ``mid``) sits just before the recombining splitters.

    Backward detector sites are the three exit ports of the reversed
    network: ``D11`` at the S1 port, ``D22`` at the spare BS1 input and
    ``D33`` at the spare BS2 input.
    """
    b = NetworkBuilder()
    b.add("S1", "source")
    for bs in ("BS1", "BS2", "BS3", "BS4"):
        b.add(bs, "beamsplitter")
    for m in ("M1", "M2", "M3"):
        b.add(m, "mirror")
    for mod in ("A1", "A2", "B1", "C1", "E1"):
        b.add(mod, "modulator", ModulatorSpec())
    for d in ("D1", "D2", "D3"):
        b.add(d, "detector")
    b.connect("S1.out", "BS1.in1", "in")
    b.connect("BS1.out2", "M1.in", "q1a")
    b.connect("M1.out", "A2.in", "q1b")
    b.connect("A2.out", "BS4.in1", "q1c")
    b.connect("BS1.out1", "A1.in", "a1a")
    b.connect("A1.out", "BS2.in1", "a1b")
    b.connect("BS2.out1", "M2.in", "q2a")
    b.connect("M2.out", "B1.in", "q2b")
    b.connect("B1.out", "BS3.in1", "q2c")
    b.connect("BS2.out2", "M3.in", "q3a")
    b.connect("M3.out", "C1.in", "q3b")
    b.connect("C1.out", "BS3.in2", "q3c")
    b.connect("BS3.out1", "E1.in", "e1a")
    b.connect("E1.out", "BS4.in2", "e1b")
    b.connect("BS3.out2", "D3.in", "d3")
    b.connect("BS4.out1", "D1.in", "d1")
    b.connect("BS4.out2", "D2.in", "d2")
    b.channel("Q1", ["q1a", "q1b", "q1c"])
    b.channel("Q2", ["q2a", "q2b", "q2c"])
    b.channel("Q3", ["q3a", "q3b", "q3c"])
    b.cut("L1", ["in", "BS1.in2", "BS2.in2"])
    b.cut("L2", ["q1a", "a1a", "BS2.in2"])
    b.cut("L3", ["q1b", "a1b", "BS2.in2"])
    b.cut("L4", ["q1b", "q2a", "q3a"])
    b.cut("L5", ["q1b", "q2b", "q3b"])
    b.cut("L6", ["q1c", "q2c", "q3c"])
    b.cut("L7", ["q1c", "e1b", "d3"])
    b.cut("L8", ["d1", "d2", "d3"])
    b.cut("mid", ["q1c", "q2c", "q3c"])
    return b.build(preset="nested")


def _double_nested() -> Network:
    """Symmetric double-nested MZI.

    BS1 feeds a left and a right nested MZI (BS2L..BS3L, BS2R..BS3R).
    Bright outputs go to D1 (left) and D4 (right); the dark outputs meet
    at BS4 via the two faces M2L/M2R of the double-sided mirror, feeding
    D2 and D3.  Channels Q1, Q2 (left) and Q3, Q4 (right) are the nested arms.
    """
    b = NetworkBuilder()
    b.add("S1", "source")
    for bs in ("BS1", "BS2L", "BS3L", "BS2R", "BS3R", "BS4"):
        b.add(bs, "beamsplitter")
    for m in ("M1L", "M1R", "ML1", "ML2", "MR1", "MR2", "M2L", "M2R"):
        b.add(m, "mirror")
    for d in ("D1", "D2", "D3", "D4"):
        b.add(d, "detector")
    b.connect("S1.out", "BS1.in1", "in")
    b.connect("BS1.out1", "M1L.in", "la1")
    b.connect("M1L.out", "BS2L.in1", "la2")
    b.connect("BS1.out2", "M1R.in", "ra1")
    b.connect("M1R.out", "BS2R.in1", "ra2")
    for side in ("L", "R"):
        s = side.lower()
        b.connect(f"BS2{side}.out1", f"M{side}1.in", f"q{s}1a")
        b.connect(f"M{side}1.out", f"BS3{side}.in1", f"q{s}1b")
        b.connect(f"BS2{side}.out2", f"M{side}2.in", f"q{s}2a")
        b.connect(f"M{side}2.out", f"BS3{side}.in2", f"q{s}2b")
        b.connect(f"BS3{side}.out1", f"M2{side}.in", f"dk{s}1")
    b.connect("M2L.out", "BS4.in1", "dkl2")
    b.connect("M2R.out", "BS4.in2", "dkr2")
    b.connect("BS3L.out2", "D1.in", "d1")
    b.connect("BS3R.out2", "D4.in", "d4")
    b.connect("BS4.out1", "D2.in", "d2")
    b.connect("BS4.out2", "D3.in", "d3")
    b.channel("Q1", ["ql1a", "ql1b"])
    b.channel("Q2", ["ql2a", "ql2b"])
    b.channel("Q3", ["qr1a", "qr1b"])
    b.channel("Q4", ["qr2a", "qr2b"])
    b.cut("L1", ["in", "BS1.in2", "BS2L.in2", "BS2R.in2"])
    b.cut("L2", ["la1", "ra1", "BS2L.in2", "BS2R.in2"])
    b.cut("L3", ["la2", "ra2", "BS2L.in2", "BS2R.in2"])
    b.cut("L4", ["ql1a", "ql2a", "qr1a", "qr2a"])
    b.cut("L5", ["ql1b", "ql2b", "qr1b", "qr2b"])
    b.cut("L6", ["dkl1", "d1", "dkr1", "d4"])
    b.cut("L7", ["dkl2", "d1", "dkr2", "d4"])
    b.cut("L8", ["d1", "d2", "d3", "d4"])
    return b.build(preset="double_nested")
