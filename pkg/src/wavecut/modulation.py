"""Amplitude-modulated runs, Fourier lines, and perturbation-order tagging.

Modulators are evaluated quasi-statically: at sample time ``t`` every
modulator takes its instantaneous transmission.  Spectral lines are
assigned an order by halving every modulation depth and measuring the
amplitude scaling exponent; which modulators contribute is decided by
halving one depth at a time.  This resolves frequency coincidences (for
3/5/7/11/17 Hz, ``3+5 = 11-3`` and ``3+3+5 = 11``) whenever a single
combination actually carries the line.
"""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .netgraph import Kind, Network, build_preset, close, reverse
from .propagate import propagate

NESTED_FREQUENCIES = {"A2": 3.0, "A1": 5.0, "B1": 7.0, "C1": 11.0, "E1": 17.0}
DEFAULT_EPS = 0.01
LINE_THRESHOLD = 1e-10
EXPONENT_TOL = 0.05
# absolute floor for the line threshold when the series mean is zero
_ABS_FLOOR = 1e-15


class FrequencyCollision(ValueError):
    pass


class AmbiguousLine(ValueError):
    pass


@dataclass(frozen=True)
class SamplingPlan:
    duration: float = 1.0
    samples: int = 4096
    targets: tuple[str, ...] = ()

    def __post_init__(self):
        if self.samples <= 0 or self.samples & (self.samples - 1):
            raise ValueError(f"samples must be a power of two, got {self.samples}")
        if self.duration <= 0:
            raise ValueError("duration must be positive")

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.samples) * (self.duration / self.samples)

    @property
    def nyquist(self) -> float:
        return self.samples / self.duration / 2


def configure(net: Network, eps: float | Mapping[str, float] = DEFAULT_EPS,
              frequencies: Mapping[str, float] = NESTED_FREQUENCIES, delta: float = 0.0) -> Network:
    """Set depth and frequency on the named modulators, leaving tau0 alone."""
    eps_map = eps if isinstance(eps, Mapping) else {name: eps for name in frequencies}
    updates = {}
    for name, f in frequencies.items():
        updates[name] = {"freq": float(f), "eps0": float(eps_map.get(name, 0.0)), "delta": delta}
    return net.with_modulators(updates)


def _check_plan(net: Network, plan: SamplingPlan, max_order: int = 3):
    active = [m.modulator for m in net.modulators if m.modulator.active]
    if not active:
        return
    top = max(m.freq for m in active)
    if plan.samples / plan.duration <= 2 * max_order * top:
        raise ValueError(f"Nyquist violation: {plan.samples} samples over {plan.duration} s "
                         f"cannot resolve {max_order} x {top} Hz")
    for m in active:
        cycles = m.freq * plan.duration
        if abs(cycles - round(cycles)) > 1e-9:
            raise ValueError(f"duration {plan.duration} s does not close the {m.freq} Hz period")


def _target_edge(net: Network, target: str) -> str:
    if net.has_component(target):
        comp = net.component(target)
        if comp.kind is not Kind.DETECTOR:
            raise KeyError(f"target {target!r} is not a detector or an edge")
        (edge,) = net.incoming(target).values()
        return edge.name
    return net.edge(target).name


def time_series(net: Network, seed: str, target: str, plan: SamplingPlan,
                backward_seed: str | None = None, max_order: int = 3) -> np.ndarray:
    """Intensity at ``target`` for each sample time.

    With ``backward_seed`` the series is the encounter probability
    ``p^f(t) * p^b(t)`` instead, the backward beam launched from that site
    of the reversed network.
    """
    net = close(net)
    _check_plan(net, plan, max_order)
    try:
        edge = _target_edge(net, target)
    except KeyError:
        raise KeyError(f"unknown target {target!r}") from None
    t = plan.times
    series = np.abs(propagate(net, seed, t).amplitudes[edge]) ** 2
    if backward_seed is not None:
        series = series * np.abs(propagate(reverse(net), backward_seed, t).amplitudes[edge]) ** 2
    return series


@dataclass(frozen=True)
class Spectrum:
    frequencies: np.ndarray
    amplitudes: np.ndarray
    dc: float
    nyquist: float = 0.0

    def at(self, freq: float) -> float:
        idx = int(np.argmin(np.abs(self.frequencies - freq)))
        if abs(self.frequencies[idx] - freq) > 1e-9:
            return 0.0
        return float(self.amplitudes[idx])

    def lines(self, threshold: float | None = None) -> list[tuple[float, float]]:
        if threshold is None:
            threshold = max(LINE_THRESHOLD * abs(self.dc), _ABS_FLOOR)
        keep = self.amplitudes > threshold
        return list(zip(self.frequencies[keep].tolist(), self.amplitudes[keep].tolist()))


def spectrum(samples, plan: SamplingPlan) -> Spectrum:
    """One-sided amplitude spectrum: a pure ``A cos`` tone reports ``A``."""
    x = np.asarray(samples, dtype=float)
    if x.shape != (plan.samples,):
        raise ValueError(f"expected {plan.samples} samples, got {x.shape}")
    n = plan.samples
    c = np.fft.rfft(x)
    k = np.arange(1, n // 2)
    return Spectrum(k / plan.duration, 2 * np.abs(c[1:n // 2]) / n, float(c[0].real / n),
                    float(abs(c[n // 2]) / n))


@dataclass(frozen=True)
class OrderLine:
    frequency: float
    modulator_combination: tuple[str, ...]
    order: int
    amplitude: float
    scaling_exponent: float
    candidates: tuple[tuple[str, ...], ...] = ()
    ambiguous: bool = False
    modulator_exponents: Mapping[str, float] = field(default_factory=dict, compare=False)

    @property
    def modulators(self) -> set[str]:
        """Modulators certainly involved (every candidate contains them)."""
        if not self.ambiguous:
            return {m for label in self.modulator_combination for m in label.split("=")}
        sets = [{m for label in c for m in label.split("=")} for c in self.candidates]
        return set.intersection(*sets) if sets else set()

    def as_row(self) -> dict:
        return {
            "frequency": self.frequency,
            "amplitude": self.amplitude,
            "combination": "*".join(self.modulator_combination) if not self.ambiguous
            else " | ".join("*".join(c) for c in self.candidates),
            "order": self.order,
            "exponent": self.scaling_exponent,
            "ambiguous": self.ambiguous,
        }


@dataclass(frozen=True)
class OrderAnalysis:
    lines: list[OrderLine]
    # lines above threshold that could not be tagged (beyond max_order, or no clean exponent)
    unresolved: list[tuple[float, float, float]]
    spectrum: Spectrum
    groups: Mapping[str, tuple[str, ...]]


def combination_table(frequencies: Mapping[str, float], max_order: int = 3) -> dict[float, list[tuple[str, ...]]]:
    """Every frequency |±f_a ±f_b ...| reachable with up to ``max_order`` factors."""
    names = sorted(frequencies)
    table: dict[float, set[tuple[str, ...]]] = {}
    for order in range(1, max_order + 1):
        for combo in itertools.combinations_with_replacement(names, order):
            for signs in itertools.product((1, -1), repeat=order - 1):
                total = frequencies[combo[0]] + sum(s * frequencies[n] for s, n in zip(signs, combo[1:]))
                f = round(abs(total), 9)
                if f > 0:
                    table.setdefault(f, set()).add(combo)
    return {f: sorted(v, key=lambda c: (len(c), c)) for f, v in table.items()}


def _groups(net: Network) -> dict[str, tuple[str, ...]]:
    """Active modulators grouped by frequency; members of a group must be identical."""
    by_freq: dict[float, list] = {}
    for m in net.modulators:
        if m.modulator.active:
            by_freq.setdefault(m.modulator.freq, []).append(m)
    groups = {}
    for f, mods in sorted(by_freq.items()):
        specs = {m.modulator for m in mods}
        if len(specs) > 1:
            raise FrequencyCollision(
                f"modulators {[m.name for m in mods]} share {f} Hz with different settings")
        groups["=".join(m.name for m in mods)] = tuple(m.name for m in mods)
    return groups


def _scaled(net: Network, members: Sequence[str], factor: float) -> Network:
    return net.with_modulators({n: {"eps0": net.component(n).modulator.eps0 * factor} for n in members})


def analyze_orders(net: Network, seed: str, target: str, eps_profile: Mapping[str, float] | None = None,
                   plan: SamplingPlan | None = None, max_order: int = 3,
                   backward_seed: str | None = None, strict: bool = False) -> OrderAnalysis:
    net = close(net)
    if eps_profile:
        net = net.with_modulators({n: {"eps0": float(e)} for n, e in eps_profile.items()})
    plan = plan or SamplingPlan()
    groups = _groups(net)
    all_active = [n for members in groups.values() for n in members]

    def spec_of(n):
        return spectrum(time_series(n, seed, target, plan, backward_seed, max_order), plan)

    base = spec_of(net)
    half = spec_of(_scaled(net, all_active, 0.5))
    per_group = {g: spec_of(_scaled(net, members, 0.5)) for g, members in groups.items()}
    freqs = {g: net.component(members[0]).modulator.freq for g, members in groups.items()}
    table = combination_table(freqs, max_order) if freqs else {}

    lines, unresolved = [], []
    for f, amp in base.lines():
        ratio = amp / half.at(f) if half.at(f) > 0 else math.inf
        exponent = math.log2(ratio) if math.isfinite(ratio) else math.inf
        order = round(exponent) if math.isfinite(exponent) else -1
        if order < 1 or order > max_order or abs(exponent - order) >= EXPONENT_TOL:
            unresolved.append((f, amp, exponent))
            continue
        candidates = tuple(c for c in table.get(round(f, 9), ()) if len(c) == order)
        if not candidates:
            unresolved.append((f, amp, exponent))
            continue
        per_exp = {}
        for g, sp in per_group.items():
            a = sp.at(f)
            per_exp[g] = math.log2(amp / a) if a > 0 else math.inf
        matches = [c for c in candidates
                   if all(abs(per_exp[g] - Counter(c)[g]) < EXPONENT_TOL for g in groups)]
        if len(matches) == 1:
            lines.append(OrderLine(f, matches[0], order, amp, exponent, candidates, False, per_exp))
        else:
            if strict:
                raise AmbiguousLine(f"line at {f} Hz matches {len(matches) or len(candidates)} combinations")
            pool = tuple(matches) or candidates
            lines.append(OrderLine(f, (), order, amp, exponent, pool, True, per_exp))
    return OrderAnalysis(lines, unresolved, base, groups)


def classify_orders(net: Network, seed: str, target: str, eps_profile: Mapping[str, float] | None = None,
                    plan: SamplingPlan | None = None, max_order: int = 3,
                    backward_seed: str | None = None, strict: bool = False) -> list[OrderLine]:
    """Spectral lines at ``target`` tagged with modulator combination and order."""
    return analyze_orders(net, seed, target, eps_profile, plan, max_order, backward_seed, strict).lines


def lowest_orders(lines: Sequence[OrderLine]) -> dict[str, int]:
    """Lowest order at which each modulator is seen."""
    best: dict[str, int] = {}
    for line in lines:
        for m in line.modulators:
            best[m] = min(best.get(m, line.order), line.order)
    return dict(sorted(best.items()))


# ---------------------------------------------------------------------------
# Modulation scenarios on the nested preset

SCENARIOS = ("fig5a", "fig5b", "fig5c", "fig5d", "fig5e")
FORWARD_TARGETS = ("D1", "D2", "D3", "e1b")
# edges just downstream of each modulator
SECTION_TARGETS = ("q1c", "a1b", "q2c", "q3c", "e1b")


@dataclass(frozen=True)
class ScenarioReport:
    name: str
    network: Network = field(repr=False)
    plan: SamplingPlan
    backward_seed: str | None
    tables: Mapping[str, OrderAnalysis] = field(repr=False)
    series: Mapping[str, np.ndarray] = field(repr=False)

    def lowest_orders(self) -> dict[str, dict[str, int]]:
        return {t: lowest_orders(a.lines) for t, a in self.tables.items()}


def scenario_network(name: str, eps: float = DEFAULT_EPS) -> Network:
    if name not in SCENARIOS:
        raise ValueError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    net = configure(build_preset("nested"), eps)
    if name in ("fig5b", "fig5e"):
        net = net.with_modulators({"C1": net.component("B1").modulator})
    if name == "fig5c":
        net = net.with_modulators({"A2": {"tau0": 0.0, "eps0": 0.0}})
    return net


def scenario(name: str, eps: float = DEFAULT_EPS, plan: SamplingPlan | None = None) -> ScenarioReport:
    net = scenario_network(name, eps)
    plan = plan or SamplingPlan()
    backward = "S11" if name in ("fig5d", "fig5e") else None
    targets = plan.targets or (SECTION_TARGETS if backward else FORWARD_TARGETS)
    tables, series = {}, {}
    for target in targets:
        series[target] = time_series(net, "S1", target, plan, backward)
        tables[target] = analyze_orders(net, "S1", target, plan=plan, backward_seed=backward)
    return ScenarioReport(name, net, plan, backward, tables, series)


def lines_to_json(lines: Sequence[OrderLine]) -> str:
    return json.dumps([ln.as_row() for ln in lines], indent=2)


def lines_to_csv(lines: Sequence[OrderLine]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=["frequency", "amplitude", "combination", "order", "exponent", "ambiguous"],
                            lineterminator="\n")
    writer.writeheader()
    for ln in lines:
        row = ln.as_row()
        row["amplitude"] = f"{row['amplitude']:.17g}"
        row["exponent"] = f"{row['exponent']:.17g}"
        writer.writerow(row)
    return buf.getvalue()
