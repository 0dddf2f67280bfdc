"""Weak values and encounter probabilities from forward/backward fields.

The backward field ``chi`` is the physical amplitude of a beam launched
backwards from a detector site through :func:`~wavecut.netgraph.reverse`.
For a real seed it equals the complex conjugate of the backward-evolving
bra, so the weak-value numerator is simply ``chi * psi`` per edge.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .netgraph import Kind, Network, backward_seed_name, close, reverse
from .propagate import TOL, FieldMap, PropagationError, intensities, propagate, valid_cuts

DIVERGENCE_TOL = 1e-10


class DarkPortDivergence(ArithmeticError):
    """Post-selection on a dark port: the weak-value denominator vanishes."""

    def __init__(self, post_selection: str, denominator: complex):
        self.post_selection = post_selection
        self.denominator = denominator
        super().__init__(
            f"weak value diverges (dark post-selection at {post_selection}, |D| = {abs(denominator):.3g})")


class ZeroCutTotal(ZeroDivisionError):
    pass


def backward_field(net: Network, detector_k: str, time=0.0) -> FieldMap:
    """Launch a unit beam backwards from the site of forward detector ``detector_k``."""
    closed = close(net)
    if detector_k not in {d.name for d in closed.detectors}:
        raise PropagationError(f"unknown detector {detector_k!r}")
    rev = reverse(closed)
    site = _backward_site(rev, detector_k)
    return propagate(rev, site, time)


def _backward_site(rev: Network, detector: str) -> str:
    for new, old in rev.metadata["reverse_names"].items():
        if old == detector:
            return new
    return backward_seed_name(detector)


def forward_detector_for(net: Network, site: str) -> str:
    """Inverse of the backward naming: ``S22`` -> ``D2``."""
    closed = close(net)
    rev = reverse(closed)
    names = rev.metadata["reverse_names"]
    if site in names and closed.component(names[site]).kind is Kind.DETECTOR:
        return names[site]
    raise PropagationError(f"{site!r} is not a backward source site")


def overlap(psi: FieldMap, chi: FieldMap, cut: Iterable[str] | str):
    net = psi.network
    edges = net.cut_edges(cut) if isinstance(cut, str) else net.resolve(cut)
    return sum(chi.amplitudes[e] * psi.amplitudes[e] for e in edges)


def overlaps_by_cut(psi: FieldMap, chi: FieldMap) -> dict[str, complex]:
    return {c: overlap(psi, chi, c) for c in valid_cuts(psi.network)}


@dataclass(frozen=True)
class WeakValueMap:
    values: Mapping[str, complex]
    denominator: complex
    post_selection: str

    def __getitem__(self, edge: str) -> complex:
        return self.values[edge]

    def cut_sum(self, net: Network, cut: str) -> complex:
        return sum(self.values[e] for e in net.cut_edges(cut))


def weak_values(psi: FieldMap, chi: FieldMap, reference_cut: str | Iterable[str] | None = None) -> WeakValueMap:
    """Weak value of the section projector on every edge.

    Raises :class:`DarkPortDivergence` when ``|D| < 1e-10``.
    """
    if np.ndim(psi.time) or np.ndim(chi.time):
        raise ValueError("weak values are defined for a single time instant")
    if psi.time != chi.time:
        raise ValueError("forward and backward fields are at different times")
    cuts = valid_cuts(psi.network)
    if reference_cut is None:
        if not cuts:
            raise ValueError("network declares no valid cut")
        reference_cut = cuts[0]
    d = complex(overlap(psi, chi, reference_cut))
    for c in cuts:
        other = complex(overlap(psi, chi, c))
        if abs(other - d) > TOL:
            raise ValueError(f"overlap differs between cuts ({reference_cut!s} vs {c}): fields are inconsistent")
    post = _post_selection_name(psi.network, chi.seed[0])
    if abs(d) < DIVERGENCE_TOL:
        raise DarkPortDivergence(post, d)
    values = {e: complex(chi.amplitudes[e] * psi.amplitudes[e] / d) for e in psi.amplitudes}
    return WeakValueMap(values, d, post)


def denominators(net: Network, forward_seed: str, time=0.0) -> dict[str, complex]:
    """Overlap ``D`` for every post-selection; ``|D| < DIVERGENCE_TOL`` marks a dark port."""
    closed = close(net)
    psi = propagate(closed, forward_seed, time)
    cut = valid_cuts(closed)[0]
    return {d.name: complex(overlap(psi, backward_field(closed, d.name, time), cut)) for d in closed.detectors}


def _post_selection_name(net: Network, site: str) -> str:
    try:
        return forward_detector_for(net, site)
    except PropagationError:
        return site


@dataclass(frozen=True)
class EncounterMap:
    values: Mapping[str, float | np.ndarray]
    forward_seed: str
    backward_seed: str
    network: Network = field(repr=False, compare=False)

    def __getitem__(self, ref: str):
        return self.values[self.network.edge(ref).name]

    def support(self, tol: float = TOL) -> set[str]:
        return {e for e, p in self.values.items() if np.max(p) > tol}


def encounter(psi: FieldMap, chi: FieldMap) -> EncounterMap:
    """``P_e = |chi_e|^2 |psi_e|^2`` on every edge."""
    pf = intensities(psi).edges
    pb = intensities(chi).edges
    values = {e: pf[e] * pb[e] for e in pf}
    return EncounterMap(values, psi.seed[0], chi.seed[0], psi.network)


def abl_normalize(em: EncounterMap, cut: str | Iterable[str]) -> dict[str, float]:
    net = em.network
    edges = net.cut_edges(cut) if isinstance(cut, str) else net.resolve(cut)
    total = sum(em.values[e] for e in edges)
    if np.any(np.asarray(total) <= 0):
        raise ZeroCutTotal(f"encounter probability vanishes on cut {cut!r}")
    return {e: em.values[e] / total for e in edges}


@dataclass(frozen=True)
class EncounterSumRules:
    per_edge: Mapping[str, float]
    per_cut: Mapping[str, float]

    @property
    def max_edge_residual(self) -> float:
        return max(self.per_edge.values(), default=0.0)

    @property
    def max_cut_residual(self) -> float:
        return max(self.per_cut.values(), default=0.0)


def encounter_sum_rules(net: Network, forward_seed: str, time=0.0) -> EncounterSumRules:
    """Check sum_s P_e,s = p^f_e on every edge and the double sum = 1 on every cut."""
    closed = close(net)
    psi = propagate(closed, forward_seed, time)
    pf = intensities(psi).edges
    totals = {e: 0.0 for e in pf}
    for det in closed.detectors:
        em = encounter(psi, backward_field(closed, det.name, time))
        for e, p in em.values.items():
            totals[e] = totals[e] + p
    per_edge = {e: float(np.max(np.abs(totals[e] - pf[e]))) for e in pf}
    per_cut = {c: float(np.max(np.abs(sum(totals[e] for e in closed.cut_edges(c)) - 1)))
               for c in valid_cuts(closed)}
    return EncounterSumRules(per_edge, per_cut)


def tsvf_table(net: Network, forward_seed: str, post_selection: str, cut: str | None = None,
               time=0.0) -> list[dict]:
    """Rows of (edge, post_selection, re_w, im_w, P, P_bar, status)."""
    psi = propagate(net, forward_seed, time)
    chi = backward_field(net, post_selection, time)
    em = encounter(psi, chi)
    try:
        wv = weak_values(psi, chi, cut)
        status = "ok"
    except DarkPortDivergence:
        wv, status = None, "diverges"
    pbar = {}
    if cut is not None:
        try:
            pbar = abl_normalize(em, cut)
        except ZeroCutTotal:
            pass
    rows = []
    for e in psi.amplitudes:
        rows.append({
            "edge": e,
            "post_selection": post_selection,
            "re_w": None if wv is None else wv[e].real,
            "im_w": None if wv is None else wv[e].imag,
            "P": float(em.values[e]),
            "P_bar": float(pbar[e]) if e in pbar else None,
            "status": status,
        })
    return rows


def rows_to_json(rows: list[dict]) -> str:
    return json.dumps(rows, indent=2)


def rows_to_csv(rows: list[dict]) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: (f"{v:.17g}" if isinstance(v, float) else ("" if v is None else v))
                         for k, v in row.items()})
    return buf.getvalue()
