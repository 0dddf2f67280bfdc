"""``wavecut`` command line.

Exit codes: 0 success, 1 usage or input error, 2 analysis error (a sum
rule violated, or a weak value that diverges).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import modulation as mod
from .netgraph import PRESETS, NetlistError, build_preset, close, parse_network, reverse, validate
from .propagate import (TOL, PropagationError, energy_sum_rules, intensities, propagate,
                        valid_cuts)
from .render import QUANTITIES, RenderSpec, lines_schematic, render_schematic
from .tsvf import (DarkPortDivergence, ZeroCutTotal, abl_normalize, backward_field, encounter, encounter_sum_rules,
                   forward_detector_for, rows_to_csv, rows_to_json, tsvf_table, weak_values)

EXIT_OK, EXIT_USAGE, EXIT_ANALYSIS = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def tolerance() -> float:
    raw = os.environ.get("WAVECUT_TOL")
    return float(raw) if raw else TOL


def _add_source(p):
    g = p.add_mutually_exclusive_group()
    g.add_argument("--preset", choices=PRESETS)
    g.add_argument("--netlist", type=Path)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="wavecut", description="Forward/backward fields, weak values and encounter "
                                                 "probabilities in Mach-Zehnder networks.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    sub.add_parser("presets", help="list the built-in interferometers")

    p = sub.add_parser("simulate", help="propagate one seed, print amplitudes and intensities")
    _add_source(p)
    p.add_argument("--seed")
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)

    for name, helptext in (("weak", "weak values for one post-selection"),
                           ("encounter", "encounter probabilities for one backward seed")):
        p = sub.add_parser(name, help=helptext)
        _add_source(p)
        p.add_argument("--seed")
        p.add_argument("--post-select")
        p.add_argument("--backward-seed")
        p.add_argument("--cut")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", type=Path)
        p.add_argument("--strict", action="store_true")

    p = sub.add_parser("check", help="verify every sum rule; nonzero exit on violation")
    _add_source(p)

    p = sub.add_parser("modulate", help="Fourier lines and perturbation orders at one target")
    _add_source(p)
    p.add_argument("--seed")
    p.add_argument("--target", required=True)
    p.add_argument("--backward-seed")
    p.add_argument("--eps", type=float)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)
    p.add_argument("--strict", action="store_true")

    p = sub.add_parser("scenario", help="run one of the nested-MZI modulation scenarios")
    p.add_argument("name", choices=mod.SCENARIOS)
    p.add_argument("--eps", type=float, default=mod.DEFAULT_EPS)
    p.add_argument("--duration", type=float, default=1.0)
    p.add_argument("--samples", type=int, default=4096)
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", type=Path)

    p = sub.add_parser("render", help="SVG schematic, stroke width encoding a quantity")
    _add_source(p)
    p.add_argument("--quantity", choices=QUANTITIES, default="forward_p")
    p.add_argument("--seed")
    p.add_argument("--post-select")
    p.add_argument("--backward-seed")
    p.add_argument("--cut")
    p.add_argument("--svg", type=Path)
    return parser


def load_network(args):
    if getattr(args, "netlist", None):
        try:
            text = args.netlist.read_text(encoding="utf-8")
        except OSError as exc:
            raise UsageError(f"cannot read netlist: {exc}") from None
        net = parse_network(text)
    else:
        net = build_preset(getattr(args, "preset", None) or "nested")
    report = validate(net)
    if not report.ok:
        raise UsageError("; ".join(i.message for i in report.errors()))
    return net


def _forward_seed(net, seed):
    if seed:
        return seed
    return next(s.name for s in close(net).sources if not s.virtual)


def _post_selection(net, args) -> str:
    if args.post_select and args.backward_seed:
        raise UsageError("give either --post-select or --backward-seed")
    if args.post_select:
        return args.post_select
    if args.backward_seed:
        try:
            return forward_detector_for(net, args.backward_seed)
        except PropagationError as exc:
            raise UsageError(str(exc)) from None
    raise UsageError("--post-select or --backward-seed is required")


def _emit(text: str, args, filename: str):
    out = getattr(args, "out", None)
    if out:
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def cmd_presets(args):
    for name in PRESETS:
        print(name)
    return EXIT_OK


def cmd_simulate(args):
    net = load_network(args)
    seed = _forward_seed(net, args.seed)
    target = net
    if not close(net).has_component(seed):
        target = reverse(net)
    f = propagate(target, seed)
    im = intensities(f)
    if args.format == "json":
        doc = json.loads(f.to_json())
        doc["intensities"] = json.loads(im.to_json())["edges"]
        doc["detectors"] = json.loads(im.to_json())["detectors"]
        _emit(json.dumps(doc, indent=2), args, "simulate.json")
    else:
        _emit(im.to_csv(), args, "simulate.csv")
    return EXIT_OK


def cmd_weak(args):
    net = load_network(args)
    seed = _forward_seed(net, args.seed)
    post = _post_selection(net, args)
    rows = tsvf_table(net, seed, post, args.cut)
    diverged = rows and rows[0]["status"] == "diverges"
    if diverged:
        print(f"wavecut: weak value diverges (dark post-selection at {post})", file=sys.stderr)
    if not (diverged and args.strict):
        _emit(rows_to_json(rows) if args.format == "json" else rows_to_csv(rows), args, f"weak_{post}.{args.format}")
    return EXIT_ANALYSIS if diverged else EXIT_OK


def cmd_encounter(args):
    net = load_network(args)
    seed = _forward_seed(net, args.seed)
    post = _post_selection(net, args)
    rows = tsvf_table(net, seed, post, args.cut)
    diverged = rows and rows[0]["status"] == "diverges"
    if diverged and args.strict:
        print(f"wavecut: weak value diverges (dark post-selection at {post})", file=sys.stderr)
        return EXIT_ANALYSIS
    _emit(rows_to_json(rows) if args.format == "json" else rows_to_csv(rows), args, f"encounter_{post}.{args.format}")
    return EXIT_OK


def cmd_check(args):
    net = load_network(args)
    tol = tolerance()
    closed = close(net)
    result = {"tolerance": tol, "cuts": valid_cuts(closed), "rules": {}}
    for src in (s for s in closed.sources if not s.virtual):
        rep = energy_sum_rules(closed, src.name)
        enc = encounter_sum_rules(closed, src.name)
        rules = dict(rep.rules)
        rules["encounter_edge_sum"] = enc.max_edge_residual
        rules["encounter_cut_sum"] = enc.max_cut_residual
        # reciprocity of the total transfer
        rules["reciprocity"] = _reciprocity_residual(closed, src.name)
        result["rules"][src.name] = rules
    worst = max((v for r in result["rules"].values() for v in r.values()), default=0.0)
    result["max_residual"] = worst
    result["ok"] = worst <= tol
    print(json.dumps(result, indent=2))
    return EXIT_OK if result["ok"] else EXIT_ANALYSIS


def _reciprocity_residual(net, source: str) -> float:
    rev = reverse(net)
    back = {old: new for new, old in rev.metadata["reverse_names"].items()}
    fwd = intensities(propagate(net, source)).detectors
    worst = 0.0
    for det, reading in fwd.items():
        im = intensities(propagate(rev, back[det]))
        worst = max(worst, abs(reading - im.detectors[back[source]]))
    return float(worst)


def _plan(args):
    return mod.SamplingPlan(duration=args.duration, samples=args.samples)


def cmd_modulate(args):
    net = load_network(args)
    seed = _forward_seed(net, args.seed)
    if net.metadata.get("preset") == "nested":
        net = mod.configure(net, args.eps if args.eps is not None else mod.DEFAULT_EPS)
    elif args.eps is not None:
        net = net.with_modulators({m.name: {"eps0": args.eps} for m in net.modulators if m.modulator.freq > 0})
    try:
        analysis = mod.analyze_orders(net, seed, args.target, plan=_plan(args),
                                      backward_seed=args.backward_seed, strict=args.strict)
    except KeyError as exc:
        raise UsageError(str(exc)) from None
    except (mod.AmbiguousLine, mod.FrequencyCollision) as exc:
        print(f"wavecut: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS
    text = mod.lines_to_json(analysis.lines) if args.format == "json" else mod.lines_to_csv(analysis.lines)
    _emit(text, args, f"orders_{args.target}.{args.format}")
    return EXIT_OK


def cmd_scenario(args):
    report = mod.scenario(args.name, args.eps, _plan(args))
    summary = {"scenario": args.name, "backward_seed": report.backward_seed,
               "lowest_orders": report.lowest_orders()}
    if args.out:
        args.out.mkdir(parents=True, exist_ok=True)
        for target, analysis in report.tables.items():
            text = mod.lines_to_json(analysis.lines) if args.format == "json" else mod.lines_to_csv(analysis.lines)
            (args.out / f"{args.name}_{target}.{args.format}").write_text(text, encoding="utf-8")
        net = report.network
        for m in sorted({m for orders in summary["lowest_orders"].values() for m in orders}):
            per_edge = {}
            for target, orders in summary["lowest_orders"].items():
                edge = net.edge(target).name if not net.has_component(target) else \
                    next(iter(close(net).incoming(target).values())).name
                per_edge[edge] = orders.get(m, 0)
            svg = lines_schematic(net, per_edge, f"{args.name}: lines from {m}")
            (args.out / f"{args.name}_{m}.svg").write_text(svg, encoding="utf-8")
        (args.out / f"{args.name}_summary.json").write_text(json.dumps(summary, indent=2), encoding="utf-8")
    print(json.dumps(summary, indent=2))
    return EXIT_OK


def cmd_render(args):
    net = load_network(args)
    seed = _forward_seed(net, args.seed)
    q = args.quantity
    psi = propagate(net, seed)
    if q == "forward_p":
        values = intensities(psi).edges
    else:
        post = _post_selection(net, args)
        chi = backward_field(net, post)
        if q == "backward_p":
            values = intensities(chi).edges
        elif q == "weak_re":
            values = {k: v.real for k, v in weak_values(psi, chi, args.cut).values.items()}
        elif q == "encounter":
            values = encounter(psi, chi).values
        else:
            if not args.cut:
                raise UsageError("--cut is required for encounter_normalized")
            values = abl_normalize(encounter(psi, chi), args.cut)
    svg = render_schematic(net, {k: (float(v) if np.isrealobj(v) else v) for k, v in values.items()},
                           RenderSpec(q), title=f"{q} ({seed})")
    if args.svg:
        args.svg.write_text(svg, encoding="utf-8")
    else:
        sys.stdout.write(svg)
    return EXIT_OK


COMMANDS = {
    "presets": cmd_presets, "simulate": cmd_simulate, "weak": cmd_weak, "encounter": cmd_encounter,
    "check": cmd_check, "modulate": cmd_modulate, "scenario": cmd_scenario, "render": cmd_render,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except NetlistError as exc:
        print(f"wavecut: netlist error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (UsageError, PropagationError) as exc:
        print(f"wavecut: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DarkPortDivergence, ZeroCutTotal) as exc:
        print(f"wavecut: {exc}", file=sys.stderr)
        return EXIT_ANALYSIS


run = main

if __name__ == "__main__":
    sys.exit(main())
