"""Run every modulation scenario on the nested preset and save line tables.

Writes one CSV per (scenario, target), an SVG panel per modulator and a
summary JSON into ``--out`` (default ``results/scenarios``).
"""

import argparse
import json
from pathlib import Path

from wavecut.cli import main as cli_main
from wavecut.modulation import DEFAULT_EPS, SCENARIOS


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", type=Path, default=Path("results/scenarios"))
    parser.add_argument("--eps", type=float, default=DEFAULT_EPS)
    args = parser.parse_args()

    for name in SCENARIOS:
        code = cli_main(["scenario", name, "--eps", str(args.eps), "--format", "csv", "--out", str(args.out)])
        if code:
            raise SystemExit(code)
    summaries = {n: json.loads((args.out / f"{n}_summary.json").read_text()) for n in SCENARIOS}
    print("\nlowest order per modulator:")
    for name, s in summaries.items():
        for target, orders in s["lowest_orders"].items():
            text = ", ".join(f"{m}:{o}" for m, o in orders.items()) or "-"
            print(f"  {name} {target:>4s}  {text}")


if __name__ == "__main__":
    main()
