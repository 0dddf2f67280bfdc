"""Print forward intensity, weak value and encounter tables for the nested preset.

Usage: python scripts/nested_tables.py [--preset nested] [--cut mid]
"""

import argparse

from wavecut import build_preset, propagate
from wavecut.netgraph import close
from wavecut.propagate import intensities
from wavecut.tsvf import DIVERGENCE_TOL, denominators, tsvf_table


def _fmt(x):
    # round first so tiny negative noise does not print as -0.0000
    return "" if x is None else f"{round(x, 12) + 0.0:9.4f}"


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--preset", default="nested")
    parser.add_argument("--cut", default=None, help="cut used for the ABL-normalized column")
    args = parser.parse_args()

    net = close(build_preset(args.preset))
    seed = next(s.name for s in net.sources if not s.virtual)
    im = intensities(propagate(net, seed))
    print(f"forward seed {seed}; detector readings:")
    for det, p in im.detectors.items():
        print(f"  {det:>14s}  {p:.6f}")

    print("\nweak-value denominators:")
    for det, d in denominators(net, seed).items():
        print(f"  {det:>14s}  |D| = {abs(d):.6f}" + ("  (dark: diverges)" if abs(d) < DIVERGENCE_TOL else ""))

    for det in net.detectors:
        rows = tsvf_table(net, seed, det.name, args.cut)
        print(f"\npost-selection {det.name}  [{rows[0]['status']}]")
        print(f"  {'edge':>24s} {'Re w':>9s} {'Im w':>9s} {'P':>9s} {'P_bar':>9s}")
        for r in rows:
            re_w, im_w, pbar = (_fmt(r[k]) for k in ("re_w", "im_w", "P_bar"))
            print(f"  {r['edge']:>24s} {re_w:>9s} {im_w:>9s} {_fmt(r['P']):>9s} {pbar:>9s}")


if __name__ == "__main__":
    main()
