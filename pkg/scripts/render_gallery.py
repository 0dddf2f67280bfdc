"""Render SVG schematics of every preset for each plotted quantity."""

import argparse
from pathlib import Path

from wavecut.cli import main as cli_main
from wavecut.netgraph import PRESETS, build_preset, close
from wavecut.render import QUANTITIES


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", type=Path, default=Path("results/gallery"))
    args = parser.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for preset in PRESETS:
        detectors = [d.name for d in close(build_preset(preset)).detectors]
        cut = next(iter(build_preset(preset).cuts))
        for q in QUANTITIES:
            posts = [None] if q == "forward_p" else detectors
            for post in posts:
                argv = ["render", "--preset", preset, "--quantity", q, "--cut", cut]
                name = f"{preset}_{q}" + (f"_{post}" if post else "")
                if post:
                    argv += ["--post-select", post]
                code = cli_main(argv + ["--svg", str(args.out / f"{name}.svg")])
                print(f"{name:40s} {'ok' if code == 0 else 'skipped (exit %d)' % code}")


if __name__ == "__main__":
    main()
