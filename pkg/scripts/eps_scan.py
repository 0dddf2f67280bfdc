"""Fit the eps-scaling of selected spectral lines over a range of depths.

A clean order-n line has log(amplitude) linear in log(eps) with slope n;
this scan shows where the perturbative picture starts to bend.
"""

import argparse

import numpy as np

from wavecut.modulation import SamplingPlan, configure, spectrum, time_series
from wavecut.netgraph import build_preset


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--target", default="D2")
    parser.add_argument("--lines", type=float, nargs="+", default=[3.0, 7.0, 2.0, 12.0, 24.0])
    parser.add_argument("--eps", type=float, nargs="+", default=[0.001, 0.003, 0.01, 0.03, 0.1])
    args = parser.parse_args()

    plan = SamplingPlan()
    base = build_preset("nested")
    amps = np.zeros((len(args.eps), len(args.lines)))
    for i, eps in enumerate(args.eps):
        sp = spectrum(time_series(configure(base, eps), "S1", args.target, plan), plan)
        amps[i] = [sp.at(f) for f in args.lines]

    log_eps = np.log(args.eps)
    print(f"target {args.target}")
    print(f"{'freq':>8s} {'slope':>8s}  amplitudes")
    for j, f in enumerate(args.lines):
        if np.all(amps[:, j] > 0):
            slope = np.polyfit(log_eps, np.log(amps[:, j]), 1)[0]
            print(f"{f:8.1f} {slope:8.3f}  " + " ".join(f"{a:.3e}" for a in amps[:, j]))
        else:
            print(f"{f:8.1f} {'-':>8s}  (line absent)")


if __name__ == "__main__":
    main()
