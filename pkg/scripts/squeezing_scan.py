#!/usr/bin/env python3
"""Period-averaged purity loss of squeezed vacua under position-coupled
quantum Brownian motion.

The instantaneous decay rate lambda = 2 D Var(x) is degenerate across the
squeezing family once averaged over a free-oscillation period, so the scan
uses the time-averaged linear entropy over one period instead.  In the
weak-coupling regime the average is minimized at squeezing 0, i.e. the
coherent (vacuum-shaped) state is the most predictable member of the
family.
"""

from __future__ import annotations

import argparse

import numpy as np

from qsieve import projector, qbm_model, squeezed_vacuum, \
    time_averaged_linear_entropy
from qsieve.liouville import channel_applier


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n-levels", type=int, default=30)
    parser.add_argument("--rate", type=float, default=0.02)
    parser.add_argument("--omega", type=float, default=1.0)
    parser.add_argument("--step", type=float, default=0.05)
    args = parser.parse_args()

    gen = qbm_model(args.n_levels, args.rate, args.omega)
    period = 2.0 * np.pi / args.omega
    n_steps = 64
    step = channel_applier(gen, period / n_steps)

    squeezings = np.round(np.arange(-1.0, 1.0 + 1e-9, args.step), 10)
    averages = []
    print(f"{'squeezing':>10}  {'avg S_lin over one period':>26}")
    for s in squeezings:
        e = projector(squeezed_vacuum(args.n_levels, float(s)))
        avg = time_averaged_linear_entropy(gen, e, period, n_steps, step)
        averages.append(avg)
        print(f"{s:>10.2f}  {avg:>26.9f}")

    best = squeezings[int(np.argmin(averages))]
    print(f"\nminimum at squeezing {best:+.2f} "
          f"(grid resolution {args.step})")


if __name__ == "__main__":
    main()
