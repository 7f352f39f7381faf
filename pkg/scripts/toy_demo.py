#!/usr/bin/env python3
"""Run the non-smooth toy problem and print a loss table.

Usage: python scripts/toy_demo.py [SEED] [T]

Compares a warmup-stable-decay schedule, a constant schedule, and a
cosine schedule on one shared max|Ax - b| instance, then prints the
loss at a few checkpoints along each trajectory.
"""

import sys

import numpy as np

from schedbound import toy


def main() -> int:
    seed = int(sys.argv[1]) if len(sys.argv) > 1 else 0
    T = int(sys.argv[2]) if len(sys.argv) > 2 else 400
    runs = toy.comparison_runs(seed=seed, T=T)

    checkpoints = sorted({max(1, T // 8), T // 4, T // 2, (3 * T) // 4, T})
    names = ("wsd", "constant", "cosine")
    print(f"seed={seed} T={T}")
    print("t      " + "".join(f"{n:>14}" for n in names))
    for t in checkpoints:
        cells = "".join(f"{runs[n].losses[t - 1]:14.6g}" for n in names)
        print(f"{t:<7d}{cells}")
    print("min    " + "".join(f"{float(np.min(runs[n].losses)):14.6g}" for n in names))
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
