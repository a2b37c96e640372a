#!/usr/bin/env python3
"""Analytic blockage (point and interval receivers) against Monte Carlo over r.

Writes results/calibration.csv and prints where the largest deviation sits.

    python3 scripts/calibration.py [--trials 10000] [--threads 1] [--config PATH]
"""
import argparse
from pathlib import Path

import numpy as np

from mmblock.cli import compare_rows
from mmblock.config import Config, load_config
from dataclasses import replace

OUT = Path(__file__).resolve().parents[1] / "results"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=10_000)
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--config")
    args = ap.parse_args()

    cfg = load_config(args.config) if args.config else Config()
    mc = replace(cfg.mc, trials=args.trials)
    distances = np.arange(10.0, 151.0, 10.0)
    rows = compare_rows(cfg, distances, args.threads, mc)

    OUT.mkdir(exist_ok=True)
    path = OUT / "calibration.csv"
    with open(path, "w") as fh:
        fh.write("r,analytic_point,analytic_interval,mc_full,mc_ci95\n")
        for r, p, i, m, ci, *_ in rows:
            fh.write(f"{r:g},{p:.6f},{i:.6f},{m:.6f},{ci:.6f}\n")

    print(f"{'r':>5} {'point':>8} {'interval':>9} {'MC':>8} {'+-':>7}")
    for r, p, i, m, ci, *_ in rows:
        print(f"{r:5.0f} {p:8.4f} {i:9.4f} {m:8.4f} {ci:7.4f}")
    worst_p = max(rows, key=lambda t: t[5])
    worst_i = max(rows, key=lambda t: t[6])
    print(f"\nmax |point - MC|    = {worst_p[5]:.4f} at r = {worst_p[0]:g} m")
    print(f"max |interval - MC| = {worst_i[6]:.4f} at r = {worst_i[0]:g} m")
    print(f"wrote {path}")


if __name__ == "__main__":
    main()
