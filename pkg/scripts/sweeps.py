#!/usr/bin/env python3
"""Blockage probability versus Tx height and separation, both receivers.

Writes results/sweep_height.csv (r = 30 m) and results/sweep_distance.csv
(h_T in {3, 4, 6, 8} m).
"""
from dataclasses import replace
from pathlib import Path

from mmblock import Scenario
from mmblock.planner import PROFILES, sweep_distance, sweep_tx_height

OUT = Path(__file__).resolve().parents[1] / "results"
PLM = PROFILES["mmwave28"]

OUT.mkdir(exist_ok=True)
base = Scenario()

point = sweep_tx_height(base, PLM, (2.0, 12.0, 0.5), "analytic-point")
interval = sweep_tx_height(base, PLM, (2.0, 12.0, 0.5), "analytic-interval")
with open(OUT / "sweep_height.csv", "w") as fh:
    fh.write("h_t,p_block_point,p_block_interval,avg_pl_point_db\n")
    for h, a, b, pl in zip(point.axis_values, point.probabilities, interval.probabilities,
                           point.avg_path_loss_db):
        fh.write(f"{h:g},{a:.6f},{b:.6f},{pl:.4f}\n")
print("r = 30 m:  h_T   point  interval")
for h, a, b in zip(point.axis_values[::4], point.probabilities[::4], interval.probabilities[::4]):
    print(f"        {h:5.1f}  {a:.4f}  {b:.4f}")

with open(OUT / "sweep_distance.csv", "w") as fh:
    fh.write("h_t,r,p_block_point,p_block_interval\n")
    for h in (3.0, 4.0, 6.0, 8.0):
        sc = replace(base, tx_height_m=h)
        p = sweep_distance(sc, PLM, (10.0, 150.0, 10.0), "analytic-point")
        i = sweep_distance(sc, PLM, (10.0, 150.0, 10.0), "analytic-interval")
        for r, a, b in zip(p.axis_values, p.probabilities, i.probabilities):
            fh.write(f"{h:g},{r:g},{a:.6f},{b:.6f}\n")
        print(f"h_T = {h:g} m: P_B(r=150) point {p.probabilities[-1]:.4f}, "
              f"interval {i.probabilities[-1]:.4f}; monotone in r: "
              f"{p.monotonicity['nondecreasing'] and i.monotonicity['nondecreasing']}")
print(f"wrote {OUT}/sweep_height.csv, {OUT}/sweep_distance.csv")
