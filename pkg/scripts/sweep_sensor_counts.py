#!/usr/bin/env python3
"""Sensor-count sweep comparing the offline-mock ICL controller with the
scheduling baselines.

Runs every policy at N in {5, 10, 15} over ten seeds and writes sweep.csv
plus per-cell run artifacts. Equivalent to the `frsicl sweep` subcommand
with a fixed recipe.

Usage: python3 scripts/sweep_sensor_counts.py [--out-dir out/sweep]
"""

import argparse

from frsicl.config import WorldConfig
from frsicl.harness import ExperimentSpec, sweep_sensors
from frsicl.icl import IclConfig


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", default="out/sweep")
    parser.add_argument("--seeds", default="0,1,2,3,4,5,6,7,8,9")
    parser.add_argument("--mock-llm", default="max-aoi",
                        choices=["max-aoi", "nearest", "invalid"])
    args = parser.parse_args()

    spec = ExperimentSpec(
        world=WorldConfig(),
        policy="icl",
        seeds=[int(s) for s in args.seeds.split(",")],
        out_dir=args.out_dir,
        icl=IclConfig(backend=f"mock:{args.mock_llm}"),
    )
    rows = sweep_sensors(spec, ["icl", "nearest", "roundrobin", "maxaoi"],
                         counts=(5, 10, 15))
    for n, policy, mean, std, count in rows:
        print(f"n_sensors={n:>2} policy={policy:>10} "
              f"mean_aoi_s={mean:.4f} std_aoi_s={std:.4f} n_runs={count}")


if __name__ == "__main__":
    main()
