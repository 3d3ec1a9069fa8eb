#!/usr/bin/env python3
"""Full-scale PPO training run at the default world settings.

Trains 2000 episodes of 30 steps on the default 10-sensor deployment,
saves the parameters and learning curve, then evaluates the greedy policy
against the scheduling baselines on held-out seeds.

Usage: python3 scripts/train_ppo_full.py [--seed 0] [--out-dir out/ppo-full]
"""

import argparse
import os
import time

import numpy as np

from frsicl.config import WorldConfig
from frsicl.env import init_world, run_episode
from frsicl.policies import MaxAoiPolicy, NearestNeighborPolicy, RoundRobinPolicy
from frsicl.ppo import PpoConfig, evaluate, save_params, train


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--episodes", type=int, default=2000)
    parser.add_argument("--out-dir", default="out/ppo-full")
    args = parser.parse_args()

    cfg = WorldConfig()
    ppo_cfg = PpoConfig(episodes=args.episodes, steps_per_episode=cfg.n_steps)
    os.makedirs(args.out_dir, exist_ok=True)

    started = time.perf_counter()
    result = train(cfg, ppo_cfg, seed=args.seed,
                   curve_path=os.path.join(args.out_dir, "learning_curve.csv"))
    elapsed = time.perf_counter() - started
    params_path = os.path.join(args.out_dir, "ppo_params.bin")
    save_params(result.params, params_path)
    print(f"trained {args.episodes} episodes in {elapsed:.1f} s -> {params_path}")

    eval_seeds = range(100, 110)
    rows = {"ppo": [], "roundrobin": [], "nearest": [], "maxaoi": []}
    for seed in eval_seeds:
        rows["ppo"].append(evaluate(
            result.params, init_world(cfg, seed=seed)).time_avg_aoi_s)
        for name, policy in (("roundrobin", RoundRobinPolicy(cfg)),
                             ("nearest", NearestNeighborPolicy(cfg)),
                             ("maxaoi", MaxAoiPolicy(cfg))):
            rows[name].append(run_episode(
                init_world(cfg, seed=seed), policy).time_avg_aoi_s)
    for name, values in rows.items():
        print(f"{name:>10}: mean_aoi_s={np.mean(values):.4f} "
              f"(std {np.std(values):.4f} over {len(values)} seeds)")


if __name__ == "__main__":
    main()
