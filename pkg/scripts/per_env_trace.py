"""Per-environment true values of every variant on one problem, averaged over runs.

    python scripts/per_env_trace.py F1 --runs 5 --envs 20 > f1_trace.csv
"""
import argparse
import csv
import sys

import numpy as np

from driftopt.config import ExperimentConfig, with_protocol
from driftopt.harness import VARIANTS, run_variant
from driftopt.seeding import run_seed


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("problem")
    ap.add_argument("--runs", type=int, default=5)
    ap.add_argument("--envs", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = with_protocol(ExperimentConfig(seed=args.seed), envs=args.envs, runs=args.runs)
    traces = {}
    for v in VARIANTS:
        runs = [run_variant(v, args.problem, cfg, run_seed(cfg.seed, args.problem, r), run=r)
                for r in range(args.runs)]
        traces[v] = np.mean([[e.true_value for e in rec.per_env] for rec in runs], axis=0)
        print(f"{v} done", file=sys.stderr)

    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["env"] + list(VARIANTS))
    for t in range(args.envs):
        w.writerow([t] + [f"{traces[v][t]:.6g}" for v in VARIANTS])


if __name__ == "__main__":
    main()
