#!/usr/bin/env python3
"""Reproduce the three preservation sweeps end to end.

For each space family, builds the matching blockwise scaling operator at each
epsilon, runs seeded trials of orthogonal-pair construction plus image
checking, and writes one CSV per family.  Every trial is predicted to pass;
the exit code is nonzero if any fails.
"""

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from bjlab import AtomPartition, SpaceSpec
from bjlab.harness import ExperimentConfig, run

EPS_GRID = (0.1, 0.3, 0.5, 0.7, 0.9)


def sweep_configs(trials: int, seed: int, outdir: Path):
    seq = SpaceSpec.sequence(1, 2, 8, 3)
    yield "l1-sequence", ExperimentConfig(
        mode="preserver-sweep", spec=seq, trials=trials, seed=seed,
        epsilons=EPS_GRID, out=str(outdir / "l1_sequence.csv"))

    weights = tuple(np.random.default_rng(seed).uniform(0.1, 5.0, 6))
    weighted = SpaceSpec(1, 2, 6, 3, weights)
    yield "weighted-L1", ExperimentConfig(
        mode="preserver-sweep", spec=weighted, trials=trials, seed=seed + 1,
        epsilons=EPS_GRID, partition=AtomPartition((0, 1, 2), 6),
        out=str(outdir / "weighted_L1.csv"))

    for p in (1.5, 2.0, 3.0):
        for q in (1.5, 2.0, 3.0):
            spec = SpaceSpec(p, q, 6, 3, (1.0,) * 6)
            yield f"Lp p={p} q={q}", ExperimentConfig(
                mode="preserver-sweep", spec=spec, trials=trials,
                seed=seed + 2, epsilons=EPS_GRID,
                partition=AtomPartition((0, 1, 2), 6),
                out=str(outdir / f"lp_p{p}_q{q}.csv"))


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=200,
                    help="trials per (space, epsilon) cell")
    ap.add_argument("--seed", type=int, default=42)
    ap.add_argument("--outdir", type=Path, default=Path("results"))
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)

    failures = 0
    for name, cfg in sweep_configs(args.trials, args.seed, args.outdir):
        report = run(cfg, echo=False)
        s = report.summary
        failures += s["fail"]
        print(f"{name:18s} pass={s['pass']:5d} fail={s['fail']} "
              f"boundary={s['boundary']} wall={s['wall_time_s']:.2f}s "
              f"-> {cfg.out}")
    print(json.dumps({"total_failures": failures}))
    return 0 if failures == 0 else 2


if __name__ == "__main__":
    sys.exit(main())
