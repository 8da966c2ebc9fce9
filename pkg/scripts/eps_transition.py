#!/usr/bin/env python3
"""Detectability phase transition: AMI vs mixing ratio for both detectors.

Desk-scale defaults (n=3000, 20 reps) finish in minutes; pass --n 30000
--reps 100 for publication-scale curves.  Writes eps_sweep.csv plus a JSON
report with the critical eps for both methods.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from hyperbethe import BpConfig, ExperimentConfig, run_eps_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=3000)
    ap.add_argument("--q", type=int, default=3)
    ap.add_argument("--orders", default="2,3")
    ap.add_argument("--d", type=float, default=10.0)
    ap.add_argument("--eps-min", type=float, default=0.05)
    ap.add_argument("--eps-max", type=float, default=0.7)
    ap.add_argument("--points", type=int, default=14)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--no-bp", action="store_true", help="spectral method only")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/eps_transition")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        experiment="eps-sweep",
        n=args.n,
        q=args.q,
        orders=tuple(int(k) for k in args.orders.split(",")),
        d=args.d,
        grid=tuple(np.linspace(args.eps_min, args.eps_max, args.points)),
        reps=args.reps,
        methods=("bh",) if args.no_bp else ("bh", "bp"),
        seed=args.seed,
        out=args.out,
        bp=BpConfig(seed=args.seed),
    )
    csv_path, json_path, _ = run_eps_sweep(cfg)
    print(f"wrote {csv_path}\nwrote {json_path}")


if __name__ == "__main__":
    main()
