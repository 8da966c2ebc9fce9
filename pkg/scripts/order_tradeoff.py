#!/usr/bin/env python3
"""Order trade-off: low-order vs high-order boundary hyperedges.

Sweeps the count ratio rho = m(low) / m(high) and records the AMI of the
detected 2-community partition against both coarse structures; annotations
carry the raw and weighted switching-point predictions.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from hyperbethe import ExperimentConfig, run_order_sweep, switching_rho


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=float, default=50.0)
    ap.add_argument("--low-order", type=int, default=2)
    ap.add_argument("--high-order", type=int, default=3)
    ap.add_argument("--span", type=float, default=0.15,
                    help="half-width of the rho window around the raw prediction")
    ap.add_argument("--points", type=int, default=11)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    center = switching_rho("order", low_order=args.low_order, high_order=args.high_order)
    grid = np.linspace(center * (1 - args.span), center * (1 + args.span), args.points)
    cfg = ExperimentConfig(
        experiment="order-sweep",
        n=args.n,
        d=args.d,
        low_order=args.low_order,
        high_order=args.high_order,
        grid=tuple(grid),
        reps=args.reps,
        seed=args.seed,
        out=args.out or f"results/order_{args.low_order}_{args.high_order}",
    )
    csv_path, json_path, _ = run_order_sweep(cfg)
    print(f"wrote {csv_path}\nwrote {json_path}")


if __name__ == "__main__":
    main()
