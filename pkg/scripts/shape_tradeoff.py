#!/usr/bin/env python3
"""Shape trade-off: balanced vs imbalanced boundary hyperedges of one order.

Sweeps the count ratio rho and records the AMI of the detected 2-community
partition against both competing coarse structures.  The JSON annotations
carry the predicted switching points.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

import numpy as np

from hyperbethe import ExperimentConfig, run_shape_sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--d", type=float, default=10.0)
    ap.add_argument("--order", type=int, default=4, choices=(4, 5))
    ap.add_argument("--rho-min", type=float, default=0.8)
    ap.add_argument("--rho-max", type=float, default=2.0)
    ap.add_argument("--points", type=int, default=13)
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    cfg = ExperimentConfig(
        experiment="shape-sweep",
        n=args.n,
        d=args.d,
        shape_order=args.order,
        grid=tuple(np.linspace(args.rho_min, args.rho_max, args.points)),
        reps=args.reps,
        seed=args.seed,
        out=args.out or f"results/shape{args.order}",
    )
    csv_path, json_path, _ = run_shape_sweep(cfg)
    print(f"wrote {csv_path}\nwrote {json_path}")


if __name__ == "__main__":
    main()
