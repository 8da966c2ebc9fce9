#!/usr/bin/env python3
"""Dump the non-backtracking spectrum and Bethe Hessian spectra vs eta.

Small instances only (the directed-hyperedge operator is dense-diagonalized);
the JSON output has everything needed to re-plot bulk/outlier figures.
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from hyperbethe import ExperimentConfig, run_spectrum


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=100)
    ap.add_argument("--q", type=int, default=2)
    ap.add_argument("--orders", default="2,3,4")
    ap.add_argument("--d", type=float, default=12.0)
    ap.add_argument("--eps", type=float, default=0.1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", default="results/spectrum")
    args = ap.parse_args()

    cfg = ExperimentConfig(
        experiment="spectrum",
        n=args.n,
        q=args.q,
        orders=tuple(int(k) for k in args.orders.split(",")),
        d=args.d,
        grid=(args.eps,),
        reps=1,
        seed=args.seed,
        out=args.out,
    )
    print(f"wrote {run_spectrum(cfg)}")


if __name__ == "__main__":
    main()
