"""F1/AP of DAMVI and uniform bagging as the positive fraction shrinks.

Writes sweep.csv and prints one line per imbalance ratio. With matplotlib
installed, ``--plot`` also saves sweep.png.

    python3 scripts/run_sweep.py --out results/sweep [--plot]
"""

import argparse
from pathlib import Path

from damvi.algorithm import DamviConfig
from damvi.dataset import make_synthetic
from damvi.experiment import SWEEP_COLUMNS, ExperimentConfig, run_sweep, sweep_means, write_rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("results/sweep"))
    ap.add_argument("--k", type=int, default=50)
    ap.add_argument("--reps", type=int, default=5)
    ap.add_argument("--grid", default="0.005,0.01,0.02,0.04")
    ap.add_argument("--methods", default="damvi,uniform-bagging")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()

    grid = [float(g) for g in args.grid.split(",")]
    methods = tuple(args.methods.split(","))
    ds = make_synthetic(5000, 10, 0.02, 2.0, 0)
    cfg = ExperimentConfig(methods=methods, repetitions=args.reps, damvi=DamviConfig(k=args.k))
    rows = run_sweep(ds, grid, cfg)
    args.out.mkdir(parents=True, exist_ok=True)
    write_rows(args.out / "sweep.csv", SWEEP_COLUMNS, rows)
    means = sweep_means(rows)
    for ir in grid:
        print(f"IR {ir:<6} " + "  ".join(f"{m} F1 {means[ir, m]['f1']:.3f}" for m in methods))

    if args.plot:
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(5, 3.5))
        for m in methods:
            ax.plot(grid, [means[ir, m]["f1"] for ir in grid], marker="o", label=m)
        ax.set_xscale("log")
        ax.set_xlabel("imbalance ratio")
        ax.set_ylabel("mean F1")
        ax.legend()
        fig.tight_layout()
        fig.savefig(args.out / "sweep.png", dpi=120)


if __name__ == "__main__":
    main()
