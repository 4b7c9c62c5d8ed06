"""Run the standard protocol (K=100, 20% bootstraps, 70/30 split, 5 repetitions)
on a local copy of the Mammography dataset and compare with the published figures.

    python3 scripts/mammography_check.py mammography.csv --label-column class --positive-label 1
"""

import argparse

from damvi.algorithm import DamviConfig
from damvi.dataset import load_csv
from damvi.experiment import ExperimentConfig, run_compare

REFERENCE = {"f1_mean": 0.6661, "ap_mean": 0.7142}
TOLERANCE = 0.08


def main():
    ap = argparse.ArgumentParser(description="Mammography spot check")
    ap.add_argument("csv")
    ap.add_argument("--label-column", default="class")
    ap.add_argument("--positive-label", default="1")
    args = ap.parse_args()

    ds = load_csv(args.csv, args.label_column, args.positive_label)
    print(f"{ds.n} examples, {ds.dimension} features, IR={ds.imbalance_ratio:.4f}")
    cfg = ExperimentConfig(methods=("damvi", "uniform-bagging"), repetitions=5, test_fraction=0.3,
                           damvi=DamviConfig(k=100, bootstrap_fraction=0.2))
    damvi = run_compare(ds, cfg)[1][0]
    ok = True
    for key, ref in REFERENCE.items():
        close = abs(damvi[key] - ref) <= TOLERANCE
        ok &= close
        print(f"{key}: {damvi[key]:.4f} (reference {ref}, {'within' if close else 'outside'} +-{TOLERANCE})")
    raise SystemExit(0 if ok else 1)


if __name__ == "__main__":
    main()
