"""Command-line entry point: ``damvi {train,evaluate,compare,sweep}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .algorithm import METHODS, DamviConfig, train_damvi
from .cbound import OptimizerConfig, write_trace
from .dataset import DataError, Dataset, load_csv, make_synthetic
from .experiment import (REPETITION_COLUMNS, SUMMARY_COLUMNS, SWEEP_COLUMNS, ExperimentConfig,
                         evaluate, run_compare, run_sweep, write_manifest, write_rows)
from .metrics import write_pr_curve
from .tree import TreeParams
from .vote import Ensemble

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3

log = logging.getLogger("damvi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


SYNTHETIC_KEYS = {"n": int, "d": int, "ir": float, "sep": float, "seed": int}


def parse_synthetic(spec: str) -> dict:
    """``n=5000,d=10,ir=0.02,sep=2.0,seed=0`` -> keyword dict for make_synthetic."""
    params = {"n": 5000, "d": 10, "ir": 0.02, "sep": 2.0, "seed": 0}
    for part in filter(None, (p.strip() for p in spec.split(","))):
        key, _, value = part.partition("=")
        if key not in SYNTHETIC_KEYS or not value:
            raise UsageError(f"bad synthetic parameter {part!r}; keys are {sorted(SYNTHETIC_KEYS)}")
        try:
            params[key] = SYNTHETIC_KEYS[key](value)
        except ValueError:
            raise UsageError(f"bad value in {part!r}") from None
    return params


def load_data(args) -> Dataset:
    if args.data and args.synthetic:
        raise UsageError("give either --data or --synthetic, not both")
    if args.data:
        return load_csv(args.data, args.label_column, args.positive_label)
    if args.synthetic:
        p = parse_synthetic(args.synthetic)
        return make_synthetic(p["n"], p["d"], p["ir"], p["sep"], p["seed"])
    raise UsageError("a dataset is required: --data PATH or --synthetic SPEC")


def _float_list(text: str) -> list[float]:
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _method_list(text: str) -> list[str]:
    methods = [t.strip() for t in text.split(",") if t.strip()]
    unknown = [m for m in methods if m not in METHODS]
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown methods {unknown}; choose from {sorted(METHODS)}")
    return methods


def damvi_config(args) -> DamviConfig:
    return DamviConfig(
        k=args.k,
        bootstrap_fraction=args.bootstrap_fraction,
        tree_params=TreeParams(max_depth=args.max_depth, min_samples_split=args.min_samples_split,
                               min_samples_leaf=args.min_samples_leaf),
        optimizer=OptimizerConfig(tol=args.tol, max_iter=args.max_iter, restarts=args.restarts),
        seed=args.seed,
    )


def experiment_config(args) -> ExperimentConfig:
    return ExperimentConfig(methods=tuple(args.methods), repetitions=args.reps,
                            test_fraction=args.test_fraction, damvi=damvi_config(args),
                            seed=args.seed, n_jobs=args.jobs)


def _add_data_args(p):
    g = p.add_argument_group("data")
    g.add_argument("--data", help="CSV file with a header row")
    g.add_argument("--label-column", default="label")
    g.add_argument("--positive-label", default="1", help="raw label value of the positive class")
    g.add_argument("--synthetic", help="synthetic spec, e.g. n=5000,d=10,ir=0.02,sep=2.0,seed=0")


def _add_model_args(p):
    g = p.add_argument_group("model")
    g.add_argument("--k", type=int, default=100, help="number of trees")
    g.add_argument("--bootstrap-fraction", type=float, default=0.2)
    g.add_argument("--max-depth", type=int, default=None)
    g.add_argument("--min-samples-split", type=int, default=2)
    g.add_argument("--min-samples-leaf", type=int, default=1)
    g.add_argument("--restarts", type=int, default=4)
    g.add_argument("--tol", type=float, default=1e-10)
    g.add_argument("--max-iter", type=int, default=1000)
    g.add_argument("--seed", type=int, default=0)


def _add_experiment_args(p, default_methods):
    g = p.add_argument_group("experiment")
    g.add_argument("--methods", type=_method_list, default=list(default_methods),
                   help=f"comma-separated subset of {','.join(METHODS)}")
    g.add_argument("--reps", type=int, default=5)
    g.add_argument("--test-fraction", type=float, default=0.3)
    g.add_argument("--jobs", type=int, default=1, help="worker processes for repetitions")
    g.add_argument("--out", required=True, help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="damvi", description="Diversity-aware weighted majority vote for imbalanced data")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("train", help="train a model and write model.json / report.json")
    _add_data_args(p)
    _add_model_args(p)
    p.add_argument("--method", choices=sorted(METHODS), default="damvi")
    p.add_argument("--trace", action="store_true", help="also write the optimizer trace (trace.csv)")
    p.add_argument("--out", required=True, help="output directory")

    p = sub.add_parser("evaluate", help="score a saved model on a dataset")
    _add_data_args(p)
    p.add_argument("--model", required=True)
    p.add_argument("--out", help="write metrics JSON here instead of stdout")
    p.add_argument("--pr-curve", help="also write the PR curve as CSV")

    p = sub.add_parser("compare", help="repeated split comparison of several methods")
    _add_data_args(p)
    _add_model_args(p)
    _add_experiment_args(p, METHODS)

    p = sub.add_parser("sweep", help="metrics across a grid of imbalance ratios")
    _add_data_args(p)
    _add_model_args(p)
    _add_experiment_args(p, ("damvi", "uniform-bagging"))
    p.add_argument("--ir-grid", type=_float_list, default=[0.005, 0.01, 0.02, 0.04])
    return parser


def _outdir(path) -> Path:
    out = Path(path)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_train(args) -> int:
    ds = load_data(args)
    cfg = damvi_config(args)
    out = _outdir(args.out)
    if args.method == "damvi":
        model, report = train_damvi(ds, cfg)
        report.save(out / "report.json")
        if args.trace:
            write_trace(report.trace, out / "trace.csv")
        log.info("C-Bound %.6f (applicable=%s)", report.cbound, report.bound_applicable)
    else:
        model = METHODS[args.method](ds, cfg)
    model.save(out / "model.json")
    print(json.dumps({"model": str(out / "model.json"), "k": model.k, "method": args.method}))
    return EXIT_OK


def cmd_evaluate(args) -> int:
    ds = load_data(args)
    try:
        model = Ensemble.load(args.model)
    except FileNotFoundError:
        raise DataError(f"no such model file: {args.model}") from None
    except (KeyError, json.JSONDecodeError) as exc:
        raise DataError(f"malformed model file {args.model}: {exc}") from None
    if model.n_features != ds.dimension:
        raise DataError(f"model expects {model.n_features} features, data has {ds.dimension}")
    metrics = {"format_version": 1, **evaluate(model, ds)}
    text = json.dumps(metrics, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)
    if args.pr_curve:
        write_pr_curve(model.scores(ds.X), ds.y, args.pr_curve)
    return EXIT_OK


def _print_summary(summary):
    print(f"{'method':18s} {'F1':>16s} {'AP':>16s}")
    for r in summary:
        mark_f1 = "v" if r["p_f1"] != "" and r["p_f1"] < 0.05 and r["f1_mean"] < summary[0]["f1_mean"] else " "
        mark_ap = "v" if r["p_ap"] != "" and r["p_ap"] < 0.05 and r["ap_mean"] < summary[0]["ap_mean"] else " "
        print(f"{r['method']:18s} {r['f1_mean']:.4f}+-{r['f1_std']:.3f}{mark_f1}"
              f" {r['ap_mean']:.4f}+-{r['ap_std']:.3f}{mark_ap}")


def cmd_compare(args) -> int:
    if len(args.methods) < 2:
        raise UsageError("compare needs at least two methods")
    ds = load_data(args)
    cfg = experiment_config(args)
    out = _outdir(args.out)
    per_rep, summary = run_compare(ds, cfg)
    write_rows(out / "repetitions.csv", REPETITION_COLUMNS, per_rep)
    write_rows(out / "results.csv", SUMMARY_COLUMNS, summary)
    write_manifest(out, {"results.csv": SUMMARY_COLUMNS, "repetitions.csv": REPETITION_COLUMNS},
                   {"command": "compare", "seed": cfg.seed, "repetitions": cfg.repetitions})
    if "damvi" in cfg.methods:
        summary = sorted(summary, key=lambda r: r["method"] != "damvi")
    _print_summary(summary)
    return EXIT_OK


def cmd_sweep(args) -> int:
    ds = load_data(args)
    cfg = experiment_config(args)
    out = _outdir(args.out)
    rows = run_sweep(ds, args.ir_grid, cfg)
    write_rows(out / "sweep.csv", SWEEP_COLUMNS, rows)
    write_manifest(out, {"sweep.csv": SWEEP_COLUMNS},
                   {"command": "sweep", "seed": cfg.seed, "ir_grid": list(args.ir_grid)})
    print(f"wrote {len(rows)} rows to {out / 'sweep.csv'}")
    return EXIT_OK


COMMANDS = {"train": cmd_train, "evaluate": cmd_evaluate, "compare": cmd_compare, "sweep": cmd_sweep}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"damvi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (DataError, OSError) as exc:
        print(f"damvi: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except ArithmeticError as exc:
        print(f"damvi: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"damvi: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
