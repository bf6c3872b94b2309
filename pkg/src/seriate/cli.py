"""Command-line entry point: ``seriate {gen,reorder,eval,bench,heatmap}``.

Exit status: 0 success, 2 usage error, 3 data error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import os
import platform
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .baselines import METHODS as BASELINE_METHODS
from .baselines import run_baseline
from .deeptmr import PRESETS, TrainConfig, train_with_restarts
from .errors import SeriateError
from .evaluation import ALL_METHODS, BenchmarkConfig, reordering_error, run_benchmark
from .fileio import (
    read_matrix_csv,
    read_permutation_csv,
    write_heatmap,
    write_json,
    write_matrix_csv,
    write_permutation_csv,
    dumps_json,
)
from .matcore import apply_permutation, log1p_transform, normalize_unit_range
from .prng import ALGORITHM_ID, Rng
from .synthgen import DEFAULT_SIGMA, MODELS, dgm_sigma_grid, generate

SCHEMA_VERSION = 1
EXIT_USAGE = 2


class UsageError(Exception):
    pass


def _versions() -> dict:
    return {"seriate": __version__, "numpy": np.__version__, "python": platform.python_version()}


def _resolve_seed(seed):
    if seed is not None:
        return seed
    env = os.environ.get("SERIATE_SEED")
    if env is None:
        return 0
    try:
        return int(env)
    except ValueError:
        raise UsageError(f"SERIATE_SEED must be a decimal integer, got {env!r}") from None


def _finite_or_none(x):
    return x if x is not None and math.isfinite(x) else None


def cmd_gen(args) -> int:
    seed = _resolve_seed(args.seed)
    params = {"n": args.n, "p": args.p}
    params["sigma"] = args.sigma if args.sigma is not None else (0.03 if args.model == "dgm" else DEFAULT_SIGMA)
    if args.model == "lbm":
        params.update(K=args.K or 3, H=args.H or 3)
        if (params["K"], params["H"]) != (3, 3):
            raise UsageError("custom cluster counts need block means; only K=H=3 has defaults")
    elif args.model == "spm":
        params["K"] = args.K or 4
        if params["K"] != 4:
            raise UsageError("custom stripe counts need stripe means; only K=4 has defaults")
    inst = generate(args.model, Rng(seed), **params)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_matrix_csv(out / "observed.csv", inst.observed)
    write_matrix_csv(out / "mean.csv", inst.mean_observed)
    write_matrix_csv(out / "mean_bar.csv", inst.mean_bar)
    write_permutation_csv(out / "row_perm.csv", inst.row_order)
    write_permutation_csv(out / "col_perm.csv", inst.col_order)
    truth = {
        "schema_version": SCHEMA_VERSION,
        "command": args.argv,
        "model": inst.model,
        "params": inst.params,
        "seed": seed,
        "rng_algorithm": ALGORITHM_ID,
        "shuffle_row_perm": inst.true_row_perm,
        "shuffle_col_perm": inst.true_col_perm,
        "row_order": inst.row_order,
        "col_order": inst.col_order,
        "row_labels": inst.observed_row_labels,
        "col_labels": inst.observed_col_labels,
        "files": {"observed": "observed.csv", "mean_observed": "mean.csv", "mean_bar": "mean_bar.csv",
                  "row_order": "row_perm.csv", "col_order": "col_perm.csv"},
        "versions": _versions(),
    }
    write_json(out / "truth.json", truth)
    return 0


def _train_config(args, seed) -> TrainConfig:
    base = dict(PRESETS[args.preset]) if args.preset else {}
    overrides = {
        "learning_rate": args.lr,
        "epochs": args.epochs,
        "lam": args.lam,
        "batch_size": args.batch,
        "restarts": args.restarts,
        "loss_window": args.loss_window,
        "hidden_activation": args.hidden_activation,
        "output_activation": args.output_activation,
        "sampling": args.sampling,
    }
    base.update({k: v for k, v in overrides.items() if v is not None})
    if args.hidden is not None:
        base.update(row_hidden=(args.hidden,), col_hidden=(args.hidden,), dec_hidden=(args.hidden,))
    try:
        return TrainConfig(seed=seed, **base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_reorder(args) -> int:
    seed = _resolve_seed(args.seed)
    A = read_matrix_csv(args.input, header=args.header)
    if args.log1p:
        A = log1p_transform(A)
    if args.normalize:
        A = normalize_unit_range(A)
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    report = {
        "schema_version": SCHEMA_VERSION,
        "command": args.argv,
        "method": args.method,
        "seed": seed,
        "rng_algorithm": ALGORITHM_ID,
        "input": {"path": str(args.input), "n_rows": A.shape[0], "n_cols": A.shape[1]},
        "preprocessing": {"header": args.header, "log1p": args.log1p, "normalize": args.normalize},
    }
    if args.method == "deeptmr":
        cfg = _train_config(args, seed)
        res = train_with_restarts(A, cfg)
        row_perm, col_perm, denoised_reordered = res.row_perm, res.col_perm, res.reordered_denoised
        report["config"] = cfg.as_dict()
        report["scores"] = {"g": res.g, "h": res.h}
        window = res.loss_history[-cfg.loss_window:]
        report["loss"] = {
            "iterations": int(res.loss_history.size),
            "final_full_data": res.final_loss.as_dict(),
            "last_iteration_total": float(res.loss_history[-1]),
            "window_mean_total": float(window.mean()),
            "selection_scores": [_finite_or_none(s) for s in res.selection_scores],
            "selected_restart": res.selected_restart,
        }
        if args.save_model:
            res.model.save(out / "model.json")
    else:
        res = run_baseline(args.method, A)
        row_perm, col_perm = res.row_perm, res.col_perm
        denoised_reordered = None if res.denoised is None else apply_permutation(res.denoised, row_perm, col_perm)
        report["config"] = {}
        report["scores"] = {"row_scores": res.row_scores, "col_scores": res.col_scores}

    reordered = apply_permutation(A, row_perm, col_perm)
    artifacts = {
        "reordered": "reordered.csv",
        "row_perm": "row_perm.csv",
        "col_perm": "col_perm.csv",
        "observed_heatmap": "observed.pgm",
        "reordered_heatmap": "reordered.pgm",
    }
    write_matrix_csv(out / "reordered.csv", reordered)
    write_permutation_csv(out / "row_perm.csv", row_perm)
    write_permutation_csv(out / "col_perm.csv", col_perm)
    write_heatmap(A, out / "observed.pgm")
    write_heatmap(reordered, out / "reordered.pgm")
    if denoised_reordered is not None:
        write_matrix_csv(out / "denoised.csv", denoised_reordered)
        write_heatmap(denoised_reordered, out / "denoised.pgm")
        artifacts.update(denoised="denoised.csv", denoised_heatmap="denoised.pgm")
    if args.method == "deeptmr" and args.save_model:
        artifacts["model"] = "model.json"
    report["row_perm"] = row_perm
    report["col_perm"] = col_perm
    report["artifacts"] = artifacts
    report["versions"] = _versions()
    write_json(out / "report.json", report)
    return 0


def cmd_eval(args) -> int:
    P_bar = read_matrix_csv(args.mean_bar)
    P = read_matrix_csv(args.mean_observed)
    rows = read_permutation_csv(args.row_perm)
    cols = read_permutation_csv(args.col_perm)
    print(dumps_json(reordering_error(P_bar, P, rows, cols).as_dict()))
    return 0


BENCH_CSV_FIELDS = ("method", "sigma", "sigma_index", "trial", "seed", "error", "flips", "wall_time",
                    "selection_score", "status", "message")


def cmd_bench(args) -> int:
    seed = _resolve_seed(args.seed)
    if args.full_grid:
        sigmas, trials = dgm_sigma_grid(), 10
    else:
        sigmas, trials = args.sigmas, args.trials
    try:
        cfg = BenchmarkConfig(sigmas=sigmas, trials=trials, methods=args.methods, n=args.n, p=args.p, seed=seed,
                              restarts=args.restarts, epochs=args.epochs, batch_size=args.batch,
                              learning_rate=args.lr, lam=args.lam, hidden=args.hidden, workers=args.workers)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    report = run_benchmark(cfg)
    report["command"] = args.argv
    report["versions"] = _versions()
    for row in report["rows"]:
        row["selection_score"] = _finite_or_none(row["selection_score"])
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    write_json(out / "bench.json", report)
    with open(out / "bench.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=BENCH_CSV_FIELDS, lineterminator="\n")
        writer.writeheader()
        for row in report["rows"]:
            flat = dict(row)
            flat["flips"] = "" if row["flips"] is None else "".join(str(b) for b in row["flips"])
            writer.writerow(flat)
    for agg in report["aggregates"]:
        mean = "failed" if agg["mean_error"] is None else f"{agg['mean_error']:.6g}"
        std = "-" if agg["std_error"] is None else f"{agg['std_error']:.3g}"
        print(f"{agg['method']:>10}  sigma={agg['sigma']:<6g} mean E={mean:<12} sd={std}")
    if all(row["status"] != "ok" for row in report["rows"]):
        return 4
    return 0


def cmd_heatmap(args) -> int:
    write_heatmap(read_matrix_csv(args.input, header=args.header), args.output)
    return 0


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _method_list(text: str) -> list[str]:
    methods = [m.strip() for m in text.split(",") if m.strip()]
    bad = [m for m in methods if m not in ALL_METHODS]
    if bad:
        raise argparse.ArgumentTypeError(f"unknown methods {bad}; choose from {', '.join(ALL_METHODS)}")
    return methods


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="seriate", description="Two-way matrix reordering toolkit.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a synthetic instance")
    g.add_argument("model", choices=MODELS)
    g.add_argument("--n", type=int, default=100)
    g.add_argument("--p", type=int, default=100)
    g.add_argument("--sigma", type=float)
    g.add_argument("--K", type=int, help="row clusters (lbm) or stripes (spm)")
    g.add_argument("--H", type=int, help="column clusters (lbm)")
    g.add_argument("--seed", type=int)
    g.add_argument("--out-dir", default=".")
    g.set_defaults(func=cmd_gen)

    r = sub.add_parser("reorder", help="reorder the rows and columns of a CSV matrix")
    r.add_argument("input")
    r.add_argument("--method", choices=("deeptmr", *BASELINE_METHODS), default="deeptmr")
    r.add_argument("--header", action="store_true", help="skip one header row")
    r.add_argument("--log1p", action="store_true", help="apply log(x + 1) before anything else")
    r.add_argument("--normalize", action="store_true", help="rescale entries to [0, 1]")
    r.add_argument("--seed", type=int)
    r.add_argument("--preset", choices=sorted(PRESETS))
    r.add_argument("--lr", type=float)
    r.add_argument("--epochs", type=int)
    r.add_argument("--lambda", dest="lam", type=float)
    r.add_argument("--batch", type=int)
    r.add_argument("--hidden", type=int, help="width of every hidden layer")
    r.add_argument("--restarts", type=int)
    r.add_argument("--loss-window", type=int)
    r.add_argument("--hidden-activation", choices=("tanh", "sigmoid", "relu", "identity"))
    r.add_argument("--output-activation", choices=("tanh", "sigmoid", "relu", "identity"))
    r.add_argument("--sampling", choices=("replacement", "epoch"))
    r.add_argument("--save-model", action="store_true")
    r.add_argument("--out-dir", default=".")
    r.set_defaults(func=cmd_reorder)

    e = sub.add_parser("eval", help="reordering error of candidate permutations")
    e.add_argument("mean_bar")
    e.add_argument("mean_observed")
    e.add_argument("row_perm")
    e.add_argument("col_perm")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="compare methods on diagonal-gradation instances")
    b.add_argument("--sigmas", type=_float_list, default=[0.03, 0.09, 0.15])
    b.add_argument("--trials", type=int, default=5)
    b.add_argument("--full-grid", action="store_true", help="sigma = 0.03 t for t = 1..10, 10 trials")
    b.add_argument("--methods", type=_method_list, default=list(ALL_METHODS))
    b.add_argument("--n", type=int, default=100)
    b.add_argument("--p", type=int, default=100)
    b.add_argument("--seed", type=int)
    b.add_argument("--restarts", type=int, default=5)
    b.add_argument("--epochs", type=int, default=200)
    b.add_argument("--batch", type=int, default=200)
    b.add_argument("--lr", type=float, default=1e-2)
    b.add_argument("--lambda", dest="lam", type=float, default=1e-10)
    b.add_argument("--hidden", type=int, default=10)
    b.add_argument("--workers", type=int, default=0, help="worker processes (0 = all CPUs)")
    b.add_argument("--out-dir", default=".")
    b.set_defaults(func=cmd_bench)

    h = sub.add_parser("heatmap", help="render a CSV matrix as a plain PGM image")
    h.add_argument("input")
    h.add_argument("output")
    h.add_argument("--header", action="store_true")
    h.set_defaults(func=cmd_heatmap)
    return parser


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"seriate: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SeriateError as exc:
        print(f"seriate: {type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"seriate: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
