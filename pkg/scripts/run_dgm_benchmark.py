"""Compare all four methods on diagonal-gradation instances.

Defaults are the desk-scale grid (n = p = 50, sigma in {0.03, 0.09, 0.15},
5 trials); ``--full`` switches to n = p = 100 over the ten-level sigma grid
with 10 trials, which takes hours on one core.
"""

import argparse
from pathlib import Path

from seriate.evaluation import ALL_METHODS, BenchmarkConfig, run_benchmark, summary_table
from seriate.fileio import write_json
from seriate.synthgen import dgm_sigma_grid


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--full", action="store_true")
    parser.add_argument("--n", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--workers", type=int, default=0)
    parser.add_argument("--out", default="dgm_benchmark.json")
    args = parser.parse_args()

    if args.full:
        cfg = BenchmarkConfig(sigmas=dgm_sigma_grid(), trials=10, n=100, p=100, seed=args.seed, workers=args.workers)
    else:
        cfg = BenchmarkConfig(sigmas=[0.03, 0.09, 0.15], trials=5, n=args.n, p=args.n, seed=args.seed,
                              workers=args.workers)
    report = run_benchmark(cfg)
    write_json(Path(args.out), report)

    table = summary_table(report)
    print("sigma   " + "".join(f"{m:>12}" for m in ALL_METHODS))
    for sigma in cfg.sigmas:
        print(f"{sigma:<8g}" + "".join(f"{table[m][sigma]:>12.3e}" for m in ALL_METHODS))
    best = [r for r in report["rows"] if r["method"] == "deeptmr"]
    worst = max(best, key=lambda r: r["error"])
    print(f"worst DeepTMR cell: sigma={worst['sigma']:g} trial={worst['trial']} seed={worst['seed']} "
          f"E={worst['error']:.3e}")


if __name__ == "__main__":
    main()
