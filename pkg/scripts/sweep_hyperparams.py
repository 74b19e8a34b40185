"""Accuracy against n_trees, m_try fraction and m, one CSV per parameter.

Usage:
    python3 scripts/sweep_hyperparams.py [--csv data.csv] [--reps 20] [--outdir sweeps]

Without --csv a synthetic two-class problem is used (p=100, 5 informative
columns, gap 2), which is hard enough for the curves to move.
"""
import argparse
import math
from pathlib import Path

from cdforest import EvalProtocol, ForestConfig, load_csv
from cdforest.harness import make_blobs, sweep, write_sweep_csv

GRIDS = {
    "n_trees": [1, 5, 10, 25, 50, 100, 200, 300, 500],
    "m_try_fraction": [0.05, 0.1, 0.2, 0.3, 0.5, 0.8, 1.0],
}


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--csv")
    ap.add_argument("--reps", type=int, default=20)
    ap.add_argument("--trees", type=int, default=100, help="forest size for the m_try and m sweeps")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--jobs", type=int, default=1)
    ap.add_argument("--outdir", default="sweeps")
    args = ap.parse_args(argv)

    data = load_csv(args.csv) if args.csv else make_blobs(50, 2, 100, 5, 2.0, seed=args.seed)
    out = Path(args.outdir)
    out.mkdir(parents=True, exist_ok=True)
    base = EvalProtocol(repetitions=args.reps, master_seed=args.seed)
    small = EvalProtocol(repetitions=args.reps, master_seed=args.seed,
                         forest_config=ForestConfig(n_trees=args.trees))
    # m is capped by m_try = ceil(0.2 p), so the grid stops there
    m_cap = math.ceil(0.2 * data.p - 1e-9)
    grids = dict(GRIDS, m=sorted({1, 2, 3, 5, 8, 12, 20} & set(range(1, m_cap + 1)) | {m_cap}))

    for param, grid in grids.items():
        proto = base if param == "n_trees" else small
        results = sweep(data, proto, param, grid, n_jobs=args.jobs)
        write_sweep_csv(param, results, out / f"sweep_{param}.csv")
        print(param)
        for value, r in results:
            print(f"  {value:>6}: {r.mean_accuracy:.4f} +/- {r.sd_accuracy:.4f}")


if __name__ == "__main__":
    main()
