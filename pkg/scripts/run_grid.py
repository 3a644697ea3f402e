#!/usr/bin/env python3
"""Multi-seed experiment grid: mean MSE / precision per (algo, m, k).

Single-seed runs go through `labelsense` directly; this aggregates the
rows across seeds for trend plots.
"""

import argparse
import sys
from collections import defaultdict

from labelsense import RunConfig, SyntheticSpec, run_experiment


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--d", type=int, default=256)
    ap.add_argument("--p", type=int, default=64)
    ap.add_argument("--k-true", type=int, default=3)
    ap.add_argument("--n", type=int, default=1000)
    ap.add_argument("--n-test", type=int, default=250)
    ap.add_argument("--noise", type=float, default=0.0)
    ap.add_argument("--matrix", default="gaussian",
                    choices=["gaussian", "bernoulli", "hadamard"])
    ap.add_argument("--m", default="32,64,128",
                    help="comma-separated measurement counts")
    ap.add_argument("--k-max", type=int, default=3)
    ap.add_argument("--algo", default="omp", help="comma-separated decoders")
    ap.add_argument("--lambda", dest="ridge", type=float, default=0.01)
    ap.add_argument("--seeds", default="0,1,2")
    ap.add_argument("--out", default=None, help="write the aggregate as CSV")
    args = ap.parse_args()

    seeds = [int(s) for s in args.seeds.split(",")]
    m_list = tuple(int(s) for s in args.m.split(","))
    algos = tuple(args.algo.split(","))

    cells = defaultdict(list)  # (algo, m, k) -> [(mse, prec)]
    for seed in seeds:
        cfg = RunConfig(
            matrix_kind=args.matrix,
            m_list=m_list,
            k_max=args.k_max,
            algorithms=algos,
            ridge_lambda=args.ridge,
            seed=seed,
            synthetic=SyntheticSpec(
                d=args.d, p=args.p, k_true=args.k_true, n=args.n,
                noise_level=args.noise, n_test=args.n_test,
            ),
        )
        for r in run_experiment(cfg):
            cells[(r.algorithm, r.m, r.k)].append(
                (r.mean_squared_error, r.precision_at_k)
            )

    header = "algo,m,k,mean_mse,mean_prec_at_k,n_seeds"
    rows = [header]
    print(header)
    for (algo, m, k), vals in sorted(cells.items()):
        mse = sum(v[0] for v in vals) / len(vals)
        prec = sum(v[1] for v in vals) / len(vals)
        row = f"{algo},{m},{k},{mse:.6f},{prec:.6f},{len(vals)}"
        rows.append(row)
        print(row)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write("\n".join(rows) + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
