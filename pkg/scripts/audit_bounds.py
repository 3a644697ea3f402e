#!/usr/bin/env python3
"""Greedy-vs-oracle ratio sweep and gain-floor audit at configurable sizes.

The CLI's --audit runs a fixed small battery; this script exposes the
knobs (trial count, matrix size, coherence cap) for longer runs.
"""

import argparse
import sys
import time

from labelsense import OMP_RATIO_BOUND, generate
from labelsense._rng import derive_seed
from labelsense.oracles import OracleBudget, omp_ratio_sweep, sparse_gain_floor


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--m", type=int, default=12)
    ap.add_argument("--d", type=int, default=16)
    ap.add_argument("--k", type=int, default=2)
    ap.add_argument("--kind", default="hadamard",
                    choices=["gaussian", "bernoulli", "hadamard"])
    ap.add_argument("--cap", type=float, default=None,
                    help="coherence acceptance cap (default 0.1/k)")
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--per-trial", action="store_true",
                    help="print one line per trial")
    args = ap.parse_args()

    budget = OracleBudget(max_dim=args.d, max_sparsity=2 * args.k)
    t0 = time.perf_counter()
    sweep = omp_ratio_sweep(
        n_trials=args.trials, m=args.m, d=args.d, k=args.k, seed=args.seed,
        kind=args.kind, coherence_cap=args.cap, budget=budget,
    )
    elapsed = time.perf_counter() - t0
    if args.per_trial:
        for line in sweep.report_lines():
            print(line)
    print(
        f"sweep: {len(sweep.trials)} trials in {elapsed:.1f}s, "
        f"{sweep.attempts} matrix draws, max ratio {sweep.max_ratio:.6f} "
        f"vs bound {OMP_RATIO_BOUND:g} -> "
        f"{'pass' if sweep.all_within_bound else 'FAIL'}"
    )

    ok = sweep.all_within_bound
    if args.kind in ("bernoulli", "hadamard"):
        A = generate(args.kind, args.m, args.d, derive_seed(args.seed, 41))
        gain = sparse_gain_floor(A, args.k, n_vectors=1000, seed=args.seed)
        floor = 1.0 - gain.mu * (args.k - 1) - 1e-9
        worst = gain.min_sampled_gain
        if gain.min_exact_gain is not None:
            worst = min(worst, gain.min_exact_gain)
        held = worst >= floor
        ok = ok and held
        print(
            f"gain floor: mu {gain.mu:.6f}, min gain {worst:.6f} "
            f"vs floor {floor:.6f} -> {'pass' if held else 'FAIL'}"
        )
    return 0 if ok else 1


if __name__ == "__main__":
    sys.exit(main())
