"""Command-line entry point.

Two modes: the default experiment runner (train banks, decode, write CSV)
and --audit, which runs quick oracle sweeps and bound audits instead.
Exit codes: 0 success, 2 configuration error, 3 data error, 4 audit
violation.
"""

from __future__ import annotations

import argparse
import sys

import numpy as np

from ._rng import derive_seed, philox
from .datasets import generate_synthetic
from .errors import (
    EXIT_AUDIT,
    EXIT_CONFIG,
    EXIT_DATA,
    EXIT_OK,
    AuditError,
    DataError,
    LabelSenseError,
    ParameterError,
)
from .evaluation import ALGORITHM_CHOICES, regret_transform_audit
from .experiment import RunConfig, SyntheticSpec, run_experiment
from .learner import compression_error_ratio, train_compressed
from .oracles import omp_ratio_sweep, sample_rip_delta, sparse_gain_floor
from .recovery import OMP_RATIO_BOUND, regret_factors
from .sensing import RANDOM_KINDS, generate


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    try:
        values = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ParameterError(f"{flag} expects comma-separated integers, got {text!r}")
    if not values:
        raise ParameterError(f"{flag} must not be empty")
    return values


def _parse_synthetic(text: str) -> SyntheticSpec:
    spec: dict[str, str] = {}
    for part in text.split(","):
        key, sep, value = part.partition("=")
        if not sep or not key:
            raise ParameterError(f"--synthetic expects key=value pairs, got {part!r}")
        spec[key] = value
    allowed = {"d", "p", "k", "n", "noise", "ntest"}
    unknown = set(spec) - allowed
    if unknown:
        raise ParameterError(f"--synthetic has unknown keys {sorted(unknown)}")
    missing = {"d", "p", "k", "n", "noise"} - set(spec)
    if missing:
        raise ParameterError(f"--synthetic is missing keys {sorted(missing)}")
    try:
        return SyntheticSpec(
            d=int(spec["d"]),
            p=int(spec["p"]),
            k_true=int(spec["k"]),
            n=int(spec["n"]),
            noise_level=float(spec["noise"]),
            n_test=int(spec.get("ntest", "0")),
        )
    except ValueError as exc:
        raise ParameterError(f"--synthetic has a malformed value: {exc}")


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="labelsense",
        description="Compressed sparse multi-label prediction experiments.",
    )
    data = parser.add_argument_group("data source (files or synthetic)")
    data.add_argument("--train", metavar="PATH", help="training dataset file")
    data.add_argument("--test", metavar="PATH", help="test dataset file")
    data.add_argument(
        "--synthetic",
        metavar="SPEC",
        help="planted problem, e.g. d=1024,p=256,k=5,n=4000,noise=0.0[,ntest=1000]",
    )
    run = parser.add_argument_group("experiment")
    run.add_argument("--matrix", choices=RANDOM_KINDS, default="hadamard")
    run.add_argument("--m", metavar="LIST", help="comma-separated measurement counts")
    run.add_argument("--k-max", dest="k_max", type=int, metavar="INT")
    run.add_argument(
        "--algo",
        default="omp",
        metavar="LIST",
        help=f"comma-separated decoders from {{{','.join(ALGORITHM_CHOICES)}}}",
    )
    run.add_argument("--lambda", dest="ridge_lambda", type=float, default=0.01, metavar="FLOAT")
    run.add_argument("--seed", type=int, default=0, metavar="INT")
    run.add_argument("--out", metavar="PATH", help="CSV output path (report path in --audit)")
    run.add_argument("--artifacts", metavar="DIR", help="persist matrices and banks here")
    parser.add_argument(
        "--audit",
        action="store_true",
        help="run oracle sweeps and bound audits instead of the experiment",
    )
    return parser


def _run_main(args) -> int:
    if args.m is None or args.k_max is None:
        raise ParameterError("--m and --k-max are required for an experiment run")
    synthetic = _parse_synthetic(args.synthetic) if args.synthetic else None
    config = RunConfig(
        matrix_kind=args.matrix,
        m_list=_parse_int_list(args.m, "--m"),
        k_max=args.k_max,
        algorithms=tuple(args.algo.split(",")),
        ridge_lambda=args.ridge_lambda,
        seed=args.seed,
        train_path=args.train,
        test_path=args.test,
        synthetic=synthetic,
        out_path=args.out,
        artifact_dir=args.artifacts,
    )
    records = run_experiment(config)
    print(f"wrote {len(records)} records" + (f" to {args.out}" if args.out else ""))
    return EXIT_OK


def _run_audit(args) -> int:
    """Quick bound audits; the deep versions live in the acceptance tests."""
    seed = args.seed
    lines: list[str] = []
    failures = 0

    def check(name: str, ok: bool, detail: str) -> None:
        nonlocal failures
        verdict = "pass" if ok else "FAIL"
        lines.append(f"audit {name}: {verdict} ({detail})")
        if not ok:
            failures += 1

    # 1. greedy-vs-oracle residual ratio on coherence-gated matrices
    sweep = omp_ratio_sweep(
        n_trials=60, m=12, d=16, k=2, seed=seed, kind="hadamard", coherence_cap=1.0 / 3.0 + 1e-12
    )
    check(
        "omp-ratio-sweep",
        sweep.all_within_bound,
        f"max ratio {sweep.max_ratio:.4f} vs bound {OMP_RATIO_BOUND:g} over {len(sweep.trials)} trials",
    )

    # 2. coherence gain floor on unit-column matrices
    for kind, m, d, k in (("hadamard", 12, 16, 2), ("hadamard", 12, 16, 3), ("bernoulli", 64, 128, 3)):
        A = generate(kind, m, d, derive_seed(seed, 41, m, d))
        report = sparse_gain_floor(A, k, n_vectors=500, seed=seed)
        floor = 1.0 - report.mu * (k - 1) - 1e-9
        worst = report.min_sampled_gain
        if report.min_exact_gain is not None:
            worst = min(worst, report.min_exact_gain)
        check(
            f"gain-floor-{kind}-m{m}-d{d}-k{k}",
            worst >= floor,
            f"min gain {worst:.6f} vs floor {floor:.6f}",
        )

    # 3. end-to-end regret transform on a small planted problem
    k = 3
    data = generate_synthetic(d=64, p=64, k_true=k, n=1000, noise_level=0.0, seed=seed)
    train, test = data.subset(0, 800), data.subset(800, 1000)
    A = generate("hadamard", 32, 64, derive_seed(seed, 43))
    delta = sample_rip_delta(A, 3 * k, n_supports=300, seed=seed)
    if delta < 1.0:
        c1, c2 = regret_factors(delta)
        bank = train_compressed(train, A, ridge_lambda=0.01)
        audit = regret_transform_audit(bank, A, test, k, c1, c2)
        check(
            "regret-transform",
            audit.holds,
            f"lhs {audit.lhs_mean:.6f} vs rhs {audit.rhs_mean:.6f} "
            f"(delta~{delta:.4f}, C1={c1:.1f}, C2={c2:.1f})",
        )
    else:
        check("regret-transform", False, f"sampled delta {delta:.4f} >= 1, constants undefined")

    # 4. predictor compression overhead for gaussian maps
    m, d, p = 100, 1000, 30
    bound = 1.0 + 10.0 / np.sqrt(m)
    worst_ratio = 0.0
    for rep in range(10):
        A = generate("gaussian", m, d, derive_seed(seed, 47, rep))
        C = philox(seed, 5).standard_normal((p, d))
        result = compression_error_ratio(C, A)
        worst_ratio = max(worst_ratio, result.ratio)
    zero = compression_error_ratio(np.zeros((p, d)), A)
    check(
        "compression-overhead",
        worst_ratio <= bound and zero.compressed_error <= 1e-18,
        f"worst ratio {worst_ratio:.4f} vs {bound:.4f}; zero-residual error {zero.compressed_error:g}",
    )

    output = "\n".join(lines) + "\n"
    sys.stdout.write(output)
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(output)
    if failures:
        raise AuditError(f"{failures} audit check(s) failed")
    return EXIT_OK


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.audit:
            return _run_audit(args)
        return _run_main(args)
    except ParameterError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except AuditError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_AUDIT
    except LabelSenseError as exc:  # any other package error is a config problem
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
