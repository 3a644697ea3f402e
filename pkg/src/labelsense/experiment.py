"""End-to-end experiment harness: data -> banks -> decoders -> CSV.

For every (matrix kind, m, algorithm) cell the harness trains a compressed
regressor bank, decodes each test example at every sparsity level up to
k_max, and records MSE and precision-at-k rows. An uncompressed
one-against-all reference (identity matrix, m = d) is always computed
alongside. Identical configurations produce byte-identical CSV output.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._rng import derive_seed
from .datasets import MultiLabelDataset, generate_synthetic, parse_dataset
from .errors import DataError, ParameterError
from .evaluation import (
    ALGORITHM_CHOICES,
    ExperimentRecord,
    precision_at_k,
    reconstruct,
    squared_error,
)
from .learner import RegressorBank, predict_matrix, save_bank, train_compressed
from .recovery import ReconstructionConfig, omp_prefix_estimates
from .sensing import RANDOM_KINDS, CompressionMatrix, generate, identity, save_matrix
from .vectors import SparseVector

CSV_HEADER = "algo,matrix,m,k,mse,prec_at_k,n_test,seed"

# Stream tags for seeds derived from the run seed (see _rng.derive_seed).
_SYNTH_TAG = 23
_MATRIX_TAG = 29


@dataclass(frozen=True)
class SyntheticSpec:
    """Planted-problem shape for runs without dataset files."""

    d: int
    p: int
    k_true: int
    n: int
    noise_level: float
    n_test: int = 0  # 0 -> max(1, n // 4)

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError("synthetic n must be >= 1")
        if self.n_test < 0:
            raise ParameterError("n_test must be >= 0")

    def resolved_n_test(self) -> int:
        return self.n_test if self.n_test > 0 else max(1, self.n // 4)


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs; the seed alone determines all randomness."""

    matrix_kind: str
    m_list: tuple[int, ...]
    k_max: int
    algorithms: tuple[str, ...] = ("omp",)
    ridge_lambda: float = 0.01
    seed: int = 0
    train_path: str | None = None
    test_path: str | None = None
    synthetic: SyntheticSpec | None = None
    out_path: str | None = None
    artifact_dir: str | None = None

    def __post_init__(self):
        paths = self.train_path is not None or self.test_path is not None
        if paths and self.synthetic is not None:
            raise ParameterError("give either train/test paths or a synthetic spec, not both")
        if not paths and self.synthetic is None:
            raise ParameterError("no data source: need train/test paths or a synthetic spec")
        if paths and (self.train_path is None or self.test_path is None):
            raise ParameterError("train and test paths must be given together")
        if self.matrix_kind not in RANDOM_KINDS:
            raise ParameterError(f"unknown matrix kind {self.matrix_kind!r}")
        if not self.m_list or any(m < 1 for m in self.m_list):
            raise ParameterError("m_list must be nonempty positive integers")
        if len(set(self.m_list)) != len(self.m_list):
            raise ParameterError("m_list has duplicates")
        if self.k_max < 1:
            raise ParameterError("k_max must be >= 1")
        if self.k_max > min(self.m_list):
            raise ParameterError(
                f"k_max={self.k_max} exceeds the smallest m={min(self.m_list)}"
            )
        if not self.algorithms:
            raise ParameterError("algorithms must be nonempty")
        for algo in self.algorithms:
            if algo not in ALGORITHM_CHOICES:
                raise ParameterError(f"unknown algorithm {algo!r}")
        if self.ridge_lambda < 0.0:
            raise ParameterError("ridge_lambda must be >= 0")
        if self.seed < 0:
            raise ParameterError("seed must be >= 0")


def _precision_source(k: int, d: int) -> int:
    # precision-at-k reads its ranking from the 10-sparse decode for
    # k <= 5 and from the 2k-sparse decode for k >= 6
    return min(10 if k <= 5 else 2 * k, d)


def _load_data(config: RunConfig) -> tuple[MultiLabelDataset, MultiLabelDataset]:
    if config.synthetic is not None:
        spec = config.synthetic
        n_test = spec.resolved_n_test()
        full = generate_synthetic(
            d=spec.d,
            p=spec.p,
            k_true=spec.k_true,
            n=spec.n + n_test,
            noise_level=spec.noise_level,
            seed=derive_seed(config.seed, _SYNTH_TAG),
        )
        return full.subset(0, spec.n), full.subset(spec.n, spec.n + n_test)
    train = parse_dataset(config.train_path)
    test = parse_dataset(config.test_path)
    if (train.p, train.d) != (test.p, test.d):
        raise DataError(
            f"train dims (p={train.p}, d={train.d}) != test dims (p={test.p}, d={test.d})"
        )
    return train, test


def _dense_features(dataset: MultiLabelDataset) -> np.ndarray:
    X = np.zeros((dataset.n, dataset.p))
    for i, (x, _) in enumerate(dataset.examples):
        X[i, x.indices] = x.values
    return X


def _evaluate_cell(
    A: CompressionMatrix,
    bank: RegressorBank,
    test: MultiLabelDataset,
    algorithm: str,
    k_max: int,
) -> list[tuple[int, float, float]]:
    """Per-k (mse, precision) of one decoder against one bank.

    This is the exact evaluation path the re-run invariant exercises:
    feeding back a persisted (matrix, bank) pair must reproduce the rows.
    """
    ks_eval = list(range(1, k_max + 1))
    sources = {_precision_source(k, A.d) for k in ks_eval}
    all_ks = sorted(set(ks_eval) | sources)
    H = predict_matrix(bank, _dense_features(test))
    mse = {k: np.zeros(test.n) for k in ks_eval}
    prec = {k: np.zeros(test.n) for k in ks_eval}
    base_cfg = ReconstructionConfig(k=max(all_ks), algorithm="omp")
    for i, (_, y) in enumerate(test.examples):
        h = H[i]
        if algorithm == "oaa":
            dense = SparseVector.from_dense(h)
            estimates = {k: dense.top_k(k) for k in all_ks}
        elif algorithm == "omp":
            results = omp_prefix_estimates(A, h, all_ks, base_cfg)
            estimates = {k: r.estimate for k, r in results.items()}
        else:
            estimates = {k: reconstruct(A, h, algorithm, k).estimate for k in all_ks}
        for k in ks_eval:
            mse[k][i] = squared_error(estimates[k], y)
            prec[k][i] = precision_at_k(estimates[_precision_source(k, A.d)], y, k)
    return [(k, float(mse[k].mean()), float(prec[k].mean())) for k in ks_eval]


def _write_csv(records: list[ExperimentRecord], path) -> None:
    """Write rows atomically (temp file + rename) with 17-digit floats."""
    lines = [CSV_HEADER]
    for r in records:
        lines.append(
            f"{r.algorithm},{r.matrix_kind},{r.m},{r.k},"
            f"{r.mean_squared_error:.17g},{r.precision_at_k:.17g},{r.n_test},{r.seed}"
        )
    payload = "\n".join(lines) + "\n"
    directory = Path(path).resolve().parent
    directory.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".csv_", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(payload)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def run_experiment(config: RunConfig) -> list[ExperimentRecord]:
    """Run every (m, algorithm) cell plus the one-against-all reference.

    Row order in the returned list and the CSV: the reference first
    (k ascending), then m in config order x algorithm in config order x k
    ascending. Writes config.out_path atomically when set, and persists
    matrices/banks under config.artifact_dir when set.
    """
    train, test = _load_data(config)
    if test.n < 1:
        raise DataError("empty test set")
    for m in config.m_list:
        if m > train.d:
            raise ParameterError(f"m={m} exceeds label dimension d={train.d}")
    train_hash = train.content_hash()

    artifact_dir = Path(config.artifact_dir) if config.artifact_dir else None
    if artifact_dir is not None:
        artifact_dir.mkdir(parents=True, exist_ok=True)

    records: list[ExperimentRecord] = []

    # uncompressed reference: identity compression, truncation decode
    ref_bank = train_compressed(train, identity(train.d), config.ridge_lambda)
    for k, mse, prec in _evaluate_cell(identity(train.d), ref_bank, test, "oaa", config.k_max):
        records.append(
            ExperimentRecord("oaa", "identity", train.d, k, mse, prec, test.n, config.seed)
        )
    if artifact_dir is not None:
        save_bank(ref_bank, artifact_dir / f"identity_m{train.d}.lsrb")

    kind_code = RANDOM_KINDS.index(config.matrix_kind)
    for m in config.m_list:
        A = generate(
            config.matrix_kind, m, train.d, derive_seed(config.seed, _MATRIX_TAG, kind_code, m)
        )
        bank = train_compressed(train, A, config.ridge_lambda)
        if artifact_dir is not None:
            stem = f"{config.matrix_kind}_m{m}"
            save_matrix(A, artifact_dir / f"{stem}.lsmx")
            save_bank(bank, artifact_dir / f"{stem}.lsrb")
        for algo in config.algorithms:
            for k, mse, prec in _evaluate_cell(A, bank, test, algo, config.k_max):
                records.append(
                    ExperimentRecord(
                        algo, config.matrix_kind, m, k, mse, prec, test.n, config.seed
                    )
                )

    if train.content_hash() != train_hash:
        raise DataError("training data mutated during the run")  # pragma: no cover
    if config.out_path is not None:
        _write_csv(records, config.out_path)
    return records
