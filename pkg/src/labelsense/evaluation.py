"""Metrics, baselines, and bound audits for compressed label prediction."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DataError, ParameterError
from .learner import RegressorBank, predict_compressed
from .recovery import (
    ReconstructionConfig,
    ReconstructionResult,
    cosamp,
    omp,
    sparsity_error,
)
from .sensing import CompressionMatrix, compress
from .vectors import SparseVector

# Decoders selectable from run configurations; "cd" is the correlation
# baseline below, the other two live in recovery.
ALGORITHM_CHOICES = ("omp", "cosamp", "cd")


@dataclass(frozen=True)
class ExperimentRecord:
    """One (algorithm, matrix kind, m, k) evaluation row."""

    algorithm: str
    matrix_kind: str
    m: int
    k: int
    mean_squared_error: float
    precision_at_k: float
    n_test: int
    seed: int

    def __post_init__(self):
        if self.n_test < 1:
            raise ParameterError("n_test must be >= 1")
        if not 0.0 <= self.precision_at_k <= 1.0:
            raise ParameterError(f"precision {self.precision_at_k} outside [0, 1]")
        if self.mean_squared_error < 0.0:
            raise ParameterError("mse must be nonnegative")


def squared_error(yhat: SparseVector, y: SparseVector) -> float:
    """||yhat - y||_2^2 via a sparse support merge."""
    if yhat.dim != y.dim:
        raise DataError(f"dim mismatch {yhat.dim} != {y.dim}")
    if yhat.nnz == 0:
        return y.norm_sq()
    if y.nnz == 0:
        return yhat.norm_sq()
    idx = np.concatenate([yhat.indices, y.indices])
    val = np.concatenate([yhat.values, -y.values])
    uniq, inverse = np.unique(idx, return_inverse=True)
    diff = np.zeros(uniq.size)
    np.add.at(diff, inverse, val)
    return float(diff @ diff)


def precision_at_k(yhat: SparseVector, y_true: SparseVector, k: int) -> float:
    """Fraction of the k highest-magnitude predicted coordinates that are true.

    Ties in |value| rank the smaller index first. If the prediction has
    fewer than k nonzeros the denominator is still k.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if yhat.dim != y_true.dim:
        raise DataError(f"dim mismatch {yhat.dim} != {y_true.dim}")
    ranked = yhat.ranked_indices()[:k]
    if ranked.size == 0:
        return 0.0
    hits = int(np.isin(ranked, y_true.indices, assume_unique=True).sum())
    return hits / k


def correlation_decode(
    A: CompressionMatrix, h, k: int, ls_rank_tolerance: float = 1e-10
) -> ReconstructionResult:
    """Rank coordinates of A^T h, least-squares refit the top k.

    The cheap one-shot baseline: no residual updates, so correlated
    columns are not disentangled and the decode degrades once m < d. With
    h = 0 the proxy vanishes and the zero vector is returned.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    if k > A.d:
        raise ParameterError(f"k={k} exceeds dimension d={A.d}")
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (A.m,):
        raise ParameterError(f"measurement shape {h.shape} != ({A.m},)")
    proxy = A.entries.T @ h
    ranked = np.argsort(-np.abs(proxy), kind="stable")[:k]
    ranked = ranked[np.abs(proxy[ranked]) > 0.0]
    if ranked.size == 0:
        return ReconstructionResult(
            estimate=SparseVector.zero(A.d),
            selected_support=(),
            final_residual_norm=float(np.linalg.norm(h)),
            iterations_used=1,
        )
    support = np.sort(ranked)
    coef, *_ = np.linalg.lstsq(A.entries[:, support], h, rcond=ls_rank_tolerance)
    residual = h - A.entries[:, support] @ coef
    keep = coef != 0.0
    return ReconstructionResult(
        estimate=SparseVector(A.d, support[keep].astype(np.int64), coef[keep]),
        selected_support=tuple(int(j) for j in support),
        final_residual_norm=float(np.linalg.norm(residual)),
        iterations_used=1,
    )


def reconstruct(
    A: CompressionMatrix,
    h,
    algorithm: str,
    k: int,
    residual_tolerance: float = 1e-10,
    ls_rank_tolerance: float = 1e-10,
) -> ReconstructionResult:
    """Dispatch a measurement vector to the named decoder."""
    if algorithm == "cd":
        return correlation_decode(A, h, k, ls_rank_tolerance)
    if algorithm not in ("omp", "cosamp"):
        raise ParameterError(f"unknown algorithm {algorithm!r}")
    config = ReconstructionConfig(
        k=k,
        algorithm=algorithm,
        residual_tolerance=residual_tolerance,
        ls_rank_tolerance=ls_rank_tolerance,
    )
    return omp(A, h, config) if algorithm == "omp" else cosamp(A, h, config)


def sparsity_profile(p_hat: SparseVector, k: int) -> float:
    """Relative energy of p_hat beyond its best k-sparse approximation.

    Values are clipped into [0, 1] first (predictions are estimates of
    probabilities). Returns a value in [0, 1]; raises DataError when
    nothing survives clipping, since the ratio is undefined there.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    clipped = np.clip(p_hat.values, 0.0, 1.0)
    total = float(clipped @ clipped)
    if total == 0.0:
        raise DataError("profile undefined: no mass after clipping into [0, 1]")
    order = np.argsort(-clipped, kind="stable")  # clipped values are nonnegative
    tail = clipped[order[k:]]
    return float(tail @ tail) / total


def sparsity_profile_curve(predictions, ks) -> np.ndarray:
    """Mean sparsity profile over a set of predictions, one value per k."""
    ks = list(ks)
    out = np.zeros(len(ks))
    count = 0
    for p_hat in predictions:
        out += np.array([sparsity_profile(p_hat, k) for k in ks])
        count += 1
    if count == 0:
        raise DataError("no predictions")
    return out / count


@dataclass(frozen=True)
class RegretAuditReport:
    """Mean label-space regret versus its transformed compressed bound."""

    lhs_mean: float
    rhs_mean: float
    holds: bool
    compressed_error_mean: float
    sparsity_error_mean: float
    c1: float
    c2: float
    k: int
    n: int


def regret_transform_audit(
    bank: RegressorBank,
    A: CompressionMatrix,
    dataset,
    k: int,
    c1: float,
    c2: float,
    algorithm: str = "omp",
) -> RegretAuditReport:
    """Check mean ||decode(H(x)) - ybar||^2 <= C1 * mean ||H(x) - A ybar||^2
    + C2 * mean sperr(k, ybar) on a dataset with known conditional means.

    The right-hand side uses the caller's (C1, C2); pairing them with a
    restricted-isometry constant measured at sparsity 3k makes this the
    end-to-end regret bound for a 2k-step greedy decoder.
    """
    if not dataset.has_ground_truth:
        raise DataError("regret audit needs ground-truth conditional means")
    if dataset.n < 1:
        raise DataError("empty dataset")
    if dataset.d != A.d:
        raise ParameterError(f"dataset label dim {dataset.d} != matrix d {A.d}")
    lhs = np.zeros(dataset.n)
    comp = np.zeros(dataset.n)
    sperr = np.zeros(dataset.n)
    for i, ((x, _), ybar) in enumerate(zip(dataset.examples, dataset.ground_truth)):
        h = predict_compressed(bank, x)
        decoded = reconstruct(A, h, algorithm, k).estimate
        lhs[i] = squared_error(decoded, ybar)
        delta = h - compress(A, ybar)
        comp[i] = float(delta @ delta)
        sperr[i] = sparsity_error(k, ybar)
    lhs_mean = float(lhs.mean())
    comp_mean = float(comp.mean())
    sperr_mean = float(sperr.mean())
    rhs_mean = c1 * comp_mean + c2 * sperr_mean
    return RegretAuditReport(
        lhs_mean=lhs_mean,
        rhs_mean=rhs_mean,
        holds=lhs_mean <= rhs_mean,
        compressed_error_mean=comp_mean,
        sparsity_error_mean=sperr_mean,
        c1=c1,
        c2=c2,
        k=k,
        n=dataset.n,
    )
