"""Greedy sparse recovery from compressed measurements.

Two pursuit decoders are implemented: orthogonal matching pursuit run for
2k steps, and a compressive-sampling matching pursuit variant that prunes
to 2k atoms per iteration. Both refit selected atoms by least squares and
report the compressed-domain residual they achieved.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError
from .sensing import CompressionMatrix, coherence, compress
from .vectors import SparseVector

ALGORITHMS = ("omp", "cosamp")

# A squared residual at or below this is treated as exactly zero when
# forming residual ratios (both decoders bottom out around machine noise).
ZERO_RESIDUAL_EPS = 1e-18

# Residual suboptimality guarantee for 2k-step OMP on matrices with
# coherence at most 0.1/k: compressed residual energy within 23x of the
# best k-sparse residual energy.
OMP_RATIO_BOUND = 23.0
OMP_COHERENCE_FACTOR = 0.1


@dataclass(frozen=True)
class ReconstructionConfig:
    """Decoder settings.

    max_iterations defaults to 2k for OMP (its natural step budget) and 50
    for CoSaMP when left as None.
    """

    k: int
    algorithm: str = "omp"
    max_iterations: int | None = None
    residual_tolerance: float = 1e-10
    ls_rank_tolerance: float = 1e-10

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"k must be >= 1, got {self.k}")
        if self.algorithm not in ALGORITHMS:
            raise ParameterError(f"unknown algorithm {self.algorithm!r}")
        if self.max_iterations is not None and self.max_iterations < 1:
            raise ParameterError("max_iterations must be >= 1 when given")
        if self.residual_tolerance < 0 or self.ls_rank_tolerance < 0:
            raise ParameterError("tolerances must be nonnegative")

    def resolved_max_iterations(self) -> int:
        if self.max_iterations is not None:
            return self.max_iterations
        return 2 * self.k if self.algorithm == "omp" else 50


@dataclass(frozen=True)
class ReconstructionResult:
    """A decoder's output and the residual it left behind."""

    estimate: SparseVector
    selected_support: tuple[int, ...]
    final_residual_norm: float
    iterations_used: int


def _lstsq(cols: np.ndarray, h: np.ndarray, rcond: float) -> np.ndarray:
    coef, *_ = np.linalg.lstsq(cols, h, rcond=rcond)
    return coef


def _as_measurement(A: CompressionMatrix, h) -> np.ndarray:
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (A.m,):
        raise ParameterError(f"measurement shape {h.shape} != ({A.m},)")
    if not np.all(np.isfinite(h)):
        raise ParameterError("measurement must be finite")
    return h


def _result(A: CompressionMatrix, h, support, coef, iterations) -> ReconstructionResult:
    if len(support):
        order = np.argsort(support)
        idx = np.asarray(support, dtype=np.int64)[order]
        vals = np.asarray(coef, dtype=np.float64)[order]
        keep = vals != 0.0
        estimate = SparseVector(A.d, idx[keep], vals[keep])
        residual = h - A.entries[:, idx] @ vals
    else:
        estimate = SparseVector.zero(A.d)
        residual = h
    return ReconstructionResult(
        estimate=estimate,
        selected_support=tuple(int(j) for j in support),
        final_residual_norm=float(np.linalg.norm(residual)),
        iterations_used=iterations,
    )


def omp(A: CompressionMatrix, h, config: ReconstructionConfig) -> ReconstructionResult:
    """Orthogonal matching pursuit, 2k selection steps.

    Each step picks the column with the largest |<r, a_j>| / ||a_j||
    (ties to the smaller index), then refits all selected atoms by least
    squares. Stops early when the residual norm falls to
    residual_tolerance, no column correlates with the residual, or the
    best column was already selected.

    Parameters
    ----------
    A : CompressionMatrix
    h : array_like, shape (m,)
        Measurement vector to decode.
    config : ReconstructionConfig
        Must have algorithm == "omp".

    Returns
    -------
    ReconstructionResult
        selected_support is in selection order; the estimate carries at
        most 2k nonzeros.
    """
    if config.algorithm != "omp":
        raise ParameterError(f"config.algorithm is {config.algorithm!r}, expected 'omp'")
    h = _as_measurement(A, h)
    support, coef, _, steps = _omp_trajectory(A, h, config)[-1]
    return _result(A, h, support, coef, steps)


def _omp_trajectory(A: CompressionMatrix, h: np.ndarray, config: ReconstructionConfig):
    """Greedy trajectory as a list of (support, coef, residual, steps) states.

    State i is the decoder after i selection steps; state 0 is the empty
    model. The trajectory is shared by omp() and the harness, which reads
    off the prefix for every sparsity level it needs (the selection
    sequence does not depend on k).
    """
    if config.k > A.d:
        raise ParameterError(f"k={config.k} exceeds dimension d={A.d}")
    max_steps = config.resolved_max_iterations()
    tol = config.residual_tolerance
    norms = np.linalg.norm(A.entries, axis=0)
    safe_norms = np.where(norms > 0.0, norms, 1.0)
    support: list[int] = []
    coef = np.empty(0)
    r = h
    states = [(list(support), coef, r, 0)]
    for step in range(1, max_steps + 1):
        if np.linalg.norm(r) <= tol:
            break
        scores = np.abs(A.entries.T @ r) / safe_norms
        scores[norms == 0.0] = 0.0
        j = int(np.argmax(scores))  # first max, so ties go to the smaller index
        if scores[j] == 0.0 or j in support:
            break
        support.append(j)
        coef = _lstsq(A.entries[:, support], h, config.ls_rank_tolerance)
        r = h - A.entries[:, support] @ coef
        states.append((list(support), coef, r, step))
    return states


def omp_prefix_estimates(A: CompressionMatrix, h, ks, config: ReconstructionConfig) -> dict:
    """OMP results for several sparsity targets from one greedy trajectory.

    Equivalent to {k: omp(A, h, config_at_k) for k in ks} because the
    selection sequence is k-independent and each state already holds its
    own least-squares refit.
    """
    ks = sorted(set(int(k) for k in ks))
    if not ks or ks[0] < 1:
        raise ParameterError("ks must be nonempty positive integers")
    base = ReconstructionConfig(
        k=ks[-1],
        algorithm="omp",
        max_iterations=2 * ks[-1],
        residual_tolerance=config.residual_tolerance,
        ls_rank_tolerance=config.ls_rank_tolerance,
    )
    h = _as_measurement(A, h)
    states = _omp_trajectory(A, h, base)
    out = {}
    for k in ks:
        support, coef, _, steps = states[min(2 * k, len(states) - 1)]
        out[k] = _result(A, h, support, coef, steps)
    return out


def cosamp(A: CompressionMatrix, h, config: ReconstructionConfig) -> ReconstructionResult:
    """Compressive-sampling matching pursuit with a 2k-atom working set.

    Per iteration: correlate the residual with all columns, merge the 2k
    strongest candidates into the current support, least-squares refit,
    prune back to the 2k largest coefficients. Stops when the residual
    norm stops improving by more than residual_tolerance (keeping the
    better of the last two iterates), reaches the tolerance, or after
    max_iterations (default 50).
    """
    if config.algorithm != "cosamp":
        raise ParameterError(f"config.algorithm is {config.algorithm!r}, expected 'cosamp'")
    if config.k > A.d:
        raise ParameterError(f"k={config.k} exceeds dimension d={A.d}")
    h = _as_measurement(A, h)
    tol = config.residual_tolerance
    width = 2 * config.k
    support = np.empty(0, dtype=np.int64)
    coef = np.empty(0)
    r = h
    res_norm = float(np.linalg.norm(r))
    iterations = 0
    for _ in range(config.resolved_max_iterations()):
        if res_norm <= tol:
            break
        proxy = A.entries.T @ r
        ranked = np.argsort(-np.abs(proxy), kind="stable")
        cand = ranked[:width]
        cand = cand[np.abs(proxy[cand]) > 0.0]
        if cand.size == 0:
            break
        merged = np.union1d(support, cand)
        merged_coef = _lstsq(A.entries[:, merged], h, config.ls_rank_tolerance)
        keep = np.argsort(-np.abs(merged_coef), kind="stable")[:width]
        keep.sort()  # back to index order
        new_support = merged[keep]
        new_coef = _lstsq(A.entries[:, new_support], h, config.ls_rank_tolerance)
        new_r = h - A.entries[:, new_support] @ new_coef
        new_norm = float(np.linalg.norm(new_r))
        iterations += 1
        if res_norm - new_norm <= tol:
            if new_norm < res_norm:
                support, coef, res_norm = new_support, new_coef, new_norm
            break
        support, coef, r, res_norm = new_support, new_coef, new_r, new_norm
    return _result(A, h, list(support), coef, iterations)


def sparsity_error(k: int, y: SparseVector) -> float:
    """Penalty for y not being k-sparse.

    With delta = y minus its k largest-magnitude entries (ties keep the
    smaller index), returns ||delta||_2^2 + (1/k) * ||delta||_1^2. Zero
    exactly when y has at most k nonzeros.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    _, rest = y.split_top_k(k)
    l2_sq = rest.norm_sq()
    l1 = float(np.abs(rest.values).sum())
    return l2_sq + (l1 * l1) / k


def residual_ratio(num_sq: float, den_sq: float) -> float:
    """Ratio of squared residuals with the shared zero conventions.

    Both at or below ZERO_RESIDUAL_EPS -> 1.0 (both decoders hit noise
    floor); only the denominator at zero -> +inf.
    """
    if num_sq <= ZERO_RESIDUAL_EPS and den_sq <= ZERO_RESIDUAL_EPS:
        return 1.0
    if den_sq <= ZERO_RESIDUAL_EPS:
        return float("inf")
    return num_sq / den_sq


@dataclass(frozen=True)
class ValidityCertificate:
    """Residual-ratio check of a heuristic decode against the exact oracle."""

    ratio: float
    bound: float
    within_bound: bool
    mu: float
    mu_threshold: float
    precondition_met: bool  # mu <= 0.1/k, under which the bound is guaranteed
    heuristic_residual_sq: float
    oracle_residual_sq: float


def validity_certificate(
    A: CompressionMatrix,
    h,
    k: int,
    heuristic: ReconstructionResult,
    oracle: ReconstructionResult,
) -> ValidityCertificate:
    """Compare a heuristic decode's residual to the exact k-sparse optimum.

    The bound itself is only guaranteed when coherence(A) <= 0.1/k; the
    certificate reports both the ratio and whether that precondition held,
    so callers can tell an out-of-regime miss from a genuine violation.
    """
    if k < 1:
        raise ParameterError(f"k must be >= 1, got {k}")
    _as_measurement(A, h)
    mu = coherence(A)
    threshold = OMP_COHERENCE_FACTOR / k
    num = heuristic.final_residual_norm**2
    den = oracle.final_residual_norm**2
    ratio = residual_ratio(num, den)
    return ValidityCertificate(
        ratio=ratio,
        bound=OMP_RATIO_BOUND,
        within_bound=ratio <= OMP_RATIO_BOUND,
        mu=mu,
        mu_threshold=threshold,
        precondition_met=mu <= threshold,
        heuristic_residual_sq=num,
        oracle_residual_sq=den,
    )


def regret_factors(delta: float, residual_bound: float = OMP_RATIO_BOUND) -> tuple[float, float]:
    """(C1, C2) turning compressed regret into label regret.

    For a decoder whose compressed residual is within `residual_bound` of
    the best k-sparse residual, on a matrix with restricted-isometry
    constant delta at sparsity 3k:

        C1 = 2 * (1 + sqrt(b))^2 / (1 - delta)
        C2 = 4 * (1 + (1 + sqrt(b)) / (1 - delta))^2

    Undefined at delta >= 1 (the isometry floor vanishes).
    """
    if not 0.0 <= delta < 1.0:
        raise ParameterError(f"delta must be in [0, 1), got {delta}")
    if residual_bound <= 0.0:
        raise ParameterError("residual_bound must be positive")
    root = 1.0 + np.sqrt(residual_bound)
    c1 = 2.0 * root**2 / (1.0 - delta)
    c2 = 4.0 * (1.0 + root / (1.0 - delta)) ** 2
    return float(c1), float(c2)
