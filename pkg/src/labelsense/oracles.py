"""Brute-force reference oracles and bound sweeps.

Everything here is exponential in sparsity or dimension and exists to
certify the fast paths: exact best-k least squares by support enumeration,
exact restricted-isometry constants, and randomized sweeps that compare
greedy decoders against the enumeration oracle under a coherence gate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb

import numpy as np

from ._rng import STREAM_SUPPORT_SAMPLE, STREAM_SWEEP, derive_seed, philox
from .errors import ParameterError, ScaleError
from .recovery import (
    OMP_RATIO_BOUND,
    OMP_COHERENCE_FACTOR,
    ReconstructionConfig,
    ReconstructionResult,
    omp,
    residual_ratio,
)
from .sensing import CompressionMatrix, RANDOM_KINDS, coherence, compress, generate
from .vectors import SparseVector

_EIG_CHUNK = 1 << 16


@dataclass(frozen=True)
class OracleBudget:
    """Hard ceilings on enumeration work.

    Defaults are deliberately small; callers that can afford more pass a
    larger budget explicitly rather than the package guessing.
    """

    max_dim: int = 20
    max_sparsity: int = 3
    max_supports: int = 10**6

    def check(self, d: int, s: int) -> None:
        if d > self.max_dim:
            raise ScaleError(f"d={d} exceeds oracle budget max_dim={self.max_dim}")
        if s > self.max_sparsity:
            raise ScaleError(f"s={s} exceeds oracle budget max_sparsity={self.max_sparsity}")
        n = comb(d, s)
        if n > self.max_supports:
            raise ScaleError(
                f"C({d},{s}) = {n} supports exceed budget max_supports={self.max_supports}"
            )


def _support_array(d: int, s: int) -> np.ndarray:
    return np.array(list(combinations(range(d), s)), dtype=np.int64)


def best_k_sparse_ls(
    A: CompressionMatrix, h, k: int, budget: OracleBudget | None = None
) -> ReconstructionResult:
    """Exact minimizer of ||A y - h||_2 over k-sparse y, by enumeration.

    Ties between supports resolve to the lexicographically smallest one.
    The reported residual is recomputed directly from the winning support
    (the normal-equation shortcut is only used for ranking).

    Returns
    -------
    ReconstructionResult
        iterations_used is the number of supports examined.
    """
    budget = budget or OracleBudget()
    if not 1 <= k <= A.d:
        raise ParameterError(f"need 1 <= k <= d, got k={k}")
    budget.check(A.d, k)
    h = np.asarray(h, dtype=np.float64)
    if h.shape != (A.m,):
        raise ParameterError(f"measurement shape {h.shape} != ({A.m},)")

    supports = _support_array(A.d, k)
    G = A.entries.T @ A.entries
    b = A.entries.T @ h
    h_sq = float(h @ h)
    G_s = G[supports[:, :, None], supports[:, None, :]]
    b_s = b[supports]
    try:
        coefs = np.linalg.solve(G_s, b_s[..., None])[..., 0]
        residuals = h_sq - np.einsum("ij,ij->i", b_s, coefs)
    except np.linalg.LinAlgError:
        # some support has dependent columns; fall back to per-support lstsq
        coefs = np.empty_like(b_s)
        residuals = np.empty(len(supports))
        for i, sup in enumerate(supports):
            c, *_ = np.linalg.lstsq(A.entries[:, sup], h, rcond=1e-10)
            coefs[i] = c
            r = h - A.entries[:, sup] @ c
            residuals[i] = float(r @ r)
    best = int(np.argmin(residuals))  # first minimum = lex smallest support
    support = supports[best]
    coef = coefs[best]
    residual = h - A.entries[:, support] @ coef
    keep = coef != 0.0
    return ReconstructionResult(
        estimate=SparseVector(A.d, support[keep], coef[keep]),
        selected_support=tuple(int(j) for j in support),
        final_residual_norm=float(np.linalg.norm(residual)),
        iterations_used=len(supports),
    )


def _eig_extremes(G: np.ndarray, supports: np.ndarray) -> tuple[float, float]:
    lo, hi = np.inf, -np.inf
    for start in range(0, len(supports), _EIG_CHUNK):
        chunk = supports[start : start + _EIG_CHUNK]
        sub = G[chunk[:, :, None], chunk[:, None, :]]
        eigs = np.linalg.eigvalsh(sub)
        lo = min(lo, float(eigs[:, 0].min()))
        hi = max(hi, float(eigs[:, -1].max()))
    return lo, hi


def measure_rip_delta(A: CompressionMatrix, s: int, budget: OracleBudget | None = None) -> float:
    """Exact restricted-isometry constant at sparsity s, by enumeration.

    delta = max over s-supports S of max(lambda_max(G_S) - 1,
    1 - lambda_min(G_S)) with G = A^T A. Can exceed 1 when some submatrix
    is far from isometric; callers deciding whether bound constants exist
    should test delta < 1 themselves.
    """
    budget = budget or OracleBudget()
    if not 1 <= s <= A.d:
        raise ParameterError(f"need 1 <= s <= d, got s={s}")
    budget.check(A.d, s)
    G = A.entries.T @ A.entries
    lo, hi = _eig_extremes(G, _support_array(A.d, s))
    return float(max(hi - 1.0, 1.0 - lo))


def sample_rip_delta(A: CompressionMatrix, s: int, n_supports: int, seed: int) -> float:
    """Sampled lower bound on the restricted-isometry constant at sparsity s.

    For sizes beyond the exhaustive cap: draws n_supports uniform
    s-subsets (with replacement across draws) and returns the worst
    deviation seen. Advisory — the true delta is at least this large.
    """
    if not 1 <= s <= A.d:
        raise ParameterError(f"need 1 <= s <= d, got s={s}")
    if n_supports < 1:
        raise ParameterError("n_supports must be >= 1")
    rng = philox(seed, STREAM_SUPPORT_SAMPLE)
    supports = np.empty((n_supports, s), dtype=np.int64)
    for i in range(n_supports):
        supports[i] = np.sort(rng.choice(A.d, size=s, replace=False))
    G = A.entries.T @ A.entries
    lo, hi = _eig_extremes(G, supports)
    return float(max(hi - 1.0, 1.0 - lo))


@dataclass(frozen=True)
class SweepTrial:
    """One planted decode instance inside a sweep."""

    index: int
    matrix_seed: int
    snr_db: float  # inf for the noiseless arm
    mu: float
    planted: SparseVector
    measurement: np.ndarray = field(repr=False)
    omp_residual_sq: float
    oracle_residual_sq: float
    ratio: float
    within_bound: bool


@dataclass(frozen=True)
class SweepReport:
    """Greedy-vs-oracle residual ratios over coherence-gated random matrices."""

    kind: str
    m: int
    d: int
    k: int
    coherence_cap: float
    trials: tuple[SweepTrial, ...]
    attempts: int
    max_ratio: float
    all_within_bound: bool

    @property
    def acceptance_rate(self) -> float:
        return len(self.trials) / self.attempts if self.attempts else 0.0

    def report_lines(self) -> list[str]:
        lines = []
        for t in self.trials:
            verdict = "pass" if t.within_bound else "FAIL"
            lines.append(
                f"trial={t.index:04d} seed={t.matrix_seed} snr_db={t.snr_db:g} "
                f"mu={t.mu:.6f} ratio={t.ratio:.6f} {verdict}"
            )
        return lines


# SNR arms cycled round-robin across trials; inf = no measurement noise.
SWEEP_SNR_DB = (float("inf"), 20.0, 6.0)


def omp_ratio_sweep(
    n_trials: int,
    m: int,
    d: int,
    k: int,
    seed: int,
    kind: str = "gaussian",
    coherence_cap: float | None = None,
    snr_db: tuple[float, ...] = SWEEP_SNR_DB,
    budget: OracleBudget | None = None,
    min_attempts: int = 1000,
) -> SweepReport:
    """Residual ratio of 2k-step greedy pursuit against the exact oracle.

    Each trial draws matrices of the given kind until one passes the
    coherence gate (default cap 0.1/k, the regime where the 23x residual
    guarantee applies), plants a k-sparse vector with magnitudes in
    [0.5, 1.5] and random signs, measures it at one of the SNR arms, and
    decodes. If, after min_attempts draws, more than 99% were rejected by
    the gate, the configuration is considered infeasible and a
    ParameterError asks for a larger m or a looser cap.

    Returns
    -------
    SweepReport
        One SweepTrial per trial, with enough state to rerun instances.
    """
    if n_trials < 1:
        raise ParameterError("n_trials must be >= 1")
    if kind not in RANDOM_KINDS:
        raise ParameterError(f"unknown matrix kind {kind!r}")
    if not 1 <= k <= d:
        raise ParameterError(f"need 1 <= k <= d, got k={k}")
    cap = OMP_COHERENCE_FACTOR / k if coherence_cap is None else coherence_cap
    if not 0.0 < cap <= 1.0:
        raise ParameterError(f"coherence cap must be in (0, 1], got {cap}")
    budget = budget or OracleBudget()
    budget.check(d, k)

    rng = philox(seed, STREAM_SWEEP)
    config = ReconstructionConfig(k=k, algorithm="omp")
    trials = []
    attempts = 0
    accepted = 0
    while accepted < n_trials:
        matrix_seed = derive_seed(seed, 17, attempts)
        attempts += 1
        A = generate(kind, m, d, matrix_seed)
        mu = coherence(A)
        if mu > cap:
            if attempts >= min_attempts and accepted / attempts < 0.01:
                raise ParameterError(
                    f"coherence gate mu <= {cap:g} rejected {attempts - accepted} of "
                    f"{attempts} draws for kind={kind} m={m} d={d}; increase m or "
                    "relax the cap"
                )
            continue

        support = np.sort(rng.choice(d, size=k, replace=False)).astype(np.int64)
        magnitudes = rng.uniform(0.5, 1.5, size=k)
        signs = np.where(rng.random(k) < 0.5, -1.0, 1.0)
        planted = SparseVector(d, support, magnitudes * signs)
        clean = compress(A, planted)
        level = snr_db[accepted % len(snr_db)]
        if np.isinf(level):
            h = clean
        else:
            g = rng.standard_normal(m)
            g_norm = np.linalg.norm(g)
            scale = np.linalg.norm(clean) * 10.0 ** (-level / 20.0)
            h = clean + (scale / g_norm) * g if g_norm > 0 else clean

        decoded = omp(A, h, config)
        oracle = best_k_sparse_ls(A, h, k, budget)
        num = decoded.final_residual_norm**2
        den = oracle.final_residual_norm**2
        ratio = residual_ratio(num, den)
        trials.append(
            SweepTrial(
                index=accepted,
                matrix_seed=matrix_seed,
                snr_db=level,
                mu=mu,
                planted=planted,
                measurement=h,
                omp_residual_sq=num,
                oracle_residual_sq=den,
                ratio=ratio,
                within_bound=ratio <= OMP_RATIO_BOUND,
            )
        )
        accepted += 1

    max_ratio = max(t.ratio for t in trials)
    return SweepReport(
        kind=kind,
        m=m,
        d=d,
        k=k,
        coherence_cap=cap,
        trials=tuple(trials),
        attempts=attempts,
        max_ratio=max_ratio,
        all_within_bound=all(t.within_bound for t in trials),
    )


@dataclass(frozen=True)
class GainReport:
    """Smallest squared gain ||A y||^2 seen over unit k-sparse vectors."""

    k: int
    mu: float
    min_sampled_gain: float
    min_exact_gain: float | None  # exact enumeration, when within budget
    n_vectors: int


def sparse_gain_floor(
    A: CompressionMatrix,
    k: int,
    n_vectors: int,
    seed: int,
    budget: OracleBudget | None = None,
) -> GainReport:
    """Probe how much A can shrink unit k-sparse vectors.

    Requires unit-norm columns (within 1e-9), under which coherence mu
    guarantees ||A y||^2 >= 1 - mu * (k - 1) for every unit k-sparse y.
    Samples n_vectors random unit k-sparse vectors and, when the support
    enumeration fits the budget, also computes the exact minimum
    eigenvalue over all k-column Gram submatrices.
    """
    if not 1 <= k <= A.d:
        raise ParameterError(f"need 1 <= k <= d, got k={k}")
    if n_vectors < 1:
        raise ParameterError("n_vectors must be >= 1")
    norms = np.linalg.norm(A.entries, axis=0)
    if np.any(np.abs(norms - 1.0) > 1e-9):
        raise ParameterError("sparse_gain_floor requires unit-norm columns")
    mu = coherence(A)
    rng = philox(seed, STREAM_SWEEP)
    min_gain = np.inf
    for _ in range(n_vectors):
        support = np.sort(rng.choice(A.d, size=k, replace=False))
        v = rng.standard_normal(k)
        v /= np.linalg.norm(v)
        g = A.entries[:, support] @ v
        min_gain = min(min_gain, float(g @ g))
    exact = None
    try:
        (budget or OracleBudget()).check(A.d, k)
    except ScaleError:
        pass
    else:
        G = A.entries.T @ A.entries
        lo, _ = _eig_extremes(G, _support_array(A.d, k))
        exact = float(lo)
    return GainReport(
        k=k,
        mu=mu,
        min_sampled_gain=float(min_gain),
        min_exact_gain=exact,
        n_vectors=n_vectors,
    )
