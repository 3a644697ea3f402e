"""Compression matrices: generation, application, and geometry diagnostics.

A compression matrix A maps d-dimensional label vectors to m measurements,
m <= d. Three random constructions are supported plus the identity map used
by the uncompressed baseline. Reconstruction quality is governed by column
geometry, measured here by coherence and (for small sizes) an exhaustive
restricted-isometry check.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np
from scipy.linalg import hadamard as _sylvester

from ._rng import philox
from .errors import DataError, DegenerateColumnError, ParameterError, ScaleError
from .vectors import SparseVector

RANDOM_KINDS = ("gaussian", "bernoulli", "hadamard")
KINDS = RANDOM_KINDS + ("identity",)

# LSMX on-disk format. Header fields are little-endian:
#   magic "LSMX" | version u16 | kind u8 | m u64 | d u64 | seed u64
# followed by m*d row-major float64 entries.
_LSMX_MAGIC = b"LSMX"
_LSMX_VERSION = 1
_LSMX_HEADER = struct.Struct("<4sHBQQQ")
_KIND_CODES = {kind: code for code, kind in enumerate(KINDS)}
_CODE_KINDS = {code: kind for kind, code in _KIND_CODES.items()}

# Exhaustive RIP checks are combinatorial; these are hard caps, not defaults.
MAX_RIP_DIM = 24
MAX_RIP_SPARSITY = 4


@dataclass(frozen=True)
class CompressionMatrix:
    """An m x d sensing matrix together with how it was made."""

    kind: str
    m: int
    d: int
    seed: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ParameterError(f"unknown matrix kind {self.kind!r}")
        if not 1 <= self.m <= self.d:
            raise ParameterError(f"need 1 <= m <= d, got m={self.m} d={self.d}")
        if self.kind == "identity" and self.m != self.d:
            raise ParameterError("identity compression requires m == d")
        ent = np.asarray(self.entries, dtype=np.float64)
        if ent.shape != (self.m, self.d):
            raise ParameterError(f"entries shape {ent.shape} != ({self.m}, {self.d})")
        if not np.all(np.isfinite(ent)):
            raise ParameterError("entries must be finite")
        ent = ent.copy() if ent.base is not None or ent.flags.writeable else ent
        ent.setflags(write=False)
        object.__setattr__(self, "entries", ent)


@dataclass(frozen=True)
class RipCheckResult:
    """Outcome of an exhaustive restricted-isometry check at sparsity s."""

    holds: bool
    s: int
    delta: float
    witness: tuple[int, ...] | None  # first violating support, lex order


@lru_cache(maxsize=4)
def _hadamard_base(d: int) -> np.ndarray:
    H = _sylvester(d).astype(np.float64)
    H.setflags(write=False)
    return H


def _is_power_of_two(n: int) -> bool:
    return n >= 1 and (n & (n - 1)) == 0


def generate(kind: str, m: int, d: int, seed: int) -> CompressionMatrix:
    """Draw a compression matrix of the given kind.

    Parameters
    ----------
    kind : str
        One of "gaussian" (iid N(0, 1/m)), "bernoulli" (iid +-1/sqrt(m)),
        or "hadamard" (m distinct rows of the d x d Sylvester-Hadamard
        matrix scaled by 1/sqrt(m); requires d to be a power of two).
    m, d : int
        Target shape, 1 <= m <= d.
    seed : int
        Stream key. The same (kind, m, d, seed) regenerates bit-identical
        entries.

    Returns
    -------
    CompressionMatrix
    """
    if kind not in RANDOM_KINDS:
        raise ParameterError(f"unknown matrix kind {kind!r}")
    if not 1 <= m <= d:
        raise ParameterError(f"need 1 <= m <= d, got m={m} d={d}")
    if seed < 0:
        raise ParameterError("seed must be nonnegative")
    rng = philox(seed)
    scale = 1.0 / np.sqrt(m)
    if kind == "gaussian":
        ent = rng.standard_normal((m, d)) * scale
    elif kind == "bernoulli":
        ent = np.where(rng.random((m, d)) < 0.5, -scale, scale)
    else:
        if not _is_power_of_two(d):
            raise ParameterError(f"hadamard kind requires d a power of two, got d={d}")
        rows = np.sort(rng.choice(d, size=m, replace=False))
        ent = _hadamard_base(d)[rows] * scale
    return CompressionMatrix(kind, m, d, seed, ent)


def identity(d: int) -> CompressionMatrix:
    """The m = d identity map (the no-compression baseline)."""
    return CompressionMatrix("identity", d, d, 0, np.eye(d))


def compress(A: CompressionMatrix, y: SparseVector) -> np.ndarray:
    """Apply A to a sparse vector; O(m * nnz)."""
    if y.dim != A.d:
        raise ParameterError(f"vector dim {y.dim} != matrix d {A.d}")
    if y.nnz == 0:
        return np.zeros(A.m)
    return A.entries[:, y.indices] @ y.values


def coherence(A: CompressionMatrix) -> float:
    """Largest normalized inner product between distinct columns.

    Raises DegenerateColumnError if some column is identically zero (the
    quantity is undefined there).
    """
    G = A.entries.T @ A.entries
    norms_sq = np.diag(G)
    zero = np.flatnonzero(norms_sq == 0.0)
    if zero.size:
        raise DegenerateColumnError(int(zero[0]))
    if A.d == 1:
        return 0.0
    norms = np.sqrt(norms_sq)
    C = np.abs(G) / np.outer(norms, norms)
    np.fill_diagonal(C, 0.0)
    return float(C.max())


def rip_check(A: CompressionMatrix, s: int, delta: float) -> RipCheckResult:
    """Exhaustively test the restricted isometry property at level (s, delta).

    Checks that every s-column submatrix B satisfies
    (1-delta) <= eig(B^T B) <= (1+delta). Exhaustive over all supports, so
    hard-limited to d <= 24 and s <= 4; larger instances must go through
    the sampling estimator in `oracles`.

    Returns
    -------
    RipCheckResult
        holds=False carries the first violating support in lex order.
    """
    if not 1 <= s <= A.d:
        raise ParameterError(f"need 1 <= s <= d, got s={s}")
    if not 0.0 < delta < 1.0:
        raise ParameterError(f"delta must be in (0, 1), got {delta}")
    if A.d > MAX_RIP_DIM or s > MAX_RIP_SPARSITY:
        raise ScaleError(
            f"rip_check is exhaustive and capped at d <= {MAX_RIP_DIM}, "
            f"s <= {MAX_RIP_SPARSITY}; got d={A.d}, s={s}"
        )
    from itertools import combinations

    G = A.entries.T @ A.entries
    lo, hi = 1.0 - delta, 1.0 + delta
    for support in combinations(range(A.d), s):
        ix = np.array(support)
        eigs = np.linalg.eigvalsh(G[np.ix_(ix, ix)])
        if eigs[0] < lo or eigs[-1] > hi:
            return RipCheckResult(False, s, delta, support)
    return RipCheckResult(True, s, delta, None)


def save_matrix(A: CompressionMatrix, path) -> None:
    """Write A in the LSMX binary format."""
    header = _LSMX_HEADER.pack(
        _LSMX_MAGIC, _LSMX_VERSION, _KIND_CODES[A.kind], A.m, A.d, A.seed
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(A.entries.astype("<f8").tobytes(order="C"))


def load_matrix(path) -> CompressionMatrix:
    """Read an LSMX file back into a CompressionMatrix."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    if len(raw) < _LSMX_HEADER.size:
        raise DataError(f"{path}: truncated LSMX header")
    magic, version, kind_code, m, d, seed = _LSMX_HEADER.unpack_from(raw)
    if magic != _LSMX_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    if version != _LSMX_VERSION:
        raise DataError(f"{path}: unsupported LSMX version {version}")
    if kind_code not in _CODE_KINDS:
        raise DataError(f"{path}: unknown kind code {kind_code}")
    expected = _LSMX_HEADER.size + 8 * m * d
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {len(raw)}")
    ent = np.frombuffer(raw, dtype="<f8", offset=_LSMX_HEADER.size).reshape(m, d)
    return CompressionMatrix(_CODE_KINDS[kind_code], m, d, seed, ent.copy())
