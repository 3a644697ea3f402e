"""Ridge regression onto compressed label measurements.

Training solves m ridge problems that share one normal-equation
factorization: W = (X^T X + lambda I)^-1 X^T Z, where Z holds the
compressed labels row by row. Prediction is a single matrix-vector
product per example.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.linalg import cho_factor, cho_solve

from .errors import ConditioningError, DataError, ParameterError
from .sensing import CompressionMatrix
from .vectors import SparseVector

# LSRB on-disk format, little-endian:
#   magic "LSRB" | version u16 | p u64 | m u64 | lambda f64 | trained_on u64
# followed by p*m column-major float64 weights.
_LSRB_MAGIC = b"LSRB"
_LSRB_VERSION = 1
_LSRB_HEADER = struct.Struct("<4sHQQdQ")


@dataclass(frozen=True)
class RegressorBank:
    """m linear regressors over p features, stored as a p x m weight matrix."""

    p: int
    m: int
    weights: np.ndarray = field(repr=False)
    ridge_lambda: float
    trained_on: int

    def __post_init__(self):
        if self.p < 1 or self.m < 1:
            raise ParameterError("p and m must be >= 1")
        if self.ridge_lambda < 0.0:
            raise ParameterError("ridge_lambda must be nonnegative")
        if self.trained_on < 1:
            raise ParameterError("trained_on must be >= 1")
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.p, self.m):
            raise ParameterError(f"weights shape {w.shape} != ({self.p}, {self.m})")
        if not np.all(np.isfinite(w)):
            raise ParameterError("weights must be finite")
        w = w.copy() if w.base is not None or w.flags.writeable else w
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)


def fit_ridge(X, Z, ridge_lambda: float, rank_tolerance: float = 1e-10) -> RegressorBank:
    """Fit all m targets with one Cholesky factorization.

    Parameters
    ----------
    X : array_like, shape (n, p)
        Feature rows.
    Z : array_like, shape (n, m)
        Target rows (compressed labels).
    ridge_lambda : float
        Nonnegative ridge weight. At exactly zero the normal matrix must
        be numerically nonsingular; otherwise ConditioningError is raised
        rather than silently regularizing.
    rank_tolerance : float
        Relative eigenvalue floor used for the lambda = 0 singularity test.

    Returns
    -------
    RegressorBank
    """
    if ridge_lambda < 0.0:
        raise ParameterError(f"ridge_lambda must be >= 0, got {ridge_lambda}")
    X = np.asarray(X, dtype=np.float64)
    Z = np.asarray(Z, dtype=np.float64)
    if X.ndim != 2 or Z.ndim != 2:
        raise DataError("X and Z must be 2-d")
    if X.shape[0] != Z.shape[0]:
        raise DataError(f"row mismatch: X has {X.shape[0]}, Z has {Z.shape[0]}")
    if X.shape[0] < 1:
        raise DataError("cannot fit on an empty sample")
    if not (np.all(np.isfinite(X)) and np.all(np.isfinite(Z))):
        raise DataError("features and targets must be finite")
    n, p = X.shape
    G = X.T @ X
    if ridge_lambda == 0.0:
        eigs = np.linalg.eigvalsh(G)
        if eigs[-1] <= 0.0 or eigs[0] <= rank_tolerance * eigs[-1]:
            raise ConditioningError(
                "normal matrix is singular at ridge_lambda = 0; use a positive lambda"
            )
    else:
        G = G + ridge_lambda * np.eye(p)
    try:
        factor = cho_factor(G)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - rounding edge
        raise ConditioningError(f"normal matrix factorization failed: {exc}") from exc
    weights = cho_solve(factor, X.T @ Z)
    return RegressorBank(p=p, m=Z.shape[1], weights=weights,
                         ridge_lambda=ridge_lambda, trained_on=n)


def _feature_matrix(dataset) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i, (x, _) in enumerate(dataset.examples):
        rows.extend([i] * x.nnz)
        cols.extend(x.indices.tolist())
        vals.extend(x.values.tolist())
    return sp.csr_matrix((vals, (rows, cols)), shape=(dataset.n, dataset.p))


def _label_matrix(dataset) -> sp.csr_matrix:
    rows, cols, vals = [], [], []
    for i, (_, y) in enumerate(dataset.examples):
        rows.extend([i] * y.nnz)
        cols.extend(y.indices.tolist())
        vals.extend(y.values.tolist())
    return sp.csr_matrix((vals, (rows, cols)), shape=(dataset.n, dataset.d))


def train_compressed(dataset, A: CompressionMatrix, ridge_lambda: float) -> RegressorBank:
    """Compress every label vector through A and ridge-fit the measurements.

    Row i of the target matrix is A applied to example i's observed label
    vector; features go in as-is.
    """
    if dataset.n < 1:
        raise DataError("cannot train on an empty dataset")
    if dataset.d != A.d:
        raise ParameterError(f"dataset label dim {dataset.d} != matrix d {A.d}")
    X = _feature_matrix(dataset).toarray()
    Z = _label_matrix(dataset) @ A.entries.T
    return fit_ridge(X, Z, ridge_lambda)


def predict_compressed(bank: RegressorBank, x: SparseVector) -> np.ndarray:
    """Predicted measurement vector for one example; O(m * nnz)."""
    if x.dim != bank.p:
        raise ParameterError(f"feature dim {x.dim} != bank p {bank.p}")
    if x.nnz == 0:
        return np.zeros(bank.m)
    return x.values @ bank.weights[x.indices]


def predict_matrix(bank: RegressorBank, X) -> np.ndarray:
    """Predictions for a whole (n, p) feature matrix (dense or sparse)."""
    if X.shape[1] != bank.p:
        raise ParameterError(f"feature dim {X.shape[1]} != bank p {bank.p}")
    return np.asarray(X @ bank.weights)


def compress_linear_predictor(bank: RegressorBank, A: CompressionMatrix) -> RegressorBank:
    """Push a full d-output bank through A: weights' = weights A^T.

    Training on compressed targets and compressing a bank trained on raw
    labels commute, because ridge is linear in its targets; this is the
    cheap direction when a full bank already exists.
    """
    if bank.m != A.d:
        raise ParameterError(f"bank output dim {bank.m} != matrix d {A.d}")
    return RegressorBank(
        p=bank.p,
        m=A.m,
        weights=bank.weights @ A.entries.T,
        ridge_lambda=bank.ridge_lambda,
        trained_on=bank.trained_on,
    )


@dataclass(frozen=True)
class CompressionAuditResult:
    """Exact error inflation of a compressed bank against its base bank."""

    compressed_error: float
    base_error: float
    ratio: float


def compression_error_ratio(residual_coeffs, A: CompressionMatrix) -> CompressionAuditResult:
    """Expected compressed-prediction error inflation for isotropic inputs.

    residual_coeffs is the (p, d) coefficient matrix C of the base
    predictor's error term: predicting with B = B* + C against targets
    B*^T x leaves error C^T x. For x ~ N(0, I_p) the expectations are
    Frobenius norms, computed here in closed form:

        base_error       = ||C||_F^2
        compressed_error = ||A C^T||_F^2   (error after mapping through A)

    ratio follows the shared zero conventions (0/0 -> 1).
    """
    C = np.asarray(residual_coeffs, dtype=np.float64)
    if C.ndim != 2 or C.shape[1] != A.d:
        raise ParameterError(f"residual_coeffs must be (p, {A.d}), got {C.shape}")
    base = float(np.sum(C * C))
    AC = A.entries @ C.T
    compressed = float(np.sum(AC * AC))
    from .recovery import residual_ratio

    return CompressionAuditResult(compressed, base, residual_ratio(compressed, base))


def save_bank(bank: RegressorBank, path) -> None:
    """Write the bank in the LSRB binary format."""
    header = _LSRB_HEADER.pack(
        _LSRB_MAGIC, _LSRB_VERSION, bank.p, bank.m, bank.ridge_lambda, bank.trained_on
    )
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(bank.weights.astype("<f8").tobytes(order="F"))


def load_bank(path) -> RegressorBank:
    """Read an LSRB file back into a RegressorBank."""
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    if len(raw) < _LSRB_HEADER.size:
        raise DataError(f"{path}: truncated LSRB header")
    magic, version, p, m, lam, trained_on = _LSRB_HEADER.unpack_from(raw)
    if magic != _LSRB_MAGIC:
        raise DataError(f"{path}: bad magic {magic!r}")
    if version != _LSRB_VERSION:
        raise DataError(f"{path}: unsupported LSRB version {version}")
    expected = _LSRB_HEADER.size + 8 * p * m
    if len(raw) != expected:
        raise DataError(f"{path}: expected {expected} bytes, found {len(raw)}")
    w = np.frombuffer(raw, dtype="<f8", offset=_LSRB_HEADER.size)
    weights = w.reshape((p, m), order="F").copy()
    return RegressorBank(p=p, m=m, weights=weights, ridge_lambda=lam, trained_on=trained_on)
