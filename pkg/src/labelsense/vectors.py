"""Sparse vectors over a fixed-dimension label (or feature) space."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError


@dataclass(frozen=True)
class SparseVector:
    """Immutable sparse vector: strictly increasing indices, nonzero values.

    Parameters
    ----------
    dim : int
        Ambient dimension.
    indices : np.ndarray
        int64 indices in [0, dim), strictly increasing.
    values : np.ndarray
        float64 values, none exactly zero, aligned with `indices`.
    """

    dim: int
    indices: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)

    def __post_init__(self):
        if self.dim < 1:
            raise ParameterError(f"dim must be >= 1, got {self.dim}")
        idx = np.asarray(self.indices, dtype=np.int64)
        val = np.asarray(self.values, dtype=np.float64)
        if idx.ndim != 1 or val.ndim != 1 or idx.shape != val.shape:
            raise ParameterError("indices and values must be 1-d and aligned")
        if idx.size:
            if idx[0] < 0 or idx[-1] >= self.dim:
                raise ParameterError("index out of range")
            if np.any(np.diff(idx) <= 0):
                raise ParameterError("indices must be strictly increasing")
            if np.any(val == 0.0):
                raise ParameterError("explicit zeros are not stored")
            if not np.all(np.isfinite(val)):
                raise ParameterError("values must be finite")
        idx.setflags(write=False)
        val.setflags(write=False)
        object.__setattr__(self, "indices", idx)
        object.__setattr__(self, "values", val)

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, dim: int) -> "SparseVector":
        return cls(dim, np.empty(0, dtype=np.int64), np.empty(0))

    @classmethod
    def from_dense(cls, dense: np.ndarray) -> "SparseVector":
        """Build from a dense 1-d array, dropping exact zeros."""
        dense = np.asarray(dense, dtype=np.float64)
        if dense.ndim != 1:
            raise ParameterError("expected a 1-d array")
        idx = np.flatnonzero(dense)
        return cls(dense.shape[0], idx.astype(np.int64), dense[idx])

    @classmethod
    def from_pairs(cls, dim: int, pairs) -> "SparseVector":
        """Build from (index, value) pairs; must already be index-sorted."""
        if not pairs:
            return cls.zero(dim)
        idx = np.array([p[0] for p in pairs], dtype=np.int64)
        val = np.array([p[1] for p in pairs], dtype=np.float64)
        return cls(dim, idx, val)

    # -- basic ops ----------------------------------------------------

    @property
    def nnz(self) -> int:
        return int(self.indices.size)

    def to_dense(self) -> np.ndarray:
        out = np.zeros(self.dim)
        out[self.indices] = self.values
        return out

    def norm_sq(self) -> float:
        return float(self.values @ self.values)

    def ranked_indices(self) -> np.ndarray:
        """Stored indices ordered by decreasing |value|, ties to the smaller index."""
        # stable sort on -|v| keeps the (already increasing) index order on ties
        order = np.argsort(-np.abs(self.values), kind="stable")
        return self.indices[order]

    def top_k(self, k: int) -> "SparseVector":
        """The k largest-magnitude entries (ties resolved to the smaller index)."""
        top, _ = self.split_top_k(k)
        return top

    def split_top_k(self, k: int) -> tuple["SparseVector", "SparseVector"]:
        """Split into (k largest-magnitude entries, the rest)."""
        if k < 0:
            raise ParameterError(f"k must be >= 0, got {k}")
        if k >= self.nnz:
            return self, SparseVector.zero(self.dim)
        order = np.argsort(-np.abs(self.values), kind="stable")
        keep = np.sort(order[:k])
        rest = np.sort(order[k:])
        return (
            SparseVector(self.dim, self.indices[keep], self.values[keep]),
            SparseVector(self.dim, self.indices[rest], self.values[rest]),
        )

    def __eq__(self, other) -> bool:
        if not isinstance(other, SparseVector):
            return NotImplemented
        return (
            self.dim == other.dim
            and np.array_equal(self.indices, other.indices)
            and np.array_equal(self.values, other.values)
        )

    def __hash__(self):
        return hash((self.dim, self.indices.tobytes(), self.values.tobytes()))
