"""Multi-label datasets: file grammar, synthetic planting, summaries.

File grammar (UTF-8, LF): the first line is `#dims d=<int> p=<int>`; each
following line is `<labels> <index>:<value> ...` where `<labels>` is a
comma-separated list of label indices, possibly empty — an empty label
field makes the line begin with a space. Feature indices must be strictly
increasing within a line. Labels are 0-indexed both on disk and in memory.
"""

from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field

import numpy as np

from ._rng import STREAM_SYNTH, philox
from .errors import DataError, ParameterError
from .vectors import SparseVector

_HEADER_RE = re.compile(r"#dims d=(\d+) p=(\d+)")

# Default planted-problem shape used by the harness when none is given.
DEFAULT_SYNTHETIC = dict(d=1024, p=256, k_true=5, n=4000, noise_level=0.0, seed=1)


@dataclass(frozen=True)
class MultiLabelDataset:
    """Examples of (sparse features in R^p, binary sparse labels in R^d).

    ground_truth, when present, holds each example's conditional-mean
    label vector (real-valued, sparse); observed labels stay binary.
    """

    p: int
    d: int
    examples: tuple[tuple[SparseVector, SparseVector], ...]
    ground_truth: tuple[SparseVector, ...] | None = None

    def __post_init__(self):
        if self.p < 1 or self.d < 1:
            raise ParameterError("p and d must be >= 1")
        for i, (x, y) in enumerate(self.examples):
            if x.dim != self.p:
                raise DataError(f"example {i}: feature dim {x.dim} != p {self.p}")
            if y.dim != self.d:
                raise DataError(f"example {i}: label dim {y.dim} != d {self.d}")
            if y.nnz and not np.all(y.values == 1.0):
                raise DataError(f"example {i}: observed labels must be binary")
        if self.ground_truth is not None:
            if len(self.ground_truth) != len(self.examples):
                raise DataError("ground_truth length != number of examples")
            for i, t in enumerate(self.ground_truth):
                if t.dim != self.d:
                    raise DataError(f"ground truth {i}: dim {t.dim} != d {self.d}")

    @property
    def n(self) -> int:
        return len(self.examples)

    @property
    def has_ground_truth(self) -> bool:
        return self.ground_truth is not None

    def subset(self, start: int, stop: int) -> "MultiLabelDataset":
        """Contiguous slice, carrying ground truth along when present."""
        truth = self.ground_truth[start:stop] if self.has_ground_truth else None
        return MultiLabelDataset(self.p, self.d, self.examples[start:stop], truth)

    def content_hash(self) -> str:
        """sha256 over the examples; used to assert train/test isolation."""
        digest = hashlib.sha256()
        digest.update(f"{self.p}:{self.d}:{self.n}".encode())
        for x, y in self.examples:
            for v in (x, y):
                digest.update(v.indices.tobytes())
                digest.update(v.values.tobytes())
        return digest.hexdigest()


def parse_dataset(path) -> MultiLabelDataset:
    """Load a dataset file, validating against its `#dims` header.

    Error messages carry the 1-based line number and the byte offset of
    the offending line. Features with an explicit 0.0 value are dropped
    during normalization.
    """
    try:
        with open(path, "rb") as fh:
            raw = fh.read()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror or exc}") from exc
    try:
        text = raw.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise DataError(f"{path}: not valid UTF-8 ({exc})") from exc

    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()  # trailing newline

    def fail(lineno: int, offset: int, message: str):
        raise DataError(f"{path}:{lineno}: {message} (byte offset {offset})")

    if not lines:
        raise DataError(f"{path}: empty file, expected a #dims header")
    offset = 0
    header = _HEADER_RE.fullmatch(lines[0])
    if header is None:
        fail(1, 0, f"malformed header {lines[0]!r}, expected '#dims d=<int> p=<int>'")
    d, p = int(header.group(1)), int(header.group(2))
    if d < 1 or p < 1:
        fail(1, 0, f"header dims must be >= 1, got d={d} p={p}")
    offset += len(lines[0].encode()) + 1

    examples = []
    for lineno, line in enumerate(lines[1:], start=2):
        if line == "":
            fail(lineno, offset, "empty line")
        if line == " ":
            tokens = [""]  # empty label field, no features
        else:
            tokens = line.split(" ")
        label_tok, feat_toks = tokens[0], tokens[1:]

        if label_tok == "":
            label_idx = []
        else:
            label_idx = []
            for part in label_tok.split(","):
                try:
                    v = int(part)
                except ValueError:
                    fail(lineno, offset, f"bad label {part!r}")
                if not 0 <= v < d:
                    fail(lineno, offset, f"label {v} out of range [0, {d})")
                label_idx.append(v)
            if len(set(label_idx)) != len(label_idx):
                fail(lineno, offset, "duplicate label")
        label_idx.sort()

        feat_pairs = []
        prev = -1
        for tok in feat_toks:
            if tok == "":
                fail(lineno, offset, "empty feature token (stray space?)")
            idx_s, sep, val_s = tok.partition(":")
            if not sep:
                fail(lineno, offset, f"bad feature {tok!r}, expected index:value")
            try:
                i = int(idx_s)
                v = float(val_s)
            except ValueError:
                fail(lineno, offset, f"bad feature {tok!r}")
            if not 0 <= i < p:
                fail(lineno, offset, f"feature index {i} out of range [0, {p})")
            if i <= prev:
                fail(lineno, offset, f"feature indices must be strictly increasing at {i}")
            if not np.isfinite(v):
                fail(lineno, offset, f"nonfinite feature value {val_s!r}")
            prev = i
            if v != 0.0:
                feat_pairs.append((i, v))

        x = SparseVector.from_pairs(p, feat_pairs)
        y = SparseVector(d, np.array(label_idx, dtype=np.int64), np.ones(len(label_idx)))
        examples.append((x, y))
        offset += len(line.encode()) + 1

    return MultiLabelDataset(p=p, d=d, examples=tuple(examples))


def write_dataset(dataset: MultiLabelDataset, path) -> None:
    """Inverse of parse_dataset (ground truth is not serialized)."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"#dims d={dataset.d} p={dataset.p}\n")
        for x, y in dataset.examples:
            labels = ",".join(str(i) for i in y.indices)
            # repr of builtin float = shortest exact roundtrip form
            feats = " ".join(f"{i}:{float(v)!r}" for i, v in zip(x.indices, x.values))
            if feats:
                fh.write(f"{labels} {feats}\n")
            else:
                fh.write(f"{labels} \n" if not labels else f"{labels}\n")


def generate_synthetic(
    d: int, p: int, k_true: int, n: int, noise_level: float, seed: int
) -> MultiLabelDataset:
    """Plant a sparse-mean multi-label problem with known conditional means.

    One encoder W ~ N(0,1)^(p x d) is drawn per dataset. Each example
    draws a uniform k_true-subset S and means in [0.5, 1) on S; features
    are the linear encoding x = W[:, S] @ means plus noise_level-scaled
    Gaussian noise, and observed labels are Bernoulli draws from the
    means. At noise_level = 0 the Bernoulli draw is replaced by
    thresholding at 0.5, so the observed support equals S exactly.

    d must be a power of two so that subsampled-Hadamard runs apply to
    every dataset this produces.

    Returns
    -------
    MultiLabelDataset
        with ground_truth set to the planted mean vectors.
    """
    if not (d >= 1 and (d & (d - 1)) == 0):
        raise ParameterError(f"d must be a power of two, got {d}")
    if not 1 <= k_true <= d:
        raise ParameterError(f"need 1 <= k_true <= d, got k_true={k_true}")
    if p < 1 or n < 1:
        raise ParameterError("p and n must be >= 1")
    if not (np.isfinite(noise_level) and noise_level >= 0.0):
        raise ParameterError(f"noise_level must be finite and >= 0, got {noise_level}")
    if seed < 0:
        raise ParameterError("seed must be nonnegative")

    rng = philox(seed, STREAM_SYNTH)
    W = rng.standard_normal((p, d))
    examples = []
    truth = []
    ones = np.ones(k_true)
    for _ in range(n):
        supp = np.sort(rng.choice(d, size=k_true, replace=False)).astype(np.int64)
        means = rng.uniform(0.5, 1.0, size=k_true)
        x = W[:, supp] @ means
        if noise_level > 0.0:
            x = x + noise_level * rng.standard_normal(p)
            keep = rng.random(k_true) < means
            y = SparseVector(d, supp[keep], ones[: int(keep.sum())])
        else:
            y = SparseVector(d, supp, ones)  # means >= 0.5 all pass the threshold
        examples.append((SparseVector.from_dense(x), y))
        truth.append(SparseVector(d, supp, means))
    return MultiLabelDataset(p=p, d=d, examples=tuple(examples), ground_truth=tuple(truth))


def label_frequency(dataset: MultiLabelDataset) -> np.ndarray:
    """Observed count of each label across the dataset, shape (d,)."""
    counts = np.zeros(dataset.d, dtype=np.int64)
    for _, y in dataset.examples:
        counts[y.indices] += 1
    return counts
