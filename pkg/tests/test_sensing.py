"""Compression matrices: generation, coherence, RIP checks, LSMX format."""

import hashlib

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from labelsense import (
    CompressionMatrix,
    DegenerateColumnError,
    ParameterError,
    coherence,
    compress,
    generate,
    load_matrix,
    rip_check,
    save_matrix,
)
from labelsense.sensing import identity
from labelsense.vectors import SparseVector

GOLDEN_LSMX_SHA = {
    "gaussian_8x32_seed3.lsmx": "60a414a2502c915d5ddf6f35838e2162242270e1c5ff75e9729cef94c40a842d",
    "hadamard_12x16_seed7.lsmx": "1ad914145220da09befcad3fb119f4139762a101b12cb5c93e128f8b4e60ca13",
}


def test_generation_is_deterministic():
    a = generate("gaussian", 8, 32, seed=3)
    b = generate("gaussian", 8, 32, seed=3)
    assert np.array_equal(a.entries, b.entries)
    c = generate("gaussian", 8, 32, seed=4)
    assert not np.array_equal(a.entries, c.entries)


def test_gaussian_entries_match_golden(golden_dir):
    a = generate("gaussian", 8, 32, seed=3)
    golden = np.load(golden_dir / "gaussian_8x32_seed3.npy")
    assert np.array_equal(a.entries, golden)


def test_bernoulli_columns_are_exactly_unit():
    a = generate("bernoulli", 16, 64, seed=0)
    scale = 1.0 / np.sqrt(16)
    assert np.all(np.abs(a.entries) == scale)
    # sum of 16 squared entries is exact in binary arithmetic
    norms = np.sum(a.entries**2, axis=0)
    assert np.all(norms == 1.0)


@pytest.mark.parametrize("m,d", [(4, 8), (4, 16), (12, 16), (64, 128)])
def test_hadamard_rows_orthogonal(m, d):
    a = generate("hadamard", m, d, seed=5)
    gram = a.entries @ a.entries.T
    target = (d / m) * np.eye(m)
    if m in (4, 64):
        # 1/sqrt(m) is a binary fraction: the row Gram is exact
        assert np.array_equal(gram, target)
    else:
        assert np.allclose(gram, target, rtol=0.0, atol=1e-12)


def test_hadamard_rejects_non_power_of_two():
    with pytest.raises(ParameterError):
        generate("hadamard", 4, 12, seed=0)


def test_hadamard_rejects_m_above_d():
    with pytest.raises(ParameterError):
        generate("hadamard", 32, 16, seed=0)


def test_generate_validates_kind_and_shape():
    with pytest.raises(ParameterError):
        generate("fourier", 4, 8, seed=0)
    with pytest.raises(ParameterError):
        generate("gaussian", 0, 8, seed=0)
    with pytest.raises(ParameterError):
        generate("gaussian", 9, 8, seed=0)  # m > d


def test_identity_matrix():
    a = identity(6)
    assert a.kind == "identity"
    assert np.array_equal(a.entries, np.eye(6))


@given(
    st.integers(min_value=1, max_value=20).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(
                st.tuples(
                    st.integers(min_value=0, max_value=d - 1),
                    st.floats(min_value=-100, max_value=100).filter(lambda v: v != 0),
                ),
                unique_by=lambda t: t[0],
                max_size=d,
            ),
        )
    )
)
@settings(max_examples=50)
def test_compress_agrees_with_dense_product(dim_and_pairs):
    d, pairs = dim_and_pairs
    # from_pairs requires index-sorted input
    y = SparseVector.from_pairs(d, sorted(pairs))
    a = generate("gaussian", max(1, d // 2), d, seed=11)
    assert np.allclose(compress(a, y), a.entries @ y.to_dense(), atol=1e-12)


def test_coherence_of_hadamard_12x16():
    # DERIVED: exact Gram of 12 sampled Sylvester rows; off-diagonal
    # magnitudes are multiples of 1/12 with max 4/12.
    a = generate("hadamard", 12, 16, seed=7)
    assert coherence(a) == pytest.approx(1.0 / 3.0, abs=1e-15)


def test_coherence_rejects_zero_column():
    entries = np.ones((3, 4))
    entries[:, 2] = 0.0
    a = CompressionMatrix(kind="gaussian", m=3, d=4, seed=0, entries=entries)
    with pytest.raises(DegenerateColumnError) as info:
        coherence(a)
    assert info.value.column == 2


def test_rip_check_sharp_at_derived_delta():
    # DERIVED: bernoulli 24x24 seed 11 has unit columns, so delta(2) equals
    # the worst off-diagonal Gram magnitude: 0.666666666666667 at pair (17, 22).
    a = generate("bernoulli", 24, 24, seed=11)
    assert coherence(a) == pytest.approx(0.666666666666667, abs=1e-15)
    ok = rip_check(a, s=2, delta=0.666666666666667 + 1e-9)
    assert ok.holds and ok.witness is None
    bad = rip_check(a, s=2, delta=0.666666666666667 - 1e-9)
    assert not bad.holds
    assert bad.witness == (17, 22)


def test_rip_check_identity_holds_everywhere():
    ok = rip_check(identity(8), s=3, delta=1e-12)
    assert ok.holds


def test_rip_check_enforces_budget():
    from labelsense.errors import ScaleError

    with pytest.raises(ScaleError):
        rip_check(generate("gaussian", 10, 40, seed=0), s=3, delta=0.5)
    with pytest.raises(ScaleError):
        rip_check(generate("gaussian", 10, 20, seed=0), s=6, delta=0.5)


def test_rip_check_validates_delta():
    a = generate("gaussian", 6, 12, seed=0)
    for delta in (0.0, 1.0, -0.2, 1.5):
        with pytest.raises(ParameterError):
            rip_check(a, s=2, delta=delta)


def test_lsmx_roundtrip(tmp_path):
    a = generate("bernoulli", 6, 20, seed=9)
    path = tmp_path / "a.lsmx"
    save_matrix(a, path)
    b = load_matrix(path)
    assert b.kind == a.kind and b.m == a.m and b.d == a.d and b.seed == a.seed
    assert np.array_equal(a.entries, b.entries)


def test_lsmx_golden_bytes(golden_dir):
    for name, want in GOLDEN_LSMX_SHA.items():
        got = hashlib.sha256((golden_dir / name).read_bytes()).hexdigest()
        assert got == want, name
    a = load_matrix(golden_dir / "hadamard_12x16_seed7.lsmx")
    assert (a.kind, a.m, a.d, a.seed) == ("hadamard", 12, 16, 7)


def test_lsmx_rejects_corruption(tmp_path):
    from labelsense.errors import DataError

    a = generate("gaussian", 4, 8, seed=1)
    path = tmp_path / "a.lsmx"
    save_matrix(a, path)
    raw = bytearray(path.read_bytes())

    bad_magic = tmp_path / "magic.lsmx"
    bad_magic.write_bytes(b"XXXX" + bytes(raw[4:]))
    with pytest.raises(DataError):
        load_matrix(bad_magic)

    truncated = tmp_path / "short.lsmx"
    truncated.write_bytes(bytes(raw[:-8]))
    with pytest.raises(DataError):
        load_matrix(truncated)

    with pytest.raises(DataError):
        load_matrix(tmp_path / "does_not_exist.lsmx")
