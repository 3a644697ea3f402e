"""Greedy pursuit decoders: OMP, CoSaMP, and the shared error metrics."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from labelsense import (
    ParameterError,
    ReconstructionConfig,
    cosamp,
    generate,
    omp,
    omp_prefix_estimates,
    regret_factors,
    residual_ratio,
    sparsity_error,
    validity_certificate,
)
from labelsense.recovery import OMP_RATIO_BOUND, ZERO_RESIDUAL_EPS
from labelsense.sensing import CompressionMatrix, compress
from labelsense.vectors import SparseVector


def plant(A, support, values):
    y = SparseVector.from_pairs(A.d, list(zip(support, values)))
    return y, compress(A, y)


# ---------------------------------------------------------------- exact recovery


@pytest.mark.parametrize(
    "algo_fn,algo_name", [(omp, "omp"), (cosamp, "cosamp")]
)
def test_exact_recovery_low_coherence(algo_fn, algo_name):
    # 64x256 gaussian: mu ~ 0.35 but k=3 planted signals separate cleanly
    A = generate("gaussian", 64, 256, seed=2)
    y, h = plant(A, [10, 77, 200], [1.0, -2.0, 0.5])
    res = algo_fn(A, h, ReconstructionConfig(k=3, algorithm=algo_name))
    assert set(y.indices) <= set(res.selected_support)
    assert np.allclose(res.estimate.to_dense(), y.to_dense(), atol=1e-8)
    assert res.final_residual_norm < 1e-8


def test_omp_zero_measurement_returns_zero():
    A = generate("gaussian", 8, 16, seed=0)
    res = omp(A, np.zeros(8), ReconstructionConfig(k=2))
    assert res.estimate.nnz == 0
    assert res.selected_support == ()
    assert res.iterations_used == 0


def test_omp_early_exit_on_exact_fit():
    A = generate("hadamard", 8, 16, seed=1)
    y, h = plant(A, [3], [2.0])
    res = omp(A, h, ReconstructionConfig(k=4))  # budget 8 steps, needs ~1
    assert res.iterations_used < 8
    assert res.final_residual_norm <= 1e-10


def test_omp_runs_two_k_iterations_by_default():
    cfg = ReconstructionConfig(k=5)
    assert cfg.resolved_max_iterations() == 10
    assert ReconstructionConfig(k=5, max_iterations=3).resolved_max_iterations() == 3


def test_omp_tie_breaks_to_smaller_column_index():
    # columns 1 and 3 identical: correlation ties must pick index 1
    entries = np.array(
        [
            [1.0, 0.5, 0.0, 0.5],
            [0.0, 0.5, 1.0, 0.5],
        ]
    )
    A = CompressionMatrix(kind="gaussian", m=2, d=4, seed=0, entries=entries)
    res = omp(A, np.array([1.0, 1.0]), ReconstructionConfig(k=1, max_iterations=1))
    assert res.selected_support == (1,)


def test_omp_prefix_property_matches_standalone_runs():
    A = generate("gaussian", 24, 64, seed=5)
    rng = np.random.default_rng(7)
    h = rng.standard_normal(24)
    ks = (1, 2, 3, 5)
    prefix = omp_prefix_estimates(A, h, ks, ReconstructionConfig(k=max(ks)))
    for k in ks:
        solo = omp(A, h, ReconstructionConfig(k=k))
        assert prefix[k].selected_support == solo.selected_support
        assert np.array_equal(
            prefix[k].estimate.to_dense(), solo.estimate.to_dense()
        )


def test_cosamp_never_worse_than_zero_estimate():
    A = generate("gaussian", 16, 48, seed=3)
    rng = np.random.default_rng(1)
    for _ in range(20):
        h = rng.standard_normal(16)
        res = cosamp(A, h, ReconstructionConfig(k=3, algorithm="cosamp"))
        assert res.final_residual_norm <= np.linalg.norm(h) + 1e-12
        assert res.estimate.nnz <= 2 * 3  # prune keeps at most 2k entries


def test_cosamp_support_bound_and_determinism():
    A = generate("bernoulli", 20, 60, seed=8)
    y, h = plant(A, [4, 30, 55], [1.0, 1.5, -0.5])
    cfg = ReconstructionConfig(k=3, algorithm="cosamp")
    r1 = cosamp(A, h, cfg)
    r2 = cosamp(A, h, cfg)
    assert r1.selected_support == r2.selected_support
    assert np.array_equal(r1.estimate.to_dense(), r2.estimate.to_dense())


# ---------------------------------------------------------------- metrics


def test_sparsity_error_zero_for_k_sparse():
    y = SparseVector.from_pairs(10, [(1, 3.0), (4, -2.0)])
    assert sparsity_error(2, y) == 0.0
    assert sparsity_error(5, y) == 0.0


def test_sparsity_error_hand_value():
    # top-2 keeps |3|,|2|; tail = (1, 0.5): 1.25 + (1.5^2)/2 = 2.375
    y = SparseVector.from_pairs(8, [(0, 3.0), (2, -2.0), (5, 1.0), (7, 0.5)])
    assert sparsity_error(2, y) == pytest.approx(2.375, abs=1e-15)


@given(
    st.integers(min_value=1, max_value=6),
    st.lists(
        st.floats(min_value=-50, max_value=50).filter(lambda v: abs(v) > 1e-6),
        min_size=1,
        max_size=12,
    ),
)
def test_sparsity_error_monotone_in_k(k, values):
    y = SparseVector.from_pairs(12, list(enumerate(values)))
    assert sparsity_error(k, y) >= sparsity_error(k + 1, y) - 1e-12


def test_sparsity_error_rejects_bad_k():
    with pytest.raises(ParameterError):
        sparsity_error(0, SparseVector.zero(4))


def test_residual_ratio_conventions():
    assert residual_ratio(0.0, 0.0) == 1.0
    assert residual_ratio(ZERO_RESIDUAL_EPS, ZERO_RESIDUAL_EPS / 2) == 1.0
    assert residual_ratio(4.0, 0.0) == float("inf")
    assert residual_ratio(6.0, 3.0) == 2.0


def test_validity_certificate_fields():
    A = generate("hadamard", 12, 16, seed=7)
    y, h = plant(A, [3, 11], [1.2, -0.7])
    heur = omp(A, h, ReconstructionConfig(k=2))
    cert = validity_certificate(A, h, 2, heur, heur)
    assert cert.ratio == 1.0  # identical decoders -> both-zero or equal
    assert cert.within_bound
    assert cert.bound == OMP_RATIO_BOUND
    assert cert.mu == pytest.approx(1.0 / 3.0)
    assert cert.mu_threshold == pytest.approx(0.05)
    assert not cert.precondition_met  # 1/3 > 0.1/2


def test_regret_factors_derived_values():
    # DERIVED: delta(6)=0.8047378541243653 for hadamard 12x16 seed 7
    c1, c2 = regret_factors(0.8047378541243653)
    assert c1 == pytest.approx(344.0673346693675, rel=1e-12)
    assert c2 == pytest.approx(3765.616560298641, rel=1e-12)
    # closed forms at delta=0
    c1_0, c2_0 = regret_factors(0.0)
    assert c1_0 == pytest.approx(2 * (1 + np.sqrt(23.0)) ** 2, rel=1e-14)
    assert c2_0 == pytest.approx(4 * (2 + np.sqrt(23.0)) ** 2, rel=1e-14)


@given(st.floats(min_value=0.0, max_value=0.999))
@settings(max_examples=60)
def test_regret_factors_monotone_in_delta(delta):
    c1a, c2a = regret_factors(delta)
    c1b, c2b = regret_factors(delta / 2)
    assert c1a >= c1b and c2a >= c2b


def test_regret_factors_domain():
    for delta in (1.0, 1.5, -0.1):
        with pytest.raises(ParameterError):
            regret_factors(delta)
    with pytest.raises(ParameterError):
        regret_factors(0.5, residual_bound=0.0)


def test_config_validation():
    with pytest.raises(ParameterError):
        ReconstructionConfig(k=0)
    with pytest.raises(ParameterError):
        ReconstructionConfig(k=2, algorithm="matching")
    with pytest.raises(ParameterError):
        ReconstructionConfig(k=2, max_iterations=0)
