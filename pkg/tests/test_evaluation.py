"""Metrics, the correlation-decode baseline, and the regret audit."""

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from labelsense import (
    DataError,
    ExperimentRecord,
    ParameterError,
    ReconstructionConfig,
    compress,
    correlation_decode,
    generate,
    generate_synthetic,
    omp,
    precision_at_k,
    reconstruct,
    regret_factors,
    regret_transform_audit,
    sparsity_profile,
    squared_error,
    train_compressed,
)
from labelsense._rng import philox
from labelsense.evaluation import sparsity_profile_curve
from labelsense.oracles import OracleBudget, measure_rip_delta
from labelsense.vectors import SparseVector


def test_squared_error_hand_case():
    yhat = SparseVector.from_pairs(5, [(0, 1.0), (2, 2.0)])
    y = SparseVector.from_pairs(5, [(2, 1.0), (3, 1.0)])
    # diffs: 1 at 0, 1 at 2, -1 at 3
    assert squared_error(yhat, y) == 3.0
    assert squared_error(y, yhat) == 3.0
    assert squared_error(yhat, yhat) == 0.0


def test_squared_error_zero_operands():
    y = SparseVector.from_pairs(4, [(1, 2.0)])
    z = SparseVector.zero(4)
    assert squared_error(z, y) == 4.0
    assert squared_error(y, z) == 4.0
    assert squared_error(z, z) == 0.0
    with pytest.raises(DataError):
        squared_error(z, SparseVector.zero(5))


@given(
    st.integers(min_value=1, max_value=15).flatmap(
        lambda d: st.tuples(
            st.just(d),
            st.lists(st.floats(-10, 10), min_size=d, max_size=d),
            st.lists(st.floats(-10, 10), min_size=d, max_size=d),
        )
    )
)
@settings(max_examples=60)
def test_squared_error_matches_dense(t):
    d, a, b = t
    va = SparseVector.from_dense(np.array(a))
    vb = SparseVector.from_dense(np.array(b))
    dense = float(np.sum((np.array(a) - np.array(b)) ** 2))
    assert squared_error(va, vb) == pytest.approx(dense, rel=1e-12, abs=1e-12)


def test_precision_at_k_hand_cases():
    yhat = SparseVector.from_pairs(10, [(0, 0.9), (3, -0.8), (7, 0.1)])
    truth = SparseVector.from_pairs(10, [(3, 1.0), (8, 1.0)])
    assert precision_at_k(yhat, truth, 1) == 0.0  # top pick is 0, a miss
    assert precision_at_k(yhat, truth, 2) == 0.5
    assert precision_at_k(yhat, truth, 3) == pytest.approx(1 / 3)
    # fewer predictions than k: denominator stays k
    assert precision_at_k(yhat, truth, 5) == pytest.approx(1 / 5)
    assert precision_at_k(SparseVector.zero(10), truth, 3) == 0.0


def test_precision_tie_prefers_smaller_index():
    yhat = SparseVector.from_pairs(6, [(1, 0.5), (4, 0.5)])
    truth = SparseVector.from_pairs(6, [(4, 1.0)])
    assert precision_at_k(yhat, truth, 1) == 0.0  # tie at |0.5| picks index 1


def test_correlation_decode_exact_on_orthogonal_rows():
    A = generate("hadamard", 8, 8, seed=0)  # square: columns orthogonal too
    y = SparseVector.from_pairs(8, [(2, 1.5), (5, -0.5)])
    res = correlation_decode(A, compress(A, y), k=2)
    assert np.allclose(res.estimate.to_dense(), y.to_dense(), atol=1e-12)
    assert res.final_residual_norm < 1e-12
    assert res.iterations_used == 1


def test_correlation_decode_zero_measurement():
    A = generate("gaussian", 6, 12, seed=1)
    res = correlation_decode(A, np.zeros(6), k=3)
    assert res.estimate.nnz == 0
    assert res.selected_support == ()
    assert res.final_residual_norm == 0.0


def test_correlation_decode_validates():
    A = generate("gaussian", 6, 12, seed=1)
    with pytest.raises(ParameterError):
        correlation_decode(A, np.zeros(6), k=0)
    with pytest.raises(ParameterError):
        correlation_decode(A, np.zeros(6), k=13)
    with pytest.raises(ParameterError):
        correlation_decode(A, np.zeros(5), k=2)


def test_reconstruct_dispatch():
    A = generate("gaussian", 10, 30, seed=4)
    h = philox(3, 7).standard_normal(10)
    cd = reconstruct(A, h, "cd", 2)
    direct = correlation_decode(A, h, 2)
    assert cd.selected_support == direct.selected_support
    via_omp = reconstruct(A, h, "omp", 2)
    same = omp(A, h, ReconstructionConfig(k=2))
    assert via_omp.selected_support == same.selected_support
    with pytest.raises(ParameterError):
        reconstruct(A, h, "lasso", 2)


def test_omp_beats_correlation_decode_on_planted_problems():
    # DERIVED (frozen oracle run): over 200 seeded k=3 problems on 24x96
    # gaussian matrices, OMP's residual is strictly smaller 178 times and
    # exactly equal 22 times; CD never wins. The gap is the point of the
    # residual-update step, so a regression here is a decoder bug.
    wins = ties = 0
    for seed in range(200):
        A = generate("gaussian", 24, 96, seed=1000 + seed)
        rng = philox(seed, 5)
        supp = np.sort(rng.choice(96, size=3, replace=False)).astype(np.int64)
        vals = rng.uniform(0.5, 1.5, size=3) * rng.choice([-1.0, 1.0], size=3)
        y = SparseVector(96, supp, vals)
        h = compress(A, y)
        r_omp = omp(A, h, ReconstructionConfig(k=3))
        r_cd = correlation_decode(A, h, k=3)
        if r_omp.final_residual_norm < r_cd.final_residual_norm - 1e-12:
            wins += 1
        elif abs(r_omp.final_residual_norm - r_cd.final_residual_norm) <= 1e-12:
            ties += 1
    assert wins == 178
    assert ties == 22
    assert wins + ties == 200  # CD never strictly better


def test_sparsity_profile_hand_case():
    # clipped values (1, 0.5, 0.25); k=1 tail energy = 0.3125 of 1.3125
    p_hat = SparseVector.from_pairs(6, [(0, 1.0), (2, 0.5), (4, 0.25)])
    assert sparsity_profile(p_hat, 1) == pytest.approx(0.3125 / 1.3125)
    assert sparsity_profile(p_hat, 3) == 0.0
    assert sparsity_profile(p_hat, 10) == 0.0


def test_sparsity_profile_clips_before_ranking():
    # 5.0 clips to 1.0; -2.0 clips to 0 and cannot dominate the ranking
    p_hat = SparseVector.from_pairs(4, [(0, 5.0), (1, -2.0), (2, 0.5)])
    assert sparsity_profile(p_hat, 1) == pytest.approx(0.25 / 1.25)


def test_sparsity_profile_zero_mass():
    with pytest.raises(DataError):
        sparsity_profile(SparseVector.from_pairs(4, [(1, -3.0)]), 1)
    with pytest.raises(ParameterError):
        sparsity_profile(SparseVector.zero(4), 0)


def test_sparsity_profile_curve_averages():
    preds = [
        SparseVector.from_pairs(4, [(0, 1.0)]),
        SparseVector.from_pairs(4, [(1, 1.0), (2, 1.0)]),
    ]
    curve = sparsity_profile_curve(preds, ks=(1, 2))
    assert curve[0] == pytest.approx((0.0 + 0.5) / 2)
    assert curve[1] == 0.0
    with pytest.raises(DataError):
        sparsity_profile_curve([], ks=(1,))


def test_experiment_record_validation():
    ExperimentRecord("omp", "gaussian", 8, 2, 0.5, 0.75, 100, 0)
    with pytest.raises(ParameterError):
        ExperimentRecord("omp", "gaussian", 8, 2, 0.5, 1.5, 100, 0)
    with pytest.raises(ParameterError):
        ExperimentRecord("omp", "gaussian", 8, 2, -0.5, 0.5, 100, 0)
    with pytest.raises(ParameterError):
        ExperimentRecord("omp", "gaussian", 8, 2, 0.5, 0.5, 0, 0)


def test_regret_transform_audit_holds_on_trained_model():
    ds = generate_synthetic(d=16, p=16, k_true=2, n=400, noise_level=0.0, seed=8)
    A = generate("hadamard", 12, 16, seed=7)
    bank = train_compressed(ds, A, ridge_lambda=0.01)
    # DERIVED: delta(6) = 0.8047378541243653 for this matrix (exact
    # enumeration over all C(16,6) supports); 6 = 3k at k = 2
    delta = measure_rip_delta(A, s=6, budget=OracleBudget(max_dim=16, max_sparsity=6))
    assert delta == pytest.approx(0.8047378541243653, abs=1e-14)
    c1, c2 = regret_factors(delta)
    report = regret_transform_audit(bank, A, ds, k=2, c1=c1, c2=c2)
    assert report.holds
    assert report.lhs_mean <= report.rhs_mean
    assert report.sparsity_error_mean == 0.0  # planted means are 2-sparse
    assert report.n == 400


def test_regret_transform_audit_requires_ground_truth(data_dir):
    from labelsense import parse_dataset

    ds = parse_dataset(data_dir / "esp_sample.txt")
    A = generate("gaussian", 6, 12, seed=0)
    bank = train_compressed(ds, A, ridge_lambda=0.1)
    with pytest.raises(DataError, match="ground-truth"):
        regret_transform_audit(bank, A, ds, k=2, c1=1.0, c2=1.0)
