"""Sparse multi-label prediction via compressed label sensing.

Labels live in R^d with few nonzeros per example. Instead of learning d
regressors, the label vector is projected through an m x d compression
matrix (m << d), m regressors are trained on the measurements, and
predictions are decoded back to a sparse label vector by greedy pursuit.
"""

from .datasets import MultiLabelDataset, generate_synthetic, parse_dataset, write_dataset
from .errors import (
    AuditError,
    ConditioningError,
    DataError,
    DegenerateColumnError,
    LabelSenseError,
    ParameterError,
    ScaleError,
)
from .evaluation import (
    ExperimentRecord,
    correlation_decode,
    precision_at_k,
    reconstruct,
    regret_transform_audit,
    sparsity_profile,
    squared_error,
)
from .experiment import RunConfig, SyntheticSpec, run_experiment
from .learner import (
    RegressorBank,
    compress_linear_predictor,
    compression_error_ratio,
    fit_ridge,
    load_bank,
    predict_compressed,
    predict_matrix,
    save_bank,
    train_compressed,
)
from .oracles import (
    OracleBudget,
    best_k_sparse_ls,
    measure_rip_delta,
    omp_ratio_sweep,
    sample_rip_delta,
    sparse_gain_floor,
)
from .recovery import (
    OMP_RATIO_BOUND,
    ReconstructionConfig,
    ReconstructionResult,
    cosamp,
    omp,
    omp_prefix_estimates,
    regret_factors,
    residual_ratio,
    sparsity_error,
    validity_certificate,
)
from .sensing import (
    CompressionMatrix,
    coherence,
    compress,
    generate,
    identity,
    load_matrix,
    rip_check,
    save_matrix,
)
from .vectors import SparseVector

__version__ = "0.1.0"

__all__ = [
    "AuditError",
    "CompressionMatrix",
    "ConditioningError",
    "DataError",
    "DegenerateColumnError",
    "ExperimentRecord",
    "LabelSenseError",
    "MultiLabelDataset",
    "OMP_RATIO_BOUND",
    "OracleBudget",
    "ParameterError",
    "ReconstructionConfig",
    "ReconstructionResult",
    "RegressorBank",
    "RunConfig",
    "ScaleError",
    "SparseVector",
    "SyntheticSpec",
    "best_k_sparse_ls",
    "coherence",
    "compress",
    "compress_linear_predictor",
    "compression_error_ratio",
    "correlation_decode",
    "cosamp",
    "fit_ridge",
    "generate",
    "generate_synthetic",
    "identity",
    "load_bank",
    "load_matrix",
    "measure_rip_delta",
    "omp",
    "omp_prefix_estimates",
    "omp_ratio_sweep",
    "parse_dataset",
    "precision_at_k",
    "predict_compressed",
    "predict_matrix",
    "reconstruct",
    "regret_factors",
    "regret_transform_audit",
    "residual_ratio",
    "rip_check",
    "run_experiment",
    "sample_rip_delta",
    "save_bank",
    "save_matrix",
    "sparse_gain_floor",
    "sparsity_error",
    "sparsity_profile",
    "squared_error",
    "train_compressed",
    "validity_certificate",
    "write_dataset",
]
