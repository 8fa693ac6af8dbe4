"""Functional dimension reduction: kernel FAVE with FSIR and sliced FSAVE baselines."""

from .basis import (
    Basis,
    TruncatedCovariance,
    bspline_basis,
    pca_basis,
    projector,
    truncate_and_invert,
)
from .edr import (
    EdrConfig,
    EdrEstimate,
    conditional_mean_covariance,
    extract_directions,
    fave,
    fsave,
    fsir,
    interest_operator,
    variance_quadratic,
)
from .estimators import FAVE, FSAVE, FSIR
from .exceptions import (
    ContractError,
    DatasetFormatError,
    EstimationError,
    FdrkitError,
    GridMismatchError,
    InsufficientDataError,
    ParameterError,
    RankError,
    SingularityError,
    SlicingError,
)
from .fda import (
    Curve,
    Dataset,
    Grid,
    LinearOp,
    center,
    empirical_covariance,
    hs_norm,
    inner_product,
    outer_product,
)
from .simulate import (
    BenchResult,
    ModelSpec,
    brownian_paths,
    model_spec,
    run_benchmark,
    simulate_dataset,
    span_projector,
    subspace_distance,
)
from .smoothing import (
    EPANECHNIKOV2,
    QUARTIC4,
    Kernel,
    KernelSmoother,
    cv_bandwidth,
    get_kernel,
)

__version__ = "0.1.0"

__all__ = [
    "Basis",
    "BenchResult",
    "ContractError",
    "Curve",
    "Dataset",
    "DatasetFormatError",
    "EPANECHNIKOV2",
    "EdrConfig",
    "EdrEstimate",
    "EstimationError",
    "FAVE",
    "FSAVE",
    "FSIR",
    "FdrkitError",
    "Grid",
    "GridMismatchError",
    "InsufficientDataError",
    "Kernel",
    "KernelSmoother",
    "LinearOp",
    "ModelSpec",
    "ParameterError",
    "QUARTIC4",
    "RankError",
    "SingularityError",
    "SlicingError",
    "TruncatedCovariance",
    "brownian_paths",
    "bspline_basis",
    "center",
    "conditional_mean_covariance",
    "cv_bandwidth",
    "empirical_covariance",
    "extract_directions",
    "fave",
    "fsave",
    "fsir",
    "get_kernel",
    "hs_norm",
    "inner_product",
    "interest_operator",
    "model_spec",
    "outer_product",
    "pca_basis",
    "projector",
    "run_benchmark",
    "simulate_dataset",
    "span_projector",
    "subspace_distance",
    "truncate_and_invert",
    "variance_quadratic",
]
