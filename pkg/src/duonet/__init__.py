"""Dual-branch neural networks for nonlinear system identification.

Each block combines a plain time-domain affine map with an affine map
applied in an orthogonal transform domain (FFT by default), trained by
windowed regression on input/output signal records.
"""

from .autograd import GradCheckReport, GradientSet, backward, finite_diff_check
from .config import (
    BlockSpec,
    DataSpec,
    OptimSpec,
    TrainConfig,
    WindowSpec,
    build_network,
    load_config,
    save_config,
)
from .data import (
    SignalRecord,
    WindowedDataset,
    build_windows,
    generate_static_system,
    load_checkpoint,
    load_csv,
    save_checkpoint,
    save_csv,
    split_record,
)
from .equivalence import (
    DenseEquivalent,
    dense_equivalent,
    gradient_structure_check,
    h_ab_derivative_factor,
    h_ab_matrix,
)
from .errors import (
    CheckpointError,
    ConfigError,
    DataFormatError,
    DegenerateTargetError,
    DuonetError,
    NonRealError,
    NumericError,
    ShapeError,
)
from .evaluation import EvalResult, nrmse, rmse, simulate
from .network import BlockShape, DualBlock, Network, network_forward
from .optim import OptimizerState, TrainReport, adam_step, make_optimizer, sgd_step, train
from .transforms import (
    OrthogonalTransform,
    Spectrum,
    dft_matrix,
    dft_transform,
    hadamard_matrix,
    hadamard_transform,
    identity_transform,
    irfft,
    make_transform,
    rfft,
    rfft_transform,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # transforms
    "Spectrum", "OrthogonalTransform", "rfft", "irfft", "dft_matrix",
    "hadamard_matrix", "make_transform", "rfft_transform", "dft_transform",
    "hadamard_transform", "identity_transform",
    # model
    "BlockShape", "DualBlock", "Network", "network_forward",
    # gradients and training
    "GradientSet", "GradCheckReport", "backward", "finite_diff_check",
    "OptimizerState", "TrainReport", "make_optimizer", "sgd_step", "adam_step", "train",
    # data
    "SignalRecord", "WindowedDataset", "build_windows", "split_record",
    "generate_static_system", "load_csv", "save_csv", "save_checkpoint", "load_checkpoint",
    # analysis
    "DenseEquivalent", "dense_equivalent", "h_ab_matrix", "h_ab_derivative_factor",
    "gradient_structure_check",
    "EvalResult", "rmse", "nrmse", "simulate",
    # config
    "TrainConfig", "BlockSpec", "WindowSpec", "OptimSpec", "DataSpec",
    "load_config", "save_config", "build_network",
    # errors
    "DuonetError", "ShapeError", "NonRealError", "ConfigError", "DataFormatError",
    "CheckpointError", "DegenerateTargetError", "NumericError",
]
