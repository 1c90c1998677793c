"""Single-cube hyperspectral super-resolution with 3-D total variation and
low-rank tensor regularization (nuclear norm or MCP), solved by ADMM."""
from .admm import Init, IterationRecord, Penalty, SolverConfig, objective, solve
from .cube_io import SynthConfig, export_band, read_cube, synth_cube, write_cube
from .degradation import (
    BlurKernel,
    DegradationConfig,
    adjoint_degrade,
    bicubic_upsample,
    blur,
    degrade,
    downsample,
    gaussian_kernel,
)
from .errors import DegenerateBandError, FormatError, ModeError, ShapeError
from .lowrank import McpParams, ModeWeights, svd, svt, tensor_mcp, tensor_nuclear, weighted_svt
from .metrics import MetricsReport, ergas, evaluate, psnr, sam
from .tensor import as_cube, fold, frobenius_norm, unfold
from .tv import TvConfig, tv_smoothed_grad, tv_smoothed_value, tv_value

__version__ = "0.1.0"
