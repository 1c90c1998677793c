"""ADMM solver for TV + low-rank regularized hyperspectral super-resolution.

Solves::

    min_X  ||DS X - I||_F^2 + lam1 * TV(X) + lam2 * L(X)

where ``L`` is the mode-weighted tensor nuclear norm or tensor MCP.  Each
unfolding gets its own auxiliary copy ``M_i`` of ``X`` with dual ``Y_i``;
iterations alternate a gradient step on ``X`` (TV smoothed), a per-mode
(weighted) singular value thresholding for ``M_i`` and dual ascent on
``Y_i``.  For the MCP the thresholding weights come from a one-step local
linear approximation at the current ``X``.
"""
import enum
import logging
from dataclasses import dataclass, field

import numpy as np

from .degradation import (
    DegradationConfig,
    adjoint_degrade,
    bicubic_upsample,
    degrade_noiseless,
    zero_upsample,
)
from .errors import ShapeError
from .lowrank import (
    McpParams,
    ModeWeights,
    mcp_weights,
    svd,
    svt,
    tensor_mcp,
    tensor_nuclear,
    weighted_svt,
)
from .tensor import as_cube, fold, frobenius_norm, unfold
from .tv import TvConfig, tv_smoothed_grad, tv_smoothed_value, tv_value

log = logging.getLogger(__name__)

RHO_MAX = 1e6
ARMIJO_C = 1e-4
MAX_HALVINGS = 60

__all__ = [
    "Penalty",
    "Init",
    "SolverConfig",
    "SolverState",
    "IterationRecord",
    "objective",
    "inner_objective",
    "inner_gradient",
    "update_x",
    "update_m",
    "update_y",
    "initial_state",
    "solve",
    "SolveResult",
]


class Penalty(str, enum.Enum):
    NUCLEAR = "nuclear"
    MCP = "mcp"


class Init(str, enum.Enum):
    BICUBIC = "bicubic"
    ZERO_UPSAMPLE = "zero-upsample"


@dataclass(frozen=True)
class SolverConfig:
    lambda1: float = 1e-3
    lambda2: float = 1e-2
    rho: float = 1.0
    rho_growth: float = 1.05
    alpha: ModeWeights = field(default_factory=ModeWeights)
    penalty: Penalty = Penalty.NUCLEAR
    mcp: McpParams = field(default_factory=McpParams)
    tv: TvConfig = field(default_factory=TvConfig)
    max_outer: int = 100
    max_inner: int = 10
    tol: float = 1e-4
    degradation: DegradationConfig = field(default_factory=DegradationConfig)
    init: Init = Init.BICUBIC

    def __post_init__(self):
        object.__setattr__(self, "penalty", Penalty(self.penalty))
        object.__setattr__(self, "init", Init(self.init))
        # zero weights are allowed so individual terms can be switched off
        if self.lambda1 < 0 or self.lambda2 < 0:
            raise ValueError("lambda1 and lambda2 must be nonnegative")
        if not self.rho > 0:
            raise ValueError("rho must be positive")
        if self.rho_growth < 1:
            raise ValueError("rho_growth must be >= 1")
        if self.max_outer < 1 or self.max_inner < 1:
            raise ValueError("iteration caps must be positive")
        if not self.tol > 0:
            raise ValueError("tol must be positive")


@dataclass(frozen=True)
class IterationRecord:
    iter: int
    objective: float
    primal_residual: float
    rel_change: float
    rho: float

    def to_line(self):
        return (
            f"iter={self.iter} obj={self.objective:.17g} pres={self.primal_residual:.17g} "
            f"dx={self.rel_change:.17g} rho={self.rho:.17g}"
        )

    @classmethod
    def from_line(cls, line):
        kv = dict(tok.split("=", 1) for tok in line.split())
        return cls(int(kv["iter"]), float(kv["obj"]), float(kv["pres"]), float(kv["dx"]), float(kv["rho"]))


@dataclass
class SolverState:
    x: np.ndarray
    m: list
    y: list
    rho: float
    iter: int = 0
    trace: list = field(default_factory=list)
    # per update_x call: inner objective values, first entry is the starting point
    inner_history: list = field(default_factory=list)


@dataclass(frozen=True)
class SolveResult:
    x: np.ndarray
    trace: list
    converged: bool
    state: SolverState


def _low_rank_value(x, cfg):
    if cfg.penalty is Penalty.MCP:
        return tensor_mcp(x, cfg.alpha, cfg.mcp)
    return tensor_nuclear(x, cfg.alpha)


def objective(x, i_obs, cfg):
    """Exact (unsmoothed) model objective at `x`."""
    x = np.asarray(x, dtype=np.float64)
    i_obs = np.asarray(i_obs, dtype=np.float64)
    lr = cfg.degradation.lr_dims(x.shape)
    if i_obs.shape != lr:
        raise ShapeError(f"observation shape {i_obs.shape} does not match LR dims {lr}")
    r = degrade_noiseless(x, cfg.degradation) - i_obs
    val = float(np.sum(r * r))
    if cfg.lambda1:
        val += cfg.lambda1 * tv_value(x)
    if cfg.lambda2:
        val += cfg.lambda2 * _low_rank_value(x, cfg)
    return val


def inner_objective(x, state, i_obs, cfg):
    """Objective of the X-subproblem, with TV replaced by its smooth surrogate."""
    r = degrade_noiseless(x, cfg.degradation) - i_obs
    val = float(np.sum(r * r))
    if cfg.lambda1:
        val += cfg.lambda1 * tv_smoothed_value(x, cfg.tv)
    rho = state.rho
    for m, y in zip(state.m, state.y):
        d = m - x + y / rho
        val += 0.5 * rho * float(np.sum(d * d))
    return val


def inner_gradient(x, state, i_obs, cfg):
    r = degrade_noiseless(x, cfg.degradation) - i_obs
    g = 2.0 * adjoint_degrade(r, cfg.degradation, x.shape)
    if cfg.lambda1:
        g += cfg.lambda1 * tv_smoothed_grad(x, cfg.tv)
    rho = state.rho
    for m, y in zip(state.m, state.y):
        g -= rho * (m - x + y / rho)
    return g


def update_x(state, i_obs, cfg):
    """Armijo-backtracked gradient descent on the X-subproblem.

    Never increases the inner objective; the history of accepted values is
    appended to ``state.inner_history``.
    """
    x = state.x
    f = inner_objective(x, state, i_obs, cfg)
    history = [f]
    for _ in range(cfg.max_inner):
        g = inner_gradient(x, state, i_obs, cfg)
        gg = float(np.sum(g * g))
        if gg == 0.0:
            break
        step = 1.0
        for _ in range(MAX_HALVINGS):
            cand = x - step * g
            fc = inner_objective(cand, state, i_obs, cfg)
            if fc <= f - ARMIJO_C * step * gg:
                break
            step *= 0.5
        else:
            break
        x, f = cand, fc
        history.append(f)
    state.inner_history.append(history)
    return x


def update_m(state, cfg):
    """Per-mode proximal step on ``X_(i) - Y_(i)/rho``."""
    x, rho = state.x, state.rho
    dims = x.shape
    out = []
    for n in range(3):
        target = unfold(x - state.y[n] / rho, n + 1)
        tau = cfg.lambda2 * cfg.alpha[n] / rho
        if tau == 0.0:
            out.append(fold(target, n + 1, dims))
            continue
        if cfg.penalty is Penalty.MCP:
            w = mcp_weights(svd(unfold(x, n + 1)).s, cfg.mcp)
            mat = weighted_svt(target, tau, w)
        else:
            mat = svt(target, tau)
        out.append(fold(mat, n + 1, dims))
    return out


def update_y(state, cfg):
    """Dual ascent ``Y_i += rho (M_i - X)``; does not touch ``rho``."""
    return [y + state.rho * (m - state.x) for m, y in zip(state.m, state.y)]


def initial_state(i_obs, cfg):
    r = cfg.degradation.factor
    if cfg.init is Init.BICUBIC:
        x0 = bicubic_upsample(i_obs, r)
    else:
        x0 = zero_upsample(i_obs, r)
    return SolverState(
        x=x0,
        m=[x0.copy() for _ in range(3)],
        y=[np.zeros_like(x0) for _ in range(3)],
        rho=float(cfg.rho),
    )


def solve(i_obs, cfg=SolverConfig(), callback=None, hr_dims=None):
    """Super-resolve the observation `i_obs`.

    Parameters
    ----------
    i_obs : array_like, shape (h, w, B)
        Low-resolution cube.
    cfg : SolverConfig
    callback : callable, optional
        Called as ``callback(state, record)`` after each outer iteration.
    hr_dims : tuple of int, optional
        Expected reconstruction dims; checked against the observation and
        the degradation factor before any work is done.

    Returns
    -------
    SolveResult
        Final cube, iteration trace and whether the tolerance was met
        (``False`` means the iteration cap was hit).
    """
    i_obs = as_cube(i_obs)
    if hr_dims is not None:
        hr_dims = tuple(int(d) for d in hr_dims)
        if cfg.degradation.lr_dims(hr_dims) != i_obs.shape:
            raise ShapeError(
                f"observation dims {i_obs.shape} inconsistent with HR dims {hr_dims} "
                f"at factor {cfg.degradation.factor}"
            )
    state = initial_state(i_obs, cfg)
    converged = False
    for k in range(1, cfg.max_outer + 1):
        x_prev = state.x
        state.x = update_x(state, i_obs, cfg)
        state.m = update_m(state, cfg)
        pres = max(frobenius_norm(m - state.x) for m in state.m)
        state.y = update_y(state, cfg)
        dx = frobenius_norm(state.x - x_prev) / max(1.0, frobenius_norm(x_prev))
        rec = IterationRecord(k, objective(state.x, i_obs, cfg), pres, dx, state.rho)
        state.trace.append(rec)
        state.iter = k
        log.debug(rec.to_line())
        if callback is not None:
            callback(state, rec)
        state.rho = min(state.rho * cfg.rho_growth, RHO_MAX)
        if dx < cfg.tol:
            converged = True
            break
    return SolveResult(state.x, list(state.trace), converged, state)

