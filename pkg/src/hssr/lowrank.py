"""Spectral penalties on cube unfoldings and their proximal maps.

Covers the weighted tensor nuclear norm, the minimax concave penalty (MCP)
applied to singular values, the local-linear-approximation weights of the
MCP, and (weighted) singular value thresholding.
"""
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .tensor import unfold

__all__ = [
    "SvdFactors",
    "McpParams",
    "ModeWeights",
    "svd",
    "svt",
    "weighted_svt",
    "mcp_value",
    "mcp_matrix_value",
    "mcp_weights",
    "nuclear_norm",
    "tensor_nuclear",
    "tensor_mcp",
]


class SvdFactors(NamedTuple):
    u: np.ndarray
    s: np.ndarray
    v: np.ndarray

    def reconstruct(self, s=None):
        s = self.s if s is None else s
        return (self.u * s) @ self.v.T


@dataclass(frozen=True)
class McpParams:
    lam: float = 1.0
    a: float = 2.0

    def __post_init__(self):
        if not self.lam > 0:
            raise ValueError(f"MCP lambda must be positive, got {self.lam!r}")
        if not self.a > 1:
            raise ValueError(f"MCP concavity a must exceed 1, got {self.a!r}")


@dataclass(frozen=True)
class ModeWeights:
    alpha: tuple = (1 / 3, 1 / 3, 1 / 3)

    def __post_init__(self):
        alpha = tuple(float(v) for v in self.alpha)
        if len(alpha) != 3 or min(alpha) < 0 or abs(sum(alpha) - 1.0) > 1e-12:
            raise ValueError(f"mode weights must be 3 nonnegative values summing to 1, got {alpha}")
        object.__setattr__(self, "alpha", alpha)

    def __iter__(self):
        return iter(self.alpha)

    def __getitem__(self, i):
        return self.alpha[i]


def svd(a):
    """Thin SVD with a deterministic sign convention.

    Each column of ``u`` is flipped so its first nonzero entry is positive,
    with the matching column of ``v`` flipped alongside.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite values")
    u, s, vt = np.linalg.svd(a, full_matrices=False)
    first = np.argmax(np.abs(u) > 1e-14 * max(1.0, np.abs(u).max(initial=0.0)), axis=0)
    signs = np.sign(u[first, np.arange(u.shape[1])])
    signs[signs == 0] = 1.0
    return SvdFactors(u * signs, s, vt.T * signs)


def svt(a, tau):
    """Singular value soft-thresholding, the prox of ``tau * ||.||_*``."""
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    f = svd(a)
    return f.reconstruct(np.maximum(f.s - tau, 0.0))


def weighted_svt(a, tau, w):
    """Shrink the j-th singular value by ``tau * w[j]``.

    The closed form is the exact minimizer of
    ``tau * sum_j w_j sigma_j(M) + 0.5 ||M - a||_F^2`` when `w` is
    nondecreasing (smallest weights on the largest singular values).
    """
    w = np.asarray(w, dtype=np.float64)
    if np.any(w < 0):
        raise ValueError("weights must be nonnegative")
    if tau < 0:
        raise ValueError("tau must be nonnegative")
    f = svd(a)
    if w.size < f.s.size:
        raise ValueError(f"need at least {f.s.size} weights, got {w.size}")
    return f.reconstruct(np.maximum(f.s - tau * w[: f.s.size], 0.0))


def mcp_value(t, p):
    """Minimax concave penalty, elementwise."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    lam, a = p.lam, p.a
    val = np.where(t < a * lam, lam * t - t * t / (2 * a), a * lam * lam / 2)
    return float(val) if val.ndim == 0 else val


def mcp_weights(s, p):
    """LLA weights ``(lam - s/a)_+`` = MCP derivative at each singular value."""
    s = np.asarray(s, dtype=np.float64)
    return np.maximum(p.lam - s / p.a, 0.0)


def nuclear_norm(a):
    return float(np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False).sum())


def mcp_matrix_value(a, p):
    s = np.linalg.svd(np.asarray(a, dtype=np.float64), compute_uv=False)
    return float(np.sum(mcp_value(s, p)))


def tensor_nuclear(x, w=ModeWeights()):
    return float(sum(w[n] * nuclear_norm(unfold(x, n + 1)) for n in range(3)))


def tensor_mcp(x, w=ModeWeights(), p=McpParams()):
    return float(sum(w[n] * mcp_matrix_value(unfold(x, n + 1), p) for n in range(3)))
