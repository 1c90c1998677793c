"""Anisotropic 3-D total variation and its Charbonnier-smoothed surrogate.

Differences are taken along every mode between each voxel and its
predecessor; voxels on the first slice of a mode have no predecessor along
it and contribute nothing.
"""
from dataclasses import dataclass

import numpy as np

__all__ = ["TvConfig", "tv_value", "tv_smoothed_value", "tv_smoothed_grad", "n_difference_terms"]


@dataclass(frozen=True)
class TvConfig:
    epsilon: float = 1e-3

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be positive, got {self.epsilon!r}")


def n_difference_terms(dims):
    h, w, b = dims
    return (h - 1) * w * b + h * (w - 1) * b + h * w * (b - 1)


def tv_value(x):
    x = np.asarray(x, dtype=np.float64)
    return float(sum(np.abs(np.diff(x, axis=ax)).sum() for ax in range(3)))


def _charbonnier(t, eps):
    # sqrt(t^2 + eps^2) - eps, written to avoid cancellation for small t
    return t * t / (np.sqrt(t * t + eps * eps) + eps)


def tv_smoothed_value(x, cfg=TvConfig()):
    x = np.asarray(x, dtype=np.float64)
    eps = cfg.epsilon
    return float(sum(_charbonnier(np.diff(x, axis=ax), eps).sum() for ax in range(3)))


def tv_smoothed_grad(x, cfg=TvConfig()):
    x = np.asarray(x, dtype=np.float64)
    eps = cfg.epsilon
    g = np.zeros_like(x)
    for ax in range(3):
        t = np.diff(x, axis=ax)
        d = t / np.sqrt(t * t + eps * eps)
        n = x.shape[ax]
        hi = [slice(None)] * 3
        lo = [slice(None)] * 3
        hi[ax] = slice(1, n)
        lo[ax] = slice(0, n - 1)
        g[tuple(hi)] += d
        g[tuple(lo)] -= d
    return g
