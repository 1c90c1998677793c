"""Dense 3-order cubes and mode-n unfolding.

A cube is a C-ordered ``float64`` array of shape ``(H, W, B)``; the band index
varies fastest, so the flat offset of ``(i, j, k)`` is ``(i*W + j)*B + k``.

Unfoldings follow the convention where, for the two remaining modes
``p < q``, the column of element ``(i1, i2, i3)`` is ``i_p + i_q * I_p``.
"""
import numpy as np

from .errors import ModeError, ShapeError

__all__ = ["as_cube", "from_flat", "to_flat", "unfold", "fold", "frobenius_norm"]


def as_cube(x, copy=False):
    """Validate and convert `x` to a float64 cube.

    Raises
    ------
    ShapeError
        If `x` is not 3-dimensional or has an empty mode.
    ValueError
        If `x` contains NaN or Inf.
    """
    arr = np.array(x, dtype=np.float64, order="C", copy=copy or None)
    if arr.ndim != 3:
        raise ShapeError(f"cube must be 3-dimensional, got shape {arr.shape}")
    if min(arr.shape) < 1:
        raise ShapeError(f"cube dims must be positive, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("cube contains non-finite values")
    return arr


def from_flat(data, dims):
    """Build a cube from flat band-fastest `data` with `dims` = (H, W, B)."""
    data = np.asarray(data, dtype=np.float64).ravel()
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3 or data.size != dims[0] * dims[1] * dims[2]:
        raise ShapeError(f"{data.size} values do not fill dims {dims}")
    return as_cube(data.reshape(dims))


def to_flat(x):
    return np.ascontiguousarray(x, dtype=np.float64).ravel()


def _axis(mode):
    if mode not in (1, 2, 3):
        raise ModeError(f"mode must be 1, 2 or 3, got {mode!r}")
    return mode - 1


def unfold(x, mode):
    """Mode-`mode` unfolding (modes are 1-based) of a cube.

    Returns a matrix of shape ``(x.shape[mode-1], prod(other dims))``.
    """
    ax = _axis(mode)
    x = np.asarray(x)
    if x.ndim != 3:
        raise ShapeError(f"expected a 3-order cube, got shape {x.shape}")
    return np.reshape(np.moveaxis(x, ax, 0), (x.shape[ax], -1), order="F")


def fold(m, mode, dims):
    """Inverse of :func:`unfold`."""
    ax = _axis(mode)
    m = np.asarray(m)
    dims = tuple(int(d) for d in dims)
    if len(dims) != 3:
        raise ShapeError(f"dims must have length 3, got {dims}")
    if m.ndim != 2 or m.shape[0] != dims[ax] or m.size != dims[0] * dims[1] * dims[2]:
        raise ShapeError(f"matrix of shape {m.shape} cannot fold to {dims} along mode {mode}")
    rest = [d for i, d in enumerate(dims) if i != ax]
    full = np.reshape(m, [dims[ax]] + rest, order="F")
    return np.ascontiguousarray(np.moveaxis(full, 0, ax))


def frobenius_norm(x):
    x = np.asarray(x, dtype=np.float64)
    return float(np.sqrt(np.sum(x * x)))
