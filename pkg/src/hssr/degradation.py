"""Observation model: Gaussian blur, decimation, their adjoint, noise and the
bicubic baseline.

The low-resolution observation is ``downsample(blur(x)) + noise``.  Blur is a
per-band 2-D correlation with a symmetric kernel under half-sample symmetric
boundary extension (``d c b a | a b c d | d c b a``), which keeps the
operator mean preserving and gives it an exact, cheap adjoint.
"""
from dataclasses import dataclass, field

import numpy as np

from .errors import ShapeError
from .tensor import as_cube

__all__ = [
    "BlurKernel",
    "DegradationConfig",
    "gaussian_kernel",
    "blur",
    "blur_adjoint",
    "downsample",
    "zero_upsample",
    "degrade",
    "degrade_noiseless",
    "adjoint_degrade",
    "bicubic_upsample",
    "keys_kernel",
]


@dataclass(frozen=True)
class BlurKernel:
    """Square, normalized blur kernel.

    `taps`, when given, is a 1-D filter with ``weights == outer(taps, taps)``;
    the operators then run as two 1-D passes.
    """

    size: int
    sigma: float
    weights: np.ndarray = field(repr=False, compare=False)
    taps: np.ndarray = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=np.float64)
        if w.shape != (self.size, self.size):
            raise ShapeError(f"kernel weights must be {self.size}x{self.size}, got {w.shape}")
        if np.any(w < 0) or abs(w.sum() - 1.0) > 1e-12:
            raise ValueError("kernel weights must be nonnegative and sum to 1")
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)
        if self.taps is not None:
            t = np.asarray(self.taps, dtype=np.float64)
            if t.shape != (self.size,) or not np.allclose(np.outer(t, t), w, rtol=0, atol=1e-15):
                raise ValueError("taps do not factor the kernel weights")
            t.setflags(write=False)
            object.__setattr__(self, "taps", t)


def gaussian_kernel(size=7, sigma=2.0):
    """Normalized ``size x size`` Gaussian on a centered grid."""
    if int(size) != size or size < 1 or size % 2 == 0:
        raise ValueError(f"kernel size must be a positive odd integer, got {size!r}")
    if not sigma > 0:
        raise ValueError(f"sigma must be positive, got {sigma!r}")
    size = int(size)
    half = size // 2
    u = np.arange(-half, half + 1, dtype=np.float64)
    g = np.exp(-(u * u) / (2.0 * sigma * sigma))
    g /= g.sum()
    return BlurKernel(size, float(sigma), np.outer(g, g), g)


@dataclass(frozen=True)
class DegradationConfig:
    kernel: BlurKernel = field(default_factory=gaussian_kernel)
    factor: int = 2
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if int(self.factor) != self.factor or self.factor < 1:
            raise ValueError(f"factor must be a positive integer, got {self.factor!r}")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")

    def lr_dims(self, hr_dims):
        h, w, b = hr_dims
        r = self.factor
        if h % r or w % r:
            raise ShapeError(f"HR dims {h}x{w} are not divisible by factor {r}")
        return h // r, w // r, b

    def hr_dims(self, lr_dims):
        h, w, b = lr_dims
        return h * self.factor, w * self.factor, b


def _reflect_index(n, pad):
    """Source index for each position of a half-sample symmetric padding."""
    t = np.arange(-pad, n + pad)
    period = 2 * n
    t = np.mod(t, period)
    return np.where(t < n, t, period - 1 - t)


def _take(a, idx, axis):
    return a[idx] if axis == 0 else a[:, idx]


def _window(a, start, n, step, axis):
    sl = slice(start, start + n, step)
    return a[sl] if axis == 0 else a[:, sl]


def _corr1d(x, taps, axis, step):
    n, p = x.shape[axis], taps.size // 2
    xp = _take(x, _reflect_index(n, p), axis)
    out = taps[0] * _window(xp, 0, n, step, axis)
    for u in range(1, taps.size):
        out = out + taps[u] * _window(xp, u, n, step, axis)
    return out


def _corr1d_adjoint(y, taps, axis, step, n):
    p = taps.size // 2
    shape = list(y.shape)
    shape[axis] = n + 2 * p
    acc = np.zeros(shape)
    for u in range(taps.size):
        _window(acc, u, n, step, axis)[...] += taps[u] * y
    shape[axis] = n
    out = np.zeros(shape)
    np.add.at(out, (slice(None),) * axis + (_reflect_index(n, p),), acc)
    return out


def _blur_strided(x, kernel, step):
    """Blur evaluated only at pixels ``(step*i, step*j)``."""
    x = np.asarray(x, dtype=np.float64)
    if kernel.size == 1:
        return kernel.weights[0, 0] * x[::step, ::step]
    if kernel.taps is not None:
        return _corr1d(_corr1d(x, kernel.taps, 0, step), kernel.taps, 1, step)
    h, wd = x.shape[:2]
    p = kernel.size // 2
    xp = x[_reflect_index(h, p)][:, _reflect_index(wd, p)]
    w = kernel.weights
    out = np.zeros(((h + step - 1) // step, (wd + step - 1) // step) + x.shape[2:])
    for u in range(kernel.size):
        for v in range(kernel.size):
            out += w[u, v] * xp[u:u + h:step, v:v + wd:step]
    return out


def _blur_strided_adjoint(y, kernel, step, hw):
    y = np.asarray(y, dtype=np.float64)
    h, wd = hw
    if kernel.size == 1:
        out = np.zeros((h, wd) + y.shape[2:])
        out[::step, ::step] = kernel.weights[0, 0] * y
        return out
    if kernel.taps is not None:
        rows = _corr1d_adjoint(y, kernel.taps, 1, step, wd)
        return _corr1d_adjoint(rows, kernel.taps, 0, step, h)
    p = kernel.size // 2
    w = kernel.weights
    acc = np.zeros((h + 2 * p, wd + 2 * p) + y.shape[2:])
    for u in range(kernel.size):
        for v in range(kernel.size):
            acc[u:u + h:step, v:v + wd:step] += w[u, v] * y
    rows = np.zeros((h,) + acc.shape[1:])
    np.add.at(rows, _reflect_index(h, p), acc)
    out = np.zeros((h, wd) + y.shape[2:])
    np.add.at(out, (slice(None), _reflect_index(wd, p)), rows)
    return out


def blur(x, kernel):
    """Per-band correlation with `kernel` under half-sample symmetric boundaries."""
    return _blur_strided(x, kernel, 1)


def blur_adjoint(y, kernel):
    y = np.asarray(y, dtype=np.float64)
    return _blur_strided_adjoint(y, kernel, 1, y.shape[:2])


def downsample(x, r):
    x = np.asarray(x)
    if r < 1:
        raise ValueError("factor must be >= 1")
    if x.shape[0] % r or x.shape[1] % r:
        raise ShapeError(f"dims {x.shape[0]}x{x.shape[1]} are not divisible by factor {r}")
    return np.ascontiguousarray(x[::r, ::r])


def zero_upsample(y, r):
    """Adjoint of :func:`downsample`: place `y` on the r-strided grid."""
    y = np.asarray(y, dtype=np.float64)
    out = np.zeros((y.shape[0] * r, y.shape[1] * r) + y.shape[2:])
    out[::r, ::r] = y
    return out


def degrade_noiseless(x, cfg):
    """``downsample(blur(x))`` without computing the discarded pixels."""
    x = np.asarray(x, dtype=np.float64)
    cfg.lr_dims(x.shape)
    return _blur_strided(x, cfg.kernel, cfg.factor)


def degrade(x, cfg):
    """Blur, decimate and add seeded i.i.d. Gaussian noise."""
    x = as_cube(x)
    out = degrade_noiseless(x, cfg)
    if cfg.noise_sigma > 0:
        rng = np.random.default_rng(cfg.seed)
        out = out + cfg.noise_sigma * rng.standard_normal(out.shape)
    return out


def adjoint_degrade(res, cfg, hr_dims):
    res = np.asarray(res, dtype=np.float64)
    expected = cfg.lr_dims(tuple(hr_dims))
    if res.shape != expected:
        raise ShapeError(f"residual shape {res.shape} does not match LR dims {expected}")
    return _blur_strided_adjoint(res, cfg.kernel, cfg.factor, hr_dims[:2])


def keys_kernel(t, a=-0.5):
    """Keys cubic convolution kernel."""
    t = np.abs(np.asarray(t, dtype=np.float64))
    t2, t3 = t * t, t * t * t
    near = (a + 2) * t3 - (a + 3) * t2 + 1
    far = a * t3 - 5 * a * t2 + 8 * a * t - 4 * a
    return np.where(t <= 1, near, np.where(t < 2, far, 0.0))


def _bicubic_matrix(n, r):
    # output sample m sits at source coordinate m / r; taps past the border are clamped
    coords = np.arange(n * r) / r
    base = np.floor(coords).astype(int)
    mat = np.zeros((n * r, n))
    for off in (-1, 0, 1, 2):
        idx = base + off
        wts = keys_kernel(coords - idx)
        np.add.at(mat, (np.arange(n * r), np.clip(idx, 0, n - 1)), wts)
    return mat


def bicubic_upsample(x, r):
    """Separable Keys bicubic interpolation of each band by integer factor `r`."""
    x = as_cube(x)
    if int(r) != r or r < 1:
        raise ValueError(f"factor must be a positive integer, got {r!r}")
    if r == 1:
        return x.copy()
    ry = _bicubic_matrix(x.shape[0], r)
    rx = _bicubic_matrix(x.shape[1], r)
    return np.ascontiguousarray(np.einsum("ai,ijk,bj->abk", ry, x, rx, optimize=True))
