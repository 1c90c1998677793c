"""HSCUBE01 binary cube files, PGM band export and synthetic ground truth.

HSCUBE01 layout (all little-endian)::

    offset  size  field
    0       8     magic  b"HSCUBE01"
    8       4     H      uint32
    12      4     W      uint32
    16      4     B      uint32
    20      1     dtype  0x01 = float64
    21      8*HWB payload, band index fastest
"""
import struct
from dataclasses import dataclass

import numpy as np

from .errors import FormatError
from .tensor import as_cube, unfold

__all__ = [
    "MAGIC",
    "HEADER_SIZE",
    "write_cube",
    "read_cube",
    "export_band",
    "SynthConfig",
    "synth_cube",
    "numerical_ranks",
    "standard_instance",
]

MAGIC = b"HSCUBE01"
DTYPE_F64 = 0x01
_HEADER = struct.Struct("<8sIIIB")
HEADER_SIZE = _HEADER.size  # 21
_MAX_DIM = 2**32 - 1


def write_cube(x, path):
    x = as_cube(x)
    h, w, b = x.shape
    if max(x.shape) > _MAX_DIM:
        raise FormatError(f"dims {x.shape} exceed the uint32 range")
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MAGIC, h, w, b, DTYPE_F64))
        fh.write(x.astype("<f8", copy=False).tobytes(order="C"))


def read_cube(path):
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < HEADER_SIZE:
        raise FormatError(f"file is {len(raw)} bytes, shorter than the {HEADER_SIZE}-byte header", len(raw))
    magic, h, w, b, dtype = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        bad = next(i for i in range(8) if magic[i] != MAGIC[i])
        raise FormatError(f"magic mismatch: expected {MAGIC!r}, got {magic!r}", bad)
    for off, d in ((8, h), (12, w), (16, b)):
        if d == 0:
            raise FormatError("zero dimension in header", off)
    if dtype != DTYPE_F64:
        raise FormatError(f"unsupported dtype code 0x{dtype:02x}", 20)
    count = h * w * b
    expected = HEADER_SIZE + 8 * count
    if len(raw) < expected:
        raise FormatError(
            f"truncated payload: dims {h}x{w}x{b} need {expected} bytes, file has {len(raw)}", len(raw)
        )
    if len(raw) > expected:
        raise FormatError(f"{len(raw) - expected} trailing bytes after payload", expected)
    data = np.frombuffer(raw, dtype="<f8", count=count, offset=HEADER_SIZE)
    if not np.all(np.isfinite(data)):
        first = int(np.flatnonzero(~np.isfinite(data))[0])
        raise FormatError("payload contains a non-finite value", HEADER_SIZE + 8 * first)
    return data.astype(np.float64).reshape(h, w, b)


def export_band(x, k, path):
    """Write band `k` as an 8-bit binary PGM, min -> 0 and max -> 255."""
    x = as_cube(x)
    if not 0 <= k < x.shape[2]:
        raise IndexError(f"band {k} out of range for {x.shape[2]} bands")
    band = x[:, :, k]
    lo, hi = float(band.min()), float(band.max())
    if hi == lo:
        img = np.full(band.shape, 128, dtype=np.uint8)
    else:
        img = np.rint((band - lo) / (hi - lo) * 255.0).astype(np.uint8)
    h, w = band.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{w} {h}\n255\n".encode("ascii"))
        fh.write(img.tobytes())
    return img


@dataclass(frozen=True)
class SynthConfig:
    dims: tuple = (32, 32, 8)
    rank: tuple = (4, 4, 2)
    smoothness: float = 2.0
    seed: int = 7
    normalize: bool = True

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        rank = tuple(int(r) for r in self.rank)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "rank", rank)
        if len(dims) != 3 or len(rank) != 3 or min(dims) < 1 or min(rank) < 1:
            raise ValueError("dims and rank must be 3 positive integers each")
        for n, (r, d) in enumerate(zip(rank, dims)):
            if r > d:
                raise ValueError(f"rank exceeds dimension: mode {n + 1} rank {r} > dim {d}")
        if self.smoothness < 0:
            raise ValueError("smoothness must be nonnegative")


def _smooth_rows(f, amount):
    """Apply `amount` rounds of [1/4, 1/2, 1/4] averaging down the rows of `f`.

    The fractional part of `amount` blends one extra round in linearly.
    """
    def one_round(a):
        if a.shape[0] < 2:
            return a
        p = np.concatenate([a[:1], a, a[-1:]])
        return 0.25 * p[:-2] + 0.5 * p[1:-1] + 0.25 * p[2:]

    whole = int(np.floor(amount))
    frac = amount - whole
    for _ in range(whole):
        f = one_round(f)
    if frac > 0:
        f = (1 - frac) * f + frac * one_round(f)
    return f


def synth_cube(cfg=SynthConfig()):
    """Random nonnegative Tucker cube with mode ranks at most `cfg.rank`.

    The core is uniform on [0, 1).  Each factor starts as standard normal
    draws, is smoothed down its rows and then folded to its absolute value,
    which keeps it nonnegative while leaving dark regions and distinct
    spectral shapes.  Normalization divides by the maximum, so the rank bound
    is untouched.
    """
    rng = np.random.default_rng(cfg.seed)
    core = rng.random(cfg.rank)
    factors = [
        np.abs(_smooth_rows(rng.standard_normal((d, r)), cfg.smoothness))
        for d, r in zip(cfg.dims, cfg.rank)
    ]
    x = np.einsum("abc,ia,jb,kc->ijk", core, *factors, optimize=True)
    if cfg.normalize:
        peak = x.max()
        if peak > 0:
            x = x / peak
    return np.ascontiguousarray(x)


def numerical_ranks(x, rtol=1e-10):
    """Number of singular values above ``rtol * sigma_max`` for each unfolding."""
    out = []
    for n in (1, 2, 3):
        s = np.linalg.svd(unfold(x, n), compute_uv=False)
        out.append(int(np.sum(s > rtol * s[0])) if s[0] > 0 else 0)
    return tuple(out)


def standard_instance():
    """The 32x32x8 benchmark cube (ranks 4/4/2, smoothness 2, seed 7)."""
    return synth_cube(SynthConfig())

