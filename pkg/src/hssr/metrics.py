"""Reconstruction quality measures: MSE, PSNR, SAM and ERGAS."""
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DegenerateBandError, ShapeError

__all__ = ["MetricsReport", "mse", "psnr", "sam", "ergas", "evaluate", "PSNR_CAP"]

PSNR_CAP = 100.0


def _pair(ref, est):
    ref = np.asarray(ref, dtype=np.float64)
    est = np.asarray(est, dtype=np.float64)
    if ref.shape != est.shape:
        raise ShapeError(f"reference {ref.shape} and estimate {est.shape} differ in shape")
    if ref.ndim != 3:
        raise ShapeError(f"expected cubes, got shape {ref.shape}")
    return ref, est


def mse(ref, est):
    ref, est = _pair(ref, est)
    d = ref - est
    return float(np.mean(d * d))


def psnr(ref, est):
    """PSNR in dB with the peak taken as the maximum of `ref`.

    Exact matches return ``PSNR_CAP``.
    """
    err = mse(ref, est)
    if err == 0.0:
        return PSNR_CAP
    peak = float(np.max(ref))
    return float(10.0 * np.log10(peak * peak / err))


def _sam(ref, est):
    ref, est = _pair(ref, est)
    r = ref.reshape(-1, ref.shape[2])
    e = est.reshape(-1, est.shape[2])
    nr = np.linalg.norm(r, axis=1)
    ne = np.linalg.norm(e, axis=1)
    ok = (nr > 0) & (ne > 0)
    skipped = int(ok.size - ok.sum())
    if not ok.any():
        return 0.0, skipped
    # half-angle form: arccos of the cosine loses ~8 digits near zero angle
    u = r[ok] / nr[ok, None]
    v = e[ok] / ne[ok, None]
    ang = 2.0 * np.arctan2(np.linalg.norm(u - v, axis=1), np.linalg.norm(u + v, axis=1))
    return float(np.mean(ang)), skipped


def sam(ref, est):
    """Mean spectral angle in radians over pixels with nonzero spectra."""
    return _sam(ref, est)[0]


def ergas(ref, est, r):
    """ERGAS = 100/r * sqrt(mean_b (RMSE_b / mean_b)^2)."""
    ref, est = _pair(ref, est)
    if r <= 0:
        raise ValueError("resolution ratio must be positive")
    mu = ref.mean(axis=(0, 1))
    if np.any(mu == 0):
        bad = np.flatnonzero(mu == 0).tolist()
        raise DegenerateBandError(f"reference bands {bad} have zero mean")
    rmse = np.sqrt(np.mean((ref - est) ** 2, axis=(0, 1)))
    return float(100.0 / r * np.sqrt(np.mean((rmse / mu) ** 2)))


@dataclass(frozen=True)
class MetricsReport:
    psnr: float
    sam: float
    ergas: float
    mse: float
    sam_skipped: int = 0

    def to_dict(self):
        return asdict(self)

    def to_text(self):
        d = self.to_dict()
        width = max(len(k) for k in d)
        return "\n".join(f"{k.ljust(width)} = {v!r}" for k, v in d.items())

    @classmethod
    def from_text(cls, text):
        vals = {}
        for line in text.splitlines():
            if "=" in line:
                k, v = line.split("=", 1)
                vals[k.strip()] = v.strip()
        return cls(
            psnr=float(vals["psnr"]),
            sam=float(vals["sam"]),
            ergas=float(vals["ergas"]),
            mse=float(vals["mse"]),
            sam_skipped=int(vals.get("sam_skipped", 0)),
        )


def evaluate(ref, est, ratio):
    angle, skipped = _sam(ref, est)
    return MetricsReport(psnr(ref, est), angle, ergas(ref, est, ratio), mse(ref, est), skipped)
