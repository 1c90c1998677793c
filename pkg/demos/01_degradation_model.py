"""How a low-resolution observation is produced, and why the adjoint matters.

The forward model blurs every band with the same Gaussian, keeps every r-th
pixel, and optionally adds white noise.  The solver needs the exact adjoint of
the noiseless part for its gradient, so we check it with a dot-product test.
"""
import numpy as np

from hssr import DegradationConfig, adjoint_degrade, degrade, gaussian_kernel
from hssr.cube_io import standard_instance

rng = np.random.default_rng(0)

# the standard synthetic scene: 32x32 pixels, 8 bands, Tucker ranks (4, 4, 2)
x = standard_instance()
print("HR cube", x.shape, "range", float(x.min()), "to", float(x.max()))

cfg = DegradationConfig(gaussian_kernel(7, 2.0), factor=2, noise_sigma=0.0, seed=0)
y = degrade(x, cfg)
print("LR cube", y.shape)

# symmetric-boundary blur keeps each band mean exactly; decimation then only
# subsamples, so the LR means stay close
print("band means HR", np.round(x.mean(axis=(0, 1)), 4))
print("band means LR", np.round(y.mean(axis=(0, 1)), 4))

# <DS x, v> == <x, (DS)^T v> for arbitrary x, v
u = rng.standard_normal(x.shape)
v = rng.standard_normal(y.shape)
lhs = np.sum(degrade(u, cfg) * v)
rhs = np.sum(u * adjoint_degrade(v, cfg, u.shape))
print(f"dot-product test: {lhs:.12f} vs {rhs:.12f}")

noisy = degrade(x, DegradationConfig(gaussian_kernel(7, 2.0), 2, 0.01, 3))
print("noise std (measured)", float(np.std(noisy - y)))
