"""Nuclear norm versus MCP on the singular values of an unfolding.

Soft thresholding shrinks every singular value by the same amount.  The MCP
tapers the shrinkage and leaves values above a*lam untouched, which is what
the one-step reweighting in the solver exploits.
"""
import numpy as np

from hssr import McpParams, svd, svt, weighted_svt
from hssr.lowrank import mcp_value, mcp_weights

rng = np.random.default_rng(1)
p = McpParams(lam=1.0, a=2.0)

# a 6x6 matrix with a clear spectrum plus some noise
u, _ = np.linalg.qr(rng.standard_normal((6, 6)))
v, _ = np.linalg.qr(rng.standard_normal((6, 6)))
s_true = np.array([6.0, 3.0, 1.5, 0.6, 0.3, 0.1])
a = u @ np.diag(s_true) @ v.T

tau = 1.0
w = mcp_weights(svd(a).s, p)
print("singular values      ", np.round(svd(a).s, 3))
print("after svt            ", np.round(svd(svt(a, tau)).s, 3))
print("LLA weights          ", np.round(w, 3))
print("after weighted svt   ", np.round(svd(weighted_svt(a, tau, w)).s, 3))

# penalty shapes on a grid
t = np.linspace(0, 3, 7)
print("t      ", t)
print("lam*|t|", p.lam * t)
print("MCP(t) ", mcp_value(t, p))
