import numpy as np
import pytest

from hssr.admm import (
    IterationRecord,
    Penalty,
    SolverConfig,
    SolverState,
    initial_state,
    inner_gradient,
    inner_objective,
    objective,
    solve,
    update_m,
    update_x,
    update_y,
)
from hssr.cube_io import standard_instance
from hssr.degradation import DegradationConfig, bicubic_upsample, degrade, degrade_noiseless, gaussian_kernel
from hssr.errors import ShapeError
from hssr.lowrank import McpParams, nuclear_norm, tensor_mcp, tensor_nuclear
from hssr.metrics import psnr
from hssr.tensor import unfold
from hssr.tv import tv_value

rng = np.random.default_rng(17)
IDENTITY = DegradationConfig(gaussian_kernel(1, 1.0), 1, 0.0, 0)
SMALL = DegradationConfig(gaussian_kernel(3, 1.0), 2, 0.0, 0)


def random_state(dims, rho=1.3, gen=rng):
    return SolverState(
        x=gen.standard_normal(dims),
        m=[gen.standard_normal(dims) for _ in range(3)],
        y=[gen.standard_normal(dims) for _ in range(3)],
        rho=rho,
    )


def test_objective_zero():
    assert objective(np.zeros((4, 4, 2)), np.zeros((2, 2, 2)), SolverConfig(degradation=SMALL)) == 0.0


def test_objective_term_isolation():
    x = rng.standard_normal((8, 8, 3))
    i_obs = rng.standard_normal((4, 4, 3))
    cfg = SolverConfig(lambda1=0, lambda2=0, degradation=SMALL)
    assert objective(x, i_obs, cfg) == pytest.approx(np.sum((degrade_noiseless(x, SMALL) - i_obs) ** 2))


@pytest.mark.parametrize("penalty", ["nuclear", "mcp"])
def test_objective_componentwise(penalty):
    x = rng.standard_normal((8, 8, 3))
    i_obs = rng.standard_normal((4, 4, 3))
    cfg = SolverConfig(lambda1=0.3, lambda2=0.7, penalty=penalty, mcp=McpParams(0.5, 3.0), degradation=SMALL)
    lr = tensor_mcp(x, cfg.alpha, cfg.mcp) if penalty == "mcp" else tensor_nuclear(x, cfg.alpha)
    want = np.sum((degrade(x, SMALL) - i_obs) ** 2) + 0.3 * tv_value(x) + 0.7 * lr
    assert objective(x, i_obs, cfg) == pytest.approx(want, rel=1e-12)


def test_objective_shape_error():
    with pytest.raises(ShapeError):
        objective(np.zeros((8, 8, 3)), np.zeros((3, 4, 3)), SolverConfig(degradation=SMALL))


def test_config_validation():
    with pytest.raises(ValueError):
        SolverConfig(rho=0)
    with pytest.raises(ValueError):
        SolverConfig(rho_growth=0.9)
    with pytest.raises(ValueError):
        SolverConfig(lambda1=-1)
    with pytest.raises(ValueError):
        SolverConfig(penalty="scad")
    assert SolverConfig(penalty="mcp").penalty is Penalty.MCP


def test_inner_gradient_finite_differences():
    cfg = SolverConfig(lambda1=0.2, degradation=SMALL)
    st = random_state((4, 4, 2))
    i_obs = rng.standard_normal((2, 2, 2))
    x = st.x
    g = inner_gradient(x, st, i_obs, cfg)
    num = np.zeros_like(x)
    h = 1e-6
    for idx in np.ndindex(*x.shape):
        xp, xm = x.copy(), x.copy()
        xp[idx] += h
        xm[idx] -= h
        num[idx] = (inner_objective(xp, st, i_obs, cfg) - inner_objective(xm, st, i_obs, cfg)) / (2 * h)
    assert np.linalg.norm(num - g) / np.linalg.norm(num) <= 1e-6


def test_update_x_descent_and_gradient_reduction():
    cfg = SolverConfig(lambda1=1e-2, degradation=SMALL, max_inner=10)
    for _ in range(5):
        st = random_state((8, 8, 4))
        i_obs = rng.standard_normal((4, 4, 4))
        f0 = inner_objective(st.x, st, i_obs, cfg)
        g0 = np.linalg.norm(inner_gradient(st.x, st, i_obs, cfg))
        x1 = update_x(st, i_obs, cfg)
        assert inner_objective(x1, st, i_obs, cfg) <= f0
        assert np.linalg.norm(inner_gradient(x1, st, i_obs, cfg)) < g0
        hist = st.inner_history[-1]
        assert all(b <= a for a, b in zip(hist, hist[1:]))


def test_update_x_quadratic_stationarity():
    # with M_i = I and Y_i = 0 the observation itself is the minimizer
    i_obs = rng.standard_normal((5, 4, 3))
    cfg = SolverConfig(lambda1=0, lambda2=0, degradation=IDENTITY, max_inner=50)
    st = SolverState(x=np.zeros_like(i_obs), m=[i_obs.copy()] * 3, y=[np.zeros_like(i_obs)] * 3, rho=1e3)
    np.testing.assert_allclose(update_x(st, i_obs, cfg), i_obs, atol=1e-10)
    # with M_i = 0 the minimizer is the blend 2I / (2 + 3 rho)
    rho = 4.0
    st = SolverState(x=np.zeros_like(i_obs), m=[np.zeros_like(i_obs)] * 3, y=[np.zeros_like(i_obs)] * 3, rho=rho)
    cfg = SolverConfig(lambda1=0, lambda2=0, degradation=IDENTITY, max_inner=200)
    np.testing.assert_allclose(update_x(st, i_obs, cfg), 2 * i_obs / (2 + 3 * rho), atol=1e-8)


def test_update_m_zero_threshold():
    st = random_state((4, 3, 5))
    for penalty in ("nuclear", "mcp"):
        out = update_m(st, SolverConfig(lambda2=0, penalty=penalty))
        for m, y in zip(out, st.y):
            np.testing.assert_array_equal(m, st.x - y / st.rho)


def test_update_m_nuclear_is_prox():
    gen = np.random.default_rng(2)
    st = random_state((4, 3, 5), rho=2.0, gen=gen)
    cfg = SolverConfig(lambda2=1.5)
    out = update_m(st, cfg)
    for n in range(3):
        target = unfold(st.x - st.y[n] / st.rho, n + 1)
        tau = cfg.lambda2 * cfg.alpha[n]
        obj = lambda a: tau * nuclear_norm(a) + st.rho / 2 * np.sum((a - target) ** 2)  # noqa: E731
        best = unfold(out[n], n + 1)
        base = obj(best)
        for _ in range(300):
            cand = best + 10.0 ** gen.uniform(-3, 0) * gen.standard_normal(best.shape)
            assert obj(cand) > base


def test_update_m_mcp_saturation():
    # Latin-square cube: every unfolding has all singular values 5*sqrt(3) > a*lam
    x = np.zeros((3, 3, 3))
    for i in range(3):
        for j in range(3):
            x[i, j, (i + j) % 3] = 5.0
    for n in range(3):
        assert np.linalg.svd(unfold(x, n + 1), compute_uv=False).min() >= 2.0
    st = SolverState(x=x, m=[x] * 3, y=[rng.standard_normal(x.shape) for _ in range(3)], rho=1.0)
    out = update_m(st, SolverConfig(lambda2=1.0, penalty="mcp", mcp=McpParams(1.0, 2.0)))
    for m, y in zip(out, st.y):
        np.testing.assert_allclose(m, x - y, atol=1e-12)


def test_update_y_examples():
    x = rng.standard_normal((3, 3, 2))
    y0 = [rng.standard_normal(x.shape) for _ in range(3)]
    st = SolverState(x=x, m=[x.copy()] * 3, y=y0, rho=1.7)
    for a, b in zip(update_y(st, SolverConfig()), y0):
        np.testing.assert_array_equal(a, b)
    c = np.full(x.shape, 0.25)
    st = SolverState(x=x, m=[x + c] * 3, y=[np.zeros_like(x)] * 3, rho=1.0)
    for a in update_y(st, SolverConfig()):
        np.testing.assert_allclose(a, c, atol=1e-15)
    st.rho = 3.0
    st.y = update_y(st, SolverConfig())
    st.y = update_y(st, SolverConfig())
    for a in st.y:
        np.testing.assert_allclose(a, 2 * 3.0 * c, atol=1e-14)
    assert st.rho == 3.0


def test_initial_state():
    i_obs = rng.random((4, 4, 2))
    st = initial_state(i_obs, SolverConfig(degradation=SMALL))
    np.testing.assert_array_equal(st.x, bicubic_upsample(i_obs, 2))
    assert all(np.array_equal(m, st.x) for m in st.m)
    assert not any(y.any() for y in st.y)
    z = initial_state(i_obs, SolverConfig(degradation=SMALL, init="zero-upsample")).x
    assert z[::2, ::2].tolist() == i_obs.tolist() and z[1::2].sum() == 0


def test_solve_identity_problem():
    i_obs = rng.random((6, 5, 4))
    cfg = SolverConfig(lambda1=0, lambda2=0, degradation=IDENTITY, max_outer=50)
    res = solve(i_obs, cfg)
    assert np.linalg.norm(res.x - i_obs) / np.linalg.norm(i_obs) <= 1e-6
    assert res.converged and len(res.trace) <= 50


def test_solve_shape_error():
    with pytest.raises(ShapeError):
        solve(np.zeros((5, 4, 2)), SolverConfig(degradation=SMALL, max_outer=1), hr_dims=(12, 8, 2))
    with pytest.raises(ShapeError):
        solve(np.zeros((5, 4, 2)), SolverConfig(degradation=SMALL, max_outer=1), hr_dims=(9, 8, 2))


def test_trace_line_round_trip():
    rec = IterationRecord(3, 0.1 + 0.2, 1e-300, 2.5e-5, 1.05**7)
    line = rec.to_line()
    assert line.startswith("iter=3 obj=")
    assert IterationRecord.from_line(line) == rec


@pytest.fixture(scope="module")
def standard():
    gt = standard_instance()
    deg = DegradationConfig(gaussian_kernel(7, 2.0), 2, 0.0, 0)
    return gt, degrade(gt, deg), deg


@pytest.mark.slow
@pytest.mark.parametrize("penalty", ["nuclear", "mcp"])
def test_solve_beats_bicubic(standard, penalty):
    gt, i_obs, deg = standard
    cfg = SolverConfig(lambda1=1e-4, lambda2=1e-2, penalty=penalty, degradation=deg)
    res = solve(i_obs, cfg)
    assert psnr(gt, res.x) > psnr(gt, bicubic_upsample(i_obs, 2))
    assert res.trace[-1].primal_residual <= res.trace[0].primal_residual
    again = solve(i_obs, cfg)
    assert again.x.tobytes() == res.x.tobytes()
    assert [r.to_line() for r in again.trace] == [r.to_line() for r in res.trace]


@pytest.mark.slow
def test_mcp_fit_not_worse_than_nuclear_at_defaults(standard):
    gt, i_obs, deg = standard
    nuc = solve(i_obs, SolverConfig(degradation=deg)).x
    mcp = solve(i_obs, SolverConfig(degradation=deg, penalty="mcp")).x
    assert psnr(gt, mcp) >= psnr(gt, nuc) - 0.1
