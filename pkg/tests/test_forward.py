import numpy as np
import pytest

from fracpot.forward import (ForwardProblem, forward_operator, solve_adjoint,
                             solve_forward, solve_sensitivity)
from fracpot.grids import Field, make_grid
from fracpot.problem import FuncSpec, ProblemSpec, RingWindow


def _spec_1d(N=64, s=0.4, q=None, f=None, g=None, R=3.0):
    grid = make_grid(1, 1.0, R, N)
    eps = 2 * grid.h
    win = RingWindow(1.0 + eps, R)
    qf = Field.zeros(grid) if q is None else Field.from_interior(grid, q)
    return ProblemSpec(s=s, gamma=2.0, grid=grid, q=qf,
                       f=f or FuncSpec("zero"), g=g or FuncSpec("zero"),
                       W1=win, W2=win, eps_gap=eps)


def test_all_zero_data_gives_zero_solution():
    spec = _spec_1d()
    sol = solve_forward(spec)
    assert np.all(sol.u.values == 0.0)
    assert sol.report.iterations == 0


def test_manufactured_discrete_consistency(rng):
    # g built from the same discrete operator: solve must return u* to rtol
    N = 64
    spec = _spec_1d(N=N, q=1.0 + rng.random(N - 1))
    fp = ForwardProblem.for_spec(spec)
    x = spec.grid.interior_coords()
    u_star = np.where(np.abs(x) < 1, (1 - x**2) ** 3, 0.0)
    op = fp.operator(spec.q_interior())
    g_vec = op.apply(u_star)
    u, rep = __import__("fracpot.fastop", fromlist=["krylov_solve"]).krylov_solve(
        op, g_vec, rtol=1e-12)
    assert rep.converged
    assert np.max(np.abs(u - u_star)) < 1e-10


def test_solution_ring_carries_exterior_datum():
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))
    spec = _spec_1d(N=32, f=f)
    sol = solve_forward(spec)
    grid = spec.grid
    x = grid.axis_coords()
    ring = grid.ring_mask_axis()
    fn = f.build(1)
    expect = np.where(np.abs(x[ring]) < grid.R - 1e-12, fn(x[ring]), 0.0)
    assert np.array_equal(sol.u.values[ring], expect)


def test_residual_recheckable():
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))
    spec = _spec_1d(N=64, f=f, q=np.ones(63))
    fp = ForwardProblem.for_spec(spec)
    sol = solve_forward(spec, rtol=1e-11, fp=fp)
    op = fp.operator(spec.q_interior())
    res = np.linalg.norm(op.apply(sol.u.interior()) - sol.rhs_used)
    assert res <= 1e-11 * np.linalg.norm(sol.rhs_used) * 1.01


def test_forward_operator_zero_data_zero_observation():
    spec = _spec_1d(N=32)
    vals = forward_operator(spec)
    assert np.all(vals == 0.0)


def test_forward_operator_affine_in_source():
    base = dict(N=32, q=np.full(31, 0.5), f=FuncSpec("mollified_ring",
                                                     (1.2, 3.0, 0.3)))
    f0 = forward_operator(_spec_1d(**base, g=FuncSpec("zero")))
    f1 = forward_operator(_spec_1d(**base, g=FuncSpec("gaussian", (0.3, 1.0))))
    f2 = forward_operator(_spec_1d(**base, g=FuncSpec("gaussian", (0.3, 2.0))))
    assert np.allclose(f2 - f0, 2.0 * (f1 - f0), rtol=1e-9, atol=1e-12)


def test_forward_operator_distinguishes_potentials():
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))
    spec0 = _spec_1d(N=64, f=f)
    x = spec0.grid.interior_coords()
    spec1 = spec0.with_potential(np.sin(np.pi * x))
    v0 = forward_operator(spec0)
    v1 = forward_operator(spec1)
    assert np.linalg.norm(v1 - v0) > 1e-4


# ---------------------------------------------------------------------------
# sensitivity


def test_sensitivity_zero_perturbation():
    spec = _spec_1d(N=32, f=FuncSpec("mollified_ring", (1.2, 3.0, 0.3)))
    sol = solve_forward(spec)
    phi, rep = solve_sensitivity(spec, np.zeros(31), sol.u.interior())
    assert np.all(phi == 0.0)


def test_sensitivity_scales_linearly(rng):
    spec = _spec_1d(N=32, f=FuncSpec("mollified_ring", (1.2, 3.0, 0.3)))
    sol = solve_forward(spec, rtol=1e-12)
    dq = rng.standard_normal(31)
    phi1, _ = solve_sensitivity(spec, dq, sol.u.interior(), rtol=1e-12)
    phi3, _ = solve_sensitivity(spec, 3.0 * dq, sol.u.interior(), rtol=1e-12)
    assert np.allclose(phi3, 3.0 * phi1, rtol=1e-9, atol=1e-13)


def test_sensitivity_is_first_order_accurate(rng):
    # || F(q + t dq) - F(q) - t * obs(phi) || = O(t^2)
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))
    N = 64
    spec = _spec_1d(N=N, f=f, q=0.4 + 0.2 * rng.random(N - 1))
    fp = ForwardProblem.for_spec(spec)
    pts = spec.W2.lattice_points(spec.grid)
    obs = fp.observer(pts)
    base = forward_operator(spec, pts, rtol=1e-13, fp=fp)
    sol = solve_forward(spec, rtol=1e-13, fp=fp)
    dq = rng.standard_normal(N - 1)
    phi, _ = solve_sensitivity(spec, dq, sol.u.interior(), rtol=1e-13, fp=fp)
    dF = obs.interior_term(phi)
    ts = [1e-2, 1e-3, 1e-4]
    rem = []
    for t in ts:
        pert = forward_operator(spec.with_potential(spec.q_interior() + t * dq),
                                pts, rtol=1e-13, fp=fp)
        rem.append(np.linalg.norm(pert - base - t * dF))
    slope = np.polyfit(np.log(ts), np.log(rem), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.1)


# ---------------------------------------------------------------------------
# adjoint


def test_adjoint_zero_residual():
    spec = _spec_1d(N=32, f=FuncSpec("mollified_ring", (1.2, 3.0, 0.3)))
    fp = ForwardProblem.for_spec(spec)
    pts = spec.W2.lattice_points(spec.grid)
    obs = fp.observer(pts)
    v, rep = solve_adjoint(spec, np.zeros(pts.shape[0]), obs, 1.0 / pts.shape[0])
    assert np.all(v == 0.0)


def test_adjoint_linear_in_residual(rng):
    spec = _spec_1d(N=32, f=FuncSpec("mollified_ring", (1.2, 3.0, 0.3)))
    fp = ForwardProblem.for_spec(spec)
    pts = spec.W2.lattice_points(spec.grid)
    obs = fp.observer(pts)
    w = 1.0 / pts.shape[0]
    r1, r2 = rng.standard_normal(pts.shape[0]), rng.standard_normal(pts.shape[0])
    v1, _ = solve_adjoint(spec, r1, obs, w, rtol=1e-12, fp=fp)
    v2, _ = solve_adjoint(spec, r2, obs, w, rtol=1e-12, fp=fp)
    v12, _ = solve_adjoint(spec, r1 + 2 * r2, obs, w, rtol=1e-12, fp=fp)
    assert np.allclose(v12, v1 + 2 * v2, rtol=1e-8, atol=1e-13)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_adjoint_consistency_identity(seed):
    # <obs(phi), r>_window == <dq, u v>_domain for the discrete functional
    rng = np.random.default_rng(seed)
    N = 64
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))
    spec = _spec_1d(N=N, f=f, q=0.3 * rng.standard_normal(N - 1))
    fp = ForwardProblem.for_spec(spec)
    pts = spec.W2.lattice_points(spec.grid)
    obs = fp.observer(pts)
    w_obs = 1.0 / pts.shape[0]
    u, rep, _ = fp.solve(spec.q_interior(), rtol=1e-12)
    r = rng.standard_normal(pts.shape[0])
    v, _ = solve_adjoint(spec, r, obs, w_obs, rtol=1e-12, fp=fp)
    dq = rng.standard_normal(N - 1)
    phi, _ = solve_sensitivity(spec, dq, u, rtol=1e-12, fp=fp)
    lhs = w_obs * float(np.dot(obs.interior_term(phi), r))
    rhs = spec.grid.h * float(np.dot(dq, u * v))
    assert lhs == pytest.approx(rhs, rel=1e-3)


def test_truncation_balance_in_R():
    # moving the truncation radius changes the solution by at most the
    # dropped-datum bound C * R^{-2s} * max_boundary(f), with C fitted once
    s = 0.4
    f = FuncSpec("mollified_ring", (1.2, 3.0, 0.3))

    def solve_at(R, N):
        spec = _spec_1d(N=N, s=s, f=f, R=R)
        return solve_forward(spec, rtol=1e-12).u.interior()

    h = 2.0 / 64
    fn = f.build(1)
    u_ref = solve_at(5.0, 64)
    rs = [2.0, 2.4]
    errs = [np.max(np.abs(solve_at(R, 64) - u_ref)) for R in rs]
    fmax = [max(fn(np.array([R]))[0], 1e-300) for R in rs]
    C = errs[0] / (rs[0] ** (-2 * s) * fmax[0])
    assert errs[1] <= 1.5 * C * rs[1] ** (-2 * s) * fmax[1]
