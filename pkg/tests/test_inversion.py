import numpy as np
import pytest

from fracpot.forward import ForwardProblem, forward_operator, solve_adjoint
from fracpot.grids import Field, make_grid
from fracpot.inversion import (InversionConfig, cg_reconstruct, choose_alpha,
                               gradient, penalty_diff, penalty_inner,
                               penalty_value, regularization_gradient,
                               step_size, tikhonov_value)
from fracpot.problem import FuncSpec, Observation, ProblemSpec, RingWindow


def _spec_1d(N=64, s=0.4, q=None, f=None):
    grid = make_grid(1, 1.0, 3.0, N)
    eps = 2 * grid.h
    win = RingWindow(1.0 + eps, 3.0)
    qf = Field.zeros(grid) if q is None else Field.from_interior(grid, q)
    return ProblemSpec(s=s, gamma=2.0, grid=grid, q=qf,
                       f=f or FuncSpec("mollified_ring", (1.0 + eps, 3.0, 0.3)),
                       g=FuncSpec("zero"), W1=win, W2=win, eps_gap=eps)


def test_choose_alpha_rule():
    assert choose_alpha(1e-5, 1.0) == pytest.approx(1e-10, rel=1e-12)
    assert choose_alpha(1e-6, 0.1) == pytest.approx(1e-13, rel=1e-12)
    with pytest.raises(ValueError):
        choose_alpha(0.0, 1.0)
    with pytest.raises(ValueError):
        choose_alpha(1e-5, -1.0)


def test_config_thresholds():
    cfg = InversionConfig(delta=1e-5, stop_factor=2.0)
    assert cfg.stop_threshold() == pytest.approx(2e-10)
    assert cfg.resolved_alpha() == pytest.approx(1e-10)
    noiseless = InversionConfig(delta=0.0, alpha=1e-9, inner_rtol=1e-10)
    assert noiseless.stop_threshold() == pytest.approx(1e-18)
    with pytest.raises(ValueError):
        InversionConfig(delta=0.0).stop_threshold()


# ---------------------------------------------------------------------------
# penalty calculus


def test_penalty_hand_value_single_bump():
    grid = make_grid(1, 1.0, 3.0, 6)
    b = 0.7
    q = np.zeros(5)
    q[2] = b
    # two one-sided jumps of size b/h
    assert penalty_value(q, grid) == pytest.approx(2 * (b / grid.h) ** 2 * grid.h)


def test_summation_by_parts_1d(rng):
    grid = make_grid(1, 1.0, 3.0, 32)
    q, d = rng.standard_normal(31), rng.standard_normal(31)
    lhs = penalty_inner(q, d, grid)
    rhs = grid.h * float(np.dot(regularization_gradient(q, grid), d))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_summation_by_parts_2d(rng):
    grid = make_grid(2, 1.0, 2.0, 10)
    q, d = rng.standard_normal(81), rng.standard_normal(81)
    lhs = penalty_inner(q, d, grid)
    rhs = grid.h**2 * float(np.dot(regularization_gradient(q, grid), d))
    assert lhs == pytest.approx(rhs, rel=1e-12)


def test_penalty_gradient_matches_fd(rng):
    for dim, N in ((1, 16), (2, 8)):
        grid = make_grid(dim, 1.0, 2.0, N)
        n = grid.n_interior()
        q = rng.standard_normal(n)
        g = regularization_gradient(q, grid)
        t = 1e-6
        for i in rng.choice(n, 3, replace=False):
            e = np.zeros(n)
            e[i] = 1.0
            fd = (penalty_value(q + t * e, grid)
                  - penalty_value(q - t * e, grid)) / (4 * t)
            assert fd == pytest.approx(grid.h**dim * g[i], rel=1e-5, abs=1e-8)


# ---------------------------------------------------------------------------
# functional and gradient


def _make_observation(spec, fp, rtol=1e-13):
    pts = spec.W2.lattice_points(spec.grid)
    vals = forward_operator(spec, pts, rtol=rtol, fp=fp)
    return Observation(pts, vals, 0.0, 0)


def test_tikhonov_zero_at_truth_noiseless():
    spec = _spec_1d(N=32)
    x = spec.grid.interior_coords()
    spec_t = spec.with_potential(0.5 * np.sin(np.pi * x))
    fp = ForwardProblem.for_spec(spec_t)
    obs = _make_observation(spec_t, fp)
    J = tikhonov_value(spec_t, spec_t.q_interior(), obs, alpha=0.0, fp=fp,
                       rtol=1e-13)
    assert J <= (1e-10) ** 2


def test_tikhonov_alpha_monotone():
    spec = _spec_1d(N=32)
    x = spec.grid.interior_coords()
    q = 0.3 * np.cos(np.pi * x)
    fp = ForwardProblem.for_spec(spec)
    obs = _make_observation(spec, fp)
    j0 = tikhonov_value(spec, q, obs, alpha=0.0, fp=fp)
    j1 = tikhonov_value(spec, q, obs, alpha=1e-3, fp=fp)
    j2 = tikhonov_value(spec, q, obs, alpha=1e-2, fp=fp)
    assert j0 < j1 < j2


def test_gradient_zero_structure():
    spec = _spec_1d(N=16)
    z = np.zeros(15)
    g = gradient(spec, z, np.ones(15), z, alpha=0.5)
    assert np.all(g == 0.0)


def test_gradient_matches_finite_differences(rng):
    N = 64
    spec = _spec_1d(N=N)
    x = spec.grid.interior_coords()
    q = 0.4 * np.sin(np.pi * x)
    spec_q = spec.with_potential(q)
    fp = ForwardProblem.for_spec(spec)
    spec_t = spec.with_potential(np.sin(np.pi * x))
    observation = _make_observation(spec_t, fp)
    alpha = 1e-8
    pts = observation.points
    ob = fp.observer(pts)
    w_obs = spec.grid.h
    u, _, _ = fp.solve(q, rtol=1e-13)
    r = ob.observe(u) - observation.values
    v, _ = solve_adjoint(spec_q, r, ob, w_obs, rtol=1e-13, fp=fp)
    g = gradient(spec_q, q, u, v, alpha)
    t = 3e-5
    for i in rng.choice(N - 1, 5, replace=False):
        e = np.zeros(N - 1)
        e[i] = 1.0
        jp = tikhonov_value(spec, q + t * e, observation, alpha, fp=fp, rtol=1e-13)
        jm = tikhonov_value(spec, q - t * e, observation, alpha, fp=fp, rtol=1e-13)
        fd = (jp - jm) / (2 * t)
        assert fd == pytest.approx(spec.grid.h * g[i], rel=1e-4)


# ---------------------------------------------------------------------------
# step size


def test_step_size_degenerate_direction():
    grid = make_grid(1, 1.0, 3.0, 16)
    beta, degen = step_size(np.ones(10), np.zeros(10), np.zeros(15),
                            np.zeros(15), 1e-6, grid, w_obs=grid.h)
    assert degen


def test_step_size_minimizes_linearized_functional(rng):
    grid = make_grid(1, 1.0, 3.0, 32)
    n = 31
    npts = 40
    r = rng.standard_normal(npts)
    psi = rng.standard_normal(npts)
    q = rng.standard_normal(n)
    d = rng.standard_normal(n)
    alpha = 1e-3
    w = grid.h
    beta, degen = step_size(r, psi, q, d, alpha, grid, w)
    assert not degen

    def j_lin(b):
        rr = r + b * psi
        return 0.5 * w * np.sum(rr * rr) \
            + 0.5 * alpha * penalty_value(q + b * d, grid)

    t = 1e-6
    deriv_at_min = (j_lin(beta + t) - j_lin(beta - t)) / (2 * t)
    deriv_at_zero = (j_lin(t) - j_lin(-t)) / (2 * t)
    assert abs(deriv_at_min) <= 1e-6 * abs(deriv_at_zero)


def test_step_size_alpha_dominant_limit(rng):
    grid = make_grid(1, 1.0, 3.0, 32)
    r, psi = rng.standard_normal(10), rng.standard_normal(10)
    q, d = rng.standard_normal(31), rng.standard_normal(31)
    beta, _ = step_size(r, psi, q, d, alpha=1e12, grid=grid, w_obs=grid.h)
    expect = -penalty_inner(q, d, grid) / penalty_inner(d, d, grid)
    assert beta == pytest.approx(expect, rel=1e-9)


# ---------------------------------------------------------------------------
# outer loop


def test_reconstruct_trivial_stop_at_zero_truth():
    # same-grid noiseless data from q = 0: must stop immediately at k = 0
    spec = _spec_1d(N=32)
    fp = ForwardProblem.for_spec(spec)
    obs = _make_observation(spec, fp, rtol=1e-10)
    cfg = InversionConfig(delta=0.0, alpha=1e-10, inner_rtol=1e-10)
    res = cg_reconstruct(spec, obs, cfg)
    assert res.stopped_by == "discrepancy"
    assert res.iterations == 0
    assert res.E_final <= (10 * 1e-10) ** 2
    assert np.all(res.q == 0.0)


def test_reconstruct_trace_contract(rng):
    # small same-grid run: gamma_0 = 0, descent steps, E recorded, E decreasing
    N = 32
    spec = _spec_1d(N=N)
    x = spec.grid.interior_coords()
    spec_t = spec.with_potential(0.8 * np.sin(np.pi * x))
    fp = ForwardProblem.for_spec(spec)
    pts = spec.W2.lattice_points(spec.grid)
    vals = forward_operator(spec_t, pts, rtol=1e-12, fp=fp)
    noisy = vals + 1e-5 * (2 * np.random.default_rng(5).random(vals.shape) - 1)
    obs = Observation(pts, noisy, 1e-5, 5)
    cfg = InversionConfig(delta=1e-5, stop_factor=2.0, max_outer_iter=40)
    res = cg_reconstruct(spec, obs, cfg)
    assert len(res.trace) >= 2
    assert res.trace[0].gamma == 0.0
    E = [t.E for t in res.trace]
    assert all(np.isfinite(E))
    assert all(e2 <= e1 * (1 + 1e-9) for e1, e2 in zip(E, E[1:]))
    assert res.E_final == E[-1]
    # reconstruction moved toward the truth
    err0 = np.max(np.abs(spec_t.q_interior()))
    assert np.max(np.abs(res.q - spec_t.q_interior())) < err0


def test_reconstruct_requires_alpha_for_noiseless():
    spec = _spec_1d(N=16)
    fp = ForwardProblem.for_spec(spec)
    obs = _make_observation(spec, fp)
    with pytest.raises(ValueError):
        cg_reconstruct(spec, obs, InversionConfig(delta=0.0))
