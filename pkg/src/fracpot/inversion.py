"""Tikhonov-regularized reconstruction by conjugate gradients.

The functional is the measure-weighted discrete form

    J(q) = 1/2 ||F(q) - data||^2_{W2}  +  alpha/2 ||P q||^2_domain

with lattice quadrature weight h^dim in both inner products, so the
printed regularization weights keep their meaning.  The gradient, the
Fletcher-Reeves coefficient, and the closed-form step below are the exact
calculus of this discrete functional (the adjoint right-hand side is the
exact transpose of the observation quadrature).

The discrepancy functional E used by the stopping rule is the *mean*
square residual over the window points.  Uniform(-delta, delta) noise
leaves E at delta^2/3 when only noise remains, safely below the
stop-factor thresholds; an area-weighted E would sit above them in 2D,
where the window measure exceeds the threshold factor over 3.

Penalty: squared first differences (1D) or squared five-point Laplacian
(2D) of the potential, zero-extended one cell past the interior.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .forward import ForwardProblem, solve_adjoint, solve_sensitivity
from .fastop import krylov_solve
from .grids import discrete_norm
from .problem import Observation, ProblemSpec

__all__ = [
    "InversionConfig",
    "choose_alpha",
    "penalty_diff",
    "penalty_value",
    "penalty_inner",
    "regularization_gradient",
    "tikhonov_value",
    "gradient",
    "step_size",
    "IterRecord",
    "InversionResult",
    "cg_reconstruct",
]


def choose_alpha(delta: float, c: float = 1.0) -> float:
    """Regularization weight proportional to the squared noise level."""
    if delta <= 0:
        raise ValueError("noise-level rule needs delta > 0; "
                         "pass an explicit alpha for noiseless data")
    if c <= 0:
        raise ValueError("proportionality constant must be positive")
    return c * delta * delta


@dataclass(frozen=True)
class InversionConfig:
    delta: float
    alpha: float | None = None          # explicit weight; None -> rule
    alpha_c: float = 1.0                # alpha = alpha_c * delta^2
    stop_factor: float = 2.0            # threshold = stop_factor * delta^2
    max_outer_iter: int = 200
    inner_rtol: float = 1e-10
    restart_every: int = 20
    accept_slack: float = 1e-6        # relative growth of E tolerated per step
    noiseless_floor_factor: float = 10.0  # delta=0: E <= (factor*rtol)^2

    def resolved_alpha(self) -> float:
        if self.alpha is not None:
            return self.alpha
        return choose_alpha(self.delta, self.alpha_c)

    def stop_threshold(self) -> float:
        if self.delta > 0:
            return self.stop_factor * self.delta**2
        if self.alpha is None:
            raise ValueError("noiseless runs require an explicit alpha")
        return (self.noiseless_floor_factor * self.inner_rtol) ** 2


# -- penalty operators -------------------------------------------------------

def penalty_diff(q: np.ndarray, grid) -> np.ndarray:
    """1D forward differences of the zero-extended potential (length N)."""
    z = np.zeros(grid.N + 1)
    z[1:-1] = np.asarray(q).ravel()
    return np.diff(z) / grid.h


def laplacian_padded(q: np.ndarray, grid) -> np.ndarray:
    """Five-point Laplacian of the zero-extended 2D potential, on [0..N]^2."""
    n = grid.n_interior_axis
    z = np.zeros((n + 4, n + 4))
    z[2:-2, 2:-2] = np.asarray(q).reshape(n, n)
    lap = (z[1:-1, 2:] + z[1:-1, :-2] + z[2:, 1:-1] + z[:-2, 1:-1]
           - 4.0 * z[1:-1, 1:-1]) / grid.h**2
    return lap  # shape (n+2, n+2), supported on nodes 0..N per axis


def _pq(q: np.ndarray, grid) -> np.ndarray:
    return penalty_diff(q, grid) if grid.dim == 1 else laplacian_padded(q, grid)


def penalty_inner(qa: np.ndarray, qb: np.ndarray, grid) -> float:
    """h^dim-weighted inner product of the penalty images of two potentials."""
    return float(grid.h**grid.dim * np.sum(_pq(qa, grid) * _pq(qb, grid)))


def penalty_value(q: np.ndarray, grid) -> float:
    return penalty_inner(q, q, grid)


def regularization_gradient(q: np.ndarray, grid) -> np.ndarray:
    """Gradient of 0.5*penalty_value in the h^dim-weighted pairing.

    1D: minus the second difference of the zero-extended potential;
    2D: the five-point Laplacian applied twice (discrete biharmonic).
    Both are the exact discrete integration-by-parts transposes.
    """
    if grid.dim == 1:
        d = penalty_diff(q, grid)
        return -np.diff(d) / grid.h
    lap = laplacian_padded(q, grid)          # nodes 0..N per axis
    n = grid.n_interior_axis
    z = np.zeros((n + 4, n + 4))
    z[1:-1, 1:-1] = lap                      # nodes -1..N+1
    bi = (z[1:-1, 2:] + z[1:-1, :-2] + z[2:, 1:-1] + z[:-2, 1:-1]
          - 4.0 * z[1:-1, 1:-1]) / grid.h**2  # nodes 0..N
    return bi[1:-1, 1:-1].ravel()            # interior nodes 1..N-1


# -- functional pieces -------------------------------------------------------

def tikhonov_value(spec: ProblemSpec, q: np.ndarray, observation: Observation,
                   alpha: float, fp: ForwardProblem | None = None,
                   rtol: float = 1e-10) -> float:
    """Value of the regularized functional at a potential (runs one solve)."""
    fp = fp or ForwardProblem.for_spec(spec)
    sp = spec.with_potential(np.asarray(q).reshape((spec.grid.n_interior_axis,)
                                                   * spec.grid.dim))
    u, rep, _ = fp.solve(sp.q_interior().ravel(), rtol=rtol)
    obs = fp.observer(observation.points)
    r = obs.observe(u) - observation.values
    w_obs = spec.grid.h**spec.grid.dim
    misfit = 0.5 * w_obs * float(np.sum(r * r))
    return misfit + 0.5 * alpha * penalty_value(q, spec.grid)


def gradient(spec: ProblemSpec, q: np.ndarray, u_q: np.ndarray,
             v_q: np.ndarray, alpha: float) -> np.ndarray:
    """Gradient of the functional given matching forward/adjoint solutions."""
    return (np.asarray(u_q).ravel() * np.asarray(v_q).ravel()
            + alpha * regularization_gradient(q, spec.grid))


def step_size(residual: np.ndarray, obs_phi: np.ndarray, q: np.ndarray,
              d: np.ndarray, alpha: float, grid, w_obs: float):
    """Exact minimizer of the linearized functional along the direction d.

    Returns (beta, degenerate).  The update q + beta*d decreases the
    linearized functional whenever d is a descent direction.
    """
    num = w_obs * float(np.sum(residual * obs_phi)) \
        + alpha * penalty_inner(q, d, grid)
    den = w_obs * float(np.sum(obs_phi * obs_phi)) \
        + alpha * penalty_inner(d, d, grid)
    if not np.isfinite(den) or den <= 1e-300:
        return 0.0, True
    return -num / den, False


# -- outer loop ---------------------------------------------------------------

@dataclass
class IterRecord:
    k: int
    E: float
    grad_norm: float
    beta: float
    gamma: float
    wall: float
    inner_iters: int
    method: str


@dataclass
class InversionResult:
    q: np.ndarray
    trace: list[IterRecord] = field(default_factory=list)
    stopped_by: str = ""
    E_final: float = float("nan")
    iterations: int = 0

    def trace_rows(self) -> list[dict]:
        return [vars(t).copy() for t in self.trace]


def cg_reconstruct(spec: ProblemSpec, observation: Observation,
                   config: InversionConfig,
                   q0: np.ndarray | None = None) -> InversionResult:
    """Conjugate-gradient reconstruction of the potential.

    Per iteration: forward solve, residual, adjoint solve, gradient,
    Fletcher-Reeves direction (with safeguard restarts), sensitivity
    solve, closed-form step.  The closed-form step is exact only for the
    linearized functional, so steps are accepted only if the residual
    functional does not increase; rejected steps back off geometrically
    (restarting from steepest descent next).  Stops on the discrepancy
    threshold, a degenerate step, a stalled backtrack, or the iteration
    cap.
    """
    grid = spec.grid
    fp = ForwardProblem.for_spec(spec)
    observer = fp.observer(observation.points)
    w_obs = grid.h**grid.dim  # window quadrature weight in J
    alpha = config.resolved_alpha()
    threshold = config.stop_threshold()
    rtol = config.inner_rtol

    nq = grid.n_interior()
    q = np.zeros(nq) if q0 is None else np.asarray(q0, dtype=float).ravel().copy()
    d = None
    g_prev_sq = None
    v_ws = phi_ws = None  # warm starts
    result = InversionResult(q=q)
    t0 = time.monotonic()

    u, rep_f, _ = fp.solve(q, rtol=rtol)
    if not rep_f.converged:
        raise RuntimeError(f"initial forward solve failed: {rep_f.method} "
                           f"residual {rep_f.final_residual:.2e}")
    r = observer.observe(u) - observation.values
    E = float(np.mean(r * r))
    inner_count = rep_f.iterations
    method = rep_f.method

    for k in range(config.max_outer_iter + 1):
        if E <= threshold:
            result.trace.append(IterRecord(k, E, 0.0, 0.0, 0.0,
                                           time.monotonic() - t0,
                                           inner_count, "stop"))
            result.stopped_by = "discrepancy"
            break
        if k == config.max_outer_iter:
            result.trace.append(IterRecord(k, E, 0.0, 0.0, 0.0,
                                           time.monotonic() - t0,
                                           inner_count, "stop"))
            result.stopped_by = "max_iter"
            break

        spec_k = spec.with_potential(q.reshape((grid.n_interior_axis,) * grid.dim))
        v, rep_a = solve_adjoint(spec_k, r, observer, w_obs, rtol=rtol,
                                 fp=fp, x0=v_ws)
        v_ws = v
        inner_count += rep_a.iterations
        g = gradient(spec_k, q, u, v, alpha)
        g_sq = grid.h**grid.dim * float(np.sum(g * g))

        if d is None or k % config.restart_every == 0 or g_prev_sq is None:
            gam = 0.0
            d = -g
        else:
            gam = g_sq / g_prev_sq
            d = -g + gam * d
            if grid.h**grid.dim * float(np.sum(g * d)) >= 0.0:
                gam = 0.0
                d = -g  # safeguard: keep descent
        g_prev_sq = g_sq

        phi, rep_s = solve_sensitivity(spec_k, d, u, rtol=rtol, fp=fp, x0=phi_ws)
        phi_ws = phi
        inner_count += rep_s.iterations
        obs_phi = observer.interior_term(phi)

        beta, degenerate = step_size(r, obs_phi, q, d, alpha, grid, w_obs)
        if degenerate:
            result.trace.append(IterRecord(k, E, float(np.sqrt(g_sq)), 0.0,
                                           gam, time.monotonic() - t0,
                                           inner_count, method))
            result.stopped_by = "degenerate_step"
            break

        # accept the step only if the residual functional does not grow;
        # the trial solve doubles as the next iteration's forward solve
        accepted = False
        for _ in range(15):
            q_t = q + beta * d
            u_t, rep_t, _ = fp.solve(q_t, rtol=rtol, x0=u)
            if not rep_t.converged:
                raise RuntimeError(
                    f"forward solve failed at outer iteration {k}: "
                    f"{rep_t.method} residual {rep_t.final_residual:.2e}")
            inner_count += rep_t.iterations
            r_t = observer.observe(u_t) - observation.values
            E_t = float(np.mean(r_t * r_t))
            if E_t <= E * (1.0 + config.accept_slack):
                accepted = True
                break
            beta *= 0.5
        result.trace.append(IterRecord(k, E, float(np.sqrt(g_sq)), beta, gam,
                                       time.monotonic() - t0, inner_count,
                                       method))
        if not accepted:
            result.stopped_by = "stalled_line_search"
            break
        q, u, r, E = q_t, u_t, r_t, E_t
        method = rep_t.method
        inner_count = 0

    result.q = q
    result.E_final = result.trace[-1].E if result.trace else float("nan")
    result.iterations = result.trace[-1].k if result.trace else 0
    return result
