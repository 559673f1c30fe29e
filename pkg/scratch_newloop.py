NEW_LOOP = '''
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
            if E_t <= E * (1.0 + 1e-12):
                accepted = True
                break
            beta *= 0.5
            g_prev_sq = None  # broken conjugacy: restart next iteration
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
'''

import re
src = open("src/fracpot/inversion.py").read()
start = src.index("def cg_reconstruct")
src = src[:start] + NEW_LOOP.strip() + "\n"
open("src/fracpot/inversion.py", "w").write(src)
print("replaced loop")
