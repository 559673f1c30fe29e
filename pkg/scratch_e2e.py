import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot import *
from fracpot.forward import ForwardProblem
from fracpot.fastop import dense_operator, FastOperator
from fracpot.inversion import InversionConfig, cg_reconstruct, gradient, penalty_value, regularization_gradient, penalty_inner
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.presets import get_preset
from fracpot.problem import Field, FuncSpec, ProblemSpec, RingWindow
from fracpot.grids import make_grid
from fracpot.forward import solve_forward, solve_adjoint, solve_sensitivity
rng = np.random.default_rng(42)

# --- 1. FFT vs dense, 1D
g1 = make_grid(1, 1.0, 3.0, 16)
sym1 = build_symbol(1, 0.4, 2.0, 1.0, 3.0, 16)
q1 = rng.standard_normal(15)
op1 = FastOperator(sym1, g1, q1)
A1 = dense_operator(sym1, g1, q1)
x = rng.standard_normal(15)
print("1D fft-vs-dense:", np.max(np.abs(op1.apply(x) - A1 @ x)))

# --- 2. FFT vs dense, 2D
g2 = make_grid(2, 1.0, 2.0, 8)
sym2 = build_symbol(2, 0.5, 2.0, 1.0, 2.0, 8)
q2 = rng.standard_normal((7, 7))
op2 = FastOperator(sym2, g2, q2)
A2 = dense_operator(sym2, g2, q2)
x2 = rng.standard_normal(49)
print("2D fft-vs-dense:", np.max(np.abs(op2.apply(x2) - A2 @ x2)))
print("2D operator symmetry:", np.max(np.abs(A2 - A2.T)))

# --- 3. observation fast vs direct (1D)
W = RingWindow(1.0 + g1.h, 3.0)
pts = W.lattice_points(g1)
obs = ExteriorObserver(g1, 0.4, pts)
u_test = rng.standard_normal(15)
fast = obs.interior_term(u_test)
direct = obs._interior_term_direct(u_test)
print("1D obs fast-vs-direct:", np.max(np.abs(fast - direct)))

# 2D
W2w = RingWindow(1.0 + g2.h, 2.0)
pts2 = W2w.lattice_points(g2)
obs2 = ExteriorObserver(g2, 0.5, pts2)
u2 = rng.standard_normal(49)
print("2D obs fast-vs-direct:", np.max(np.abs(obs2.interior_term(u2) - obs2._interior_term_direct(u2))))

# transpose identity: <B u, r> = <u, B^T r>
r = rng.standard_normal(pts.shape[0])
lhs = np.dot(obs.interior_term(u_test), r)
rhs = np.dot(u_test, obs.kernel_transpose(r))
print("1D transpose identity:", abs(lhs - rhs) / abs(lhs))
r2 = rng.standard_normal(pts2.shape[0])
print("2D transpose identity:", abs(np.dot(obs2.interior_term(u2), r2) - np.dot(u2, obs2.kernel_transpose(r2).ravel())) / abs(np.dot(obs2.interior_term(u2), r2)))

# --- 4. adjoint consistency on a real problem (1D, N=64)
N = 64
gg = make_grid(1, 1.0, 3.0, N)
eps = gg.h
win = RingWindow(1.0 + eps, 3.0)
f = FuncSpec("mollified_ring", (1.0 + eps, 3.0, 0.3))
qint = 0.3 * np.sin(np.pi * gg.interior_coords())
spec = ProblemSpec(s=0.4, gamma=2.0, grid=gg, q=Field.from_interior(gg, qint),
                   f=f, g=FuncSpec("zero"), W1=win, W2=win)
fp = ForwardProblem.for_spec(spec, f_feature=0.15)
ptsW = win.lattice_points(gg)
ob = fp.observer(ptsW)
w_obs = 1.0 / ptsW.shape[0]
u, rep, b = fp.solve(qint, rtol=1e-12)
print("forward:", rep.method, rep.iterations, rep.final_residual)
r = rng.standard_normal(ptsW.shape[0])
v, rep_a = solve_adjoint(spec, r, ob, w_obs, rtol=1e-12, fp=fp)
dq = rng.standard_normal(N - 1)
phi, rep_s = solve_sensitivity(spec, dq, u, rtol=1e-12, fp=fp)
lhs = w_obs * np.dot(ob.interior_term(phi), r)
rhs = gg.h * np.dot(dq, u * v)
print("adjoint consistency rel gap:", abs(lhs - rhs) / abs(lhs))

# --- 5. gradient FD check
from fracpot.inversion import tikhonov_value
alpha = 1e-8
# make synthetic observation from q_true on the same grid (ok for gradient test)
q_true = np.sin(np.pi * gg.interior_coords())
spec_t = spec.with_potential(q_true)
vals = forward_operator(spec_t, ptsW, rtol=1e-12, fp=fp)
observation = Observation(ptsW, vals, 1e-5, 0)
# gradient at qint
u_q, _, _ = fp.solve(qint, rtol=1e-13)
res = ob.observe(u_q) - observation.values
v_q, _ = solve_adjoint(spec, res, ob, w_obs, rtol=1e-13, fp=fp)
gr = gradient(spec, qint, u_q, v_q, alpha)
idxs = rng.choice(N - 1, 5, replace=False)
t = 3e-5
for i in idxs:
    e = np.zeros(N - 1); e[i] = 1.0
    Jp = tikhonov_value(spec, qint + t * e, observation, alpha, fp=fp, rtol=1e-13)
    Jm = tikhonov_value(spec, qint - t * e, observation, alpha, fp=fp, rtol=1e-13)
    fd = (Jp - Jm) / (2 * t)
    print(f"  grad[{i}]: exact={gr[i]:+.6e} fd={fd:+.6e} rel={abs(fd-gr[i])/max(abs(gr[i]),1e-30):.2e}")

# --- 6. mini reconstruction (ex4.1 style at N=64)
t0 = time.time()
preset = get_preset("ex4.1").with_overrides(N=64, max_outer=200)
rec = run_experiment(preset, delta=1e-4, seed=1)
print(f"mini ex4.1: iters={rec.iterations} stopped={rec.stopped_by} "
      f"E={rec.E_final:.3e} thr={2*(1e-4)**2:.3e} linf={rec.linf_err:.3f} "
      f"wall={time.time()-t0:.1f}s")
