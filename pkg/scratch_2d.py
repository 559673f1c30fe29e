import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.forward import ForwardProblem, forward_operator
from fracpot.stencil import build_symbol

# timing of symbol builds
t0 = time.time(); build_symbol(2, 0.5, 2.0, 1.0, 3.0, 32); print(f"symbol N=32: {time.time()-t0:.1f}s")
t0 = time.time(); build_symbol(2, 0.5, 2.0, 1.0, 3.0, 64); print(f"symbol N=64: {time.time()-t0:.1f}s")
t0 = time.time(); build_symbol(2, 0.5, 2.0, 1.0, 3.0, 128); print(f"symbol N=128: {time.time()-t0:.1f}s")

# small end-to-end: N=32, data 64
preset = get_preset("ex4.4").with_overrides(N=32, max_outer=60)
t0 = time.time()
ctx = ExperimentContext.build(preset)
print(f"ctx build: {time.time()-t0:.1f}s; npts={ctx.points.shape[0]}")
t0 = time.time()
clean = ctx.clean_observation()
print(f"clean obs (fine N=64 solve + datum): {time.time()-t0:.1f}s scale={np.abs(clean).max():.3f}")
# bias at q_true
spec_t = ctx.spec_coarse0.with_potential(ctx.q_true_coarse)
t0 = time.time()
model_t = forward_operator(spec_t, ctx.points, rtol=1e-11)
bias = model_t - clean
print(f"coarse model at q_true: {time.time()-t0:.1f}s bias RMS={np.sqrt(np.mean(bias**2)):.2e} "
      f"max={np.abs(bias).max():.2e} E_bias={np.mean(bias**2):.2e}")
t0 = time.time()
rec = run_experiment(preset, delta=1e-4, seed=3)
E = [row["E"] for row in rec.trace]
print(f"2D N=32 delta=1e-4: iters={rec.iterations} stopped={rec.stopped_by} "
      f"E={rec.E_final:.2e} thr={10*(1e-4)**2:.1e} linf={rec.linf_err:.3f} wall={time.time()-t0:.0f}s")
print("   E:", [f"{e:.1e}" for e in E[::max(1,len(E)//12)]])
