import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment

preset = get_preset("ex4.4")   # N=64, data 128, stop 10, alpha_c 0.1, max 100
t0 = time.time()
ctx = ExperimentContext.build(preset)
clean = ctx.clean_observation()
print(f"clean obs: {time.time()-t0:.0f}s npts={ctx.points.shape[0]} scale={np.abs(clean).max():.3f}")
t0 = time.time()
rec = run_experiment(preset, delta=1e-6, seed=3)
E = [row["E"] for row in rec.trace]
print(f"ex4.4 delta=1e-6: iters={rec.iterations} stopped={rec.stopped_by} "
      f"E={rec.E_final:.2e} thr={10*(1e-6)**2:.1e} linf={rec.linf_err:.3f} wall={time.time()-t0:.0f}s")
print("   E:", [f"{e:.1e}" for e in E[::max(1,len(E)//15)]])
