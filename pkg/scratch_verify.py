import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import run_experiment, ExperimentContext

print("== 1D ex4.1 (N=512) ==")
preset = get_preset("ex4.1").with_overrides(N=512)
errs = {}
for delta in (1e-3, 1e-5, 1e-7):
    t0 = time.time()
    rec = run_experiment(preset, delta=delta, seed=11)
    errs[delta] = rec.linf_err
    print(f"delta={delta:g}: iters={rec.iterations} stopped={rec.stopped_by} "
          f"E={rec.E_final:.2e} thr={2*delta**2:.1e} linf={rec.linf_err:.4f} wall={time.time()-t0:.0f}s")
print("strictly increasing:", errs[1e-7] < errs[1e-5] < errs[1e-3])

print("== 2D ex4.4 (N=64) delta=1e-6 alpha=1e-13 ==")
t0 = time.time()
rec = run_experiment("ex4.4", delta=1e-6, seed=3, alpha=1e-13)
E = [row["E"] for row in rec.trace]
print(f"iters={rec.iterations} stopped={rec.stopped_by} E={rec.E_final:.2e} "
      f"thr=1.0e-11 linf={rec.linf_err:.3f} wall={time.time()-t0:.0f}s")
print("E:", [f"{e:.1e}" for e in E[::max(1,len(E)//10)]])
