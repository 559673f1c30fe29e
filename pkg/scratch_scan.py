import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment

for eps in (0.2, 0.4):
    for N in (256, 512):
        preset = get_preset("ex4.1").with_overrides(N=N, max_outer=200)
        t0 = time.time()
        rec = run_experiment(preset, delta=1e-7, seed=1, eps_gap=eps)
        E = [row["E"] for row in rec.trace]
        print(f"eps={eps} N={N}: E_final={rec.E_final:.2e} thr=2.0e-14 "
              f"iters={rec.iterations} stopped={rec.stopped_by} linf={rec.linf_err:.3f} "
              f"E[50]={E[min(50,len(E)-1)]:.1e} E[100]={E[min(100,len(E)-1)]:.1e} wall={time.time()-t0:.0f}s")
