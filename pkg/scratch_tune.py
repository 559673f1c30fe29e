import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.inversion import InversionConfig, cg_reconstruct

preset = get_preset("ex4.1").with_overrides(N=512)
ctx = ExperimentContext.build(preset)
ctx.clean_observation()

for restart in (20, 40, 100):
    for seed in (1, 11, 42):
        obs = ctx.observation(1e-7, seed)
        cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                              max_outer_iter=200, inner_rtol=1e-10,
                              restart_every=restart)
        t0 = time.time()
        res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
        print(f"restart={restart} seed={seed}: iters={res.iterations} "
              f"stopped={res.stopped_by} E={res.E_final:.3e} thr=2.0e-14 "
              f"wall={time.time()-t0:.0f}s")
