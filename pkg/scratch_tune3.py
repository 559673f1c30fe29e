import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct

for N, w in ((512, 0.5), (1024, 0.3), (1024, 0.5)):
    preset = get_preset("ex4.1").with_overrides(N=N, mollifier_width=w)
    ctx = ExperimentContext.build(preset)
    ctx.clean_observation()
    for slack in (1e-6, 0.1):
        outs = []
        for seed in (1, 11, 42):
            obs = ctx.observation(1e-7, seed)
            cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                                  max_outer_iter=200, inner_rtol=1e-10,
                                  restart_every=20, accept_slack=slack)
            t0 = time.time()
            res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
            outs.append(f"seed{seed}: k={res.iterations} {res.stopped_by} E={res.E_final:.2e} ({time.time()-t0:.0f}s)")
        print(f"N={N} w={w} slack={slack:g}: " + " | ".join(outs))
