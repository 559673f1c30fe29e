import sys
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct

for N in (512, 1024):
    preset = get_preset("ex4.1").with_overrides(N=N)
    ctx = ExperimentContext.build(preset, rtol=1e-13)   # high-precision data
    ctx.clean_observation()
    for rtol_inv in (1e-10, 1e-12):
        outs = []
        for seed in (1, 7, 11, 42, 99):
            obs = ctx.observation(1e-7, seed)
            cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                                  max_outer_iter=200, inner_rtol=rtol_inv,
                                  restart_every=20)
            res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
            outs.append(f"s{seed}:k={res.iterations},{res.stopped_by[:4]},E={res.E_final:.1e}")
        print(f"N={N} data_rtol=1e-13 inv_rtol={rtol_inv:g}:")
        print("   " + " | ".join(outs))
