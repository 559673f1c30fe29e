import sys
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct

preset = get_preset("ex4.1").with_overrides(N=512)
ctx = ExperimentContext.build(preset)
ctx.clean_observation()
for restart in (8, 10, 15):
    outs = []
    for seed in (1, 7, 11, 42, 99):
        obs = ctx.observation(1e-7, seed)
        cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                              max_outer_iter=200, inner_rtol=1e-10,
                              restart_every=restart)
        res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
        outs.append(f"s{seed}:k={res.iterations},{res.stopped_by[:4]}")
    print(f"restart={restart}: " + " | ".join(outs))
