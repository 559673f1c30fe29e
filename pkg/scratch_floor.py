import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct

preset = get_preset("ex4.1").with_overrides(N=512)
ctx = ExperimentContext.build(preset)
ctx.clean_observation()

# probe: alpha ~ 0 at tight rtol -> floor without regularization drag
for alpha, rtol in ((1e-18, 1e-12), (1e-14, 1e-12), (1e-14, 1e-13)):
    obs = ctx.observation(1e-7, 11)
    cfg = InversionConfig(delta=1e-7, alpha=alpha, stop_factor=2.0,
                          max_outer_iter=200, inner_rtol=rtol, restart_every=20)
    res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
    print(f"alpha={alpha:g} rtol={rtol:g}: k={res.iterations} {res.stopped_by} "
          f"E={res.E_final:.3e}")

# focused seed scan at tighter inner tolerance
for rtol in (1e-11, 1e-12):
    outs = []
    for seed in (1, 7, 11, 42, 99):
        obs = ctx.observation(1e-7, seed)
        cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                              max_outer_iter=200, inner_rtol=rtol,
                              restart_every=20)
        res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
        outs.append(f"s{seed}:k={res.iterations},{res.stopped_by[:4]},E={res.E_final:.2e}")
    print(f"rtol={rtol:g}: " + " | ".join(outs))
