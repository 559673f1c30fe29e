import sys
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct

preset = get_preset("ex4.1").with_overrides(N=512)
ctx = ExperimentContext.build(preset)
ctx.clean_observation()
obs = ctx.observation(1e-7, 42)
cfg = InversionConfig(delta=1e-7, alpha_c=1.0, stop_factor=2.0,
                      max_outer_iter=400, inner_rtol=1e-10, restart_every=20)
res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
E = [t.E for t in res.trace]
print("stopped:", res.stopped_by, "k:", res.iterations, "E:", f"{res.E_final:.3e}")
print("tail E per 10:", [f"{e:.2e}" for e in E[150::10]])
print("last 15:", [f"{e:.3e}" for e in E[-15:]])
