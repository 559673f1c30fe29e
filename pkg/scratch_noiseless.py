import sys
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext
from fracpot.inversion import InversionConfig, cg_reconstruct
from fracpot.forward import ForwardProblem, forward_operator
from fracpot.problem import Observation

for N in (512, 1024):
    preset = get_preset("ex4.1").with_overrides(N=N)
    ctx = ExperimentContext.build(preset)
    clean = ctx.clean_observation()
    spec_t = ctx.spec_coarse0.with_potential(ctx.q_true_coarse)
    model_t = forward_operator(spec_t, ctx.points, rtol=1e-12)
    bias = model_t - clean
    print(f"N={N}: raw E_bias={np.mean(bias**2):.2e}")
    obs = Observation(ctx.points, clean, 0.0, None)  # noise-free data
    cfg = InversionConfig(delta=0.0, alpha=1e-14, max_outer_iter=200,
                          inner_rtol=1e-10, restart_every=20,
                          noiseless_floor_factor=1e-3)  # unreachable floor
    res = cg_reconstruct(ctx.spec_coarse0, obs, cfg)
    E = [t.E for t in res.trace]
    print(f"   noise-free grind: E@50={E[min(50,len(E)-1)]:.2e} E@100={E[min(100,len(E)-1)]:.2e} "
          f"E@150={E[min(150,len(E)-1)]:.2e} E@200={res.E_final:.2e}")
