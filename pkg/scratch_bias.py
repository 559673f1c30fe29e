import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.forward import ForwardProblem, forward_operator
from fracpot.inversion import InversionConfig, cg_reconstruct

for N in (64, 128):
    preset = get_preset("ex4.1").with_overrides(N=N)
    ctx = ExperimentContext.build(preset)
    clean = ctx.clean_observation()
    # model value at q_true on the coarse grid
    spec_t = ctx.spec_coarse0.with_potential(ctx.q_true_coarse)
    fp_c = ForwardProblem.for_spec(spec_t, f_feature=0.5 * preset.mollifier_width)
    model_t = forward_operator(spec_t, ctx.points, rtol=1e-12, fp=fp_c)
    bias = model_t - clean
    print(f"N={N}: bias RMS={np.sqrt(np.mean(bias**2)):.3e} max={np.abs(bias).max():.3e} "
          f"E_bias={np.mean(bias**2):.3e}  clean scale={np.abs(clean).max():.3e}")

# long run at N=64, delta=1e-4, watch E trajectory
preset = get_preset("ex4.1").with_overrides(N=64, max_outer=1500)
t0 = time.time()
rec = run_experiment(preset, delta=1e-4, seed=1)
E = [row["E"] for row in rec.trace]
ks = [row["k"] for row in rec.trace]
sel = list(range(0, len(E), max(1, len(E)//15))) + [len(E)-1]
print("E trajectory:", [(ks[i], f"{E[i]:.2e}") for i in sel])
print(f"iters={rec.iterations} stopped={rec.stopped_by} linf={rec.linf_err:.3f} wall={time.time()-t0:.0f}s")
