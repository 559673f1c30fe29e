import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.forward import ForwardProblem, forward_operator

def bias_for(N, eps):
    preset = get_preset("ex4.1").with_overrides(N=N)
    ctx = ExperimentContext.build(preset, eps_gap=eps)
    clean = ctx.clean_observation()
    spec_t = ctx.spec_coarse0.with_potential(ctx.q_true_coarse)
    fp_c = ForwardProblem.for_spec(spec_t, f_feature=0.5 * preset.mollifier_width)
    model_t = forward_operator(spec_t, ctx.points, rtol=1e-12, fp=fp_c)
    bias = model_t - clean
    print(f"N={N} eps={eps}: npts={len(clean)} bias RMS={np.sqrt(np.mean(bias**2)):.3e} "
          f"max={np.abs(bias).max():.3e} E_bias={np.mean(bias**2):.3e}")

for eps in (0.1, 0.2):
    for N in (64, 128, 256):
        bias_for(N, eps)

# CG runs at N=256, eps=0.2
for delta in (1e-5, 1e-7):
    preset = get_preset("ex4.1").with_overrides(N=256, max_outer=200)
    t0 = time.time()
    rec = run_experiment(preset, delta=delta, seed=1, eps_gap=0.2)
    E = [row["E"] for row in rec.trace]
    ks = [row["k"] for row in rec.trace]
    sel = list(range(0, len(E), max(1, len(E)//10))) + [len(E)-1]
    print(f"delta={delta:g}: stopped={rec.stopped_by} iters={rec.iterations} "
          f"E_final={rec.E_final:.2e} thr={2*delta**2:.2e} linf={rec.linf_err:.3f} "
          f"wall={time.time()-t0:.0f}s")
    print("   E:", [(ks[i], f"{E[i]:.2e}") for i in sel])
