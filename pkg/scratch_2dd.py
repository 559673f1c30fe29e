import sys, time
sys.path.insert(0, "src")
import numpy as np
from fracpot.presets import get_preset
from fracpot.harness import ExperimentContext, run_experiment
from fracpot.forward import ForwardProblem, forward_operator

def diag(eps, width, alpha=None, label=""):
    preset = get_preset("ex4.4").with_overrides(mollifier_width=width)
    ctx = ExperimentContext.build(preset, eps_gap=eps)
    clean = ctx.clean_observation()
    spec_t = ctx.spec_coarse0.with_potential(ctx.q_true_coarse)
    model_t = forward_operator(spec_t, ctx.points, rtol=1e-11)
    bias = model_t - clean
    print(f"[{label}] eps={eps} w={width}: E_bias={np.mean(bias**2):.2e} "
          f"RMS={np.sqrt(np.mean(bias**2)):.2e} max={np.abs(bias).max():.2e}")
    t0 = time.time()
    rec = run_experiment(preset, delta=1e-6, seed=3, eps_gap=eps, alpha=alpha)
    E = [row["E"] for row in rec.trace]
    print(f"   run: iters={rec.iterations} stopped={rec.stopped_by} E={rec.E_final:.2e} "
          f"thr=1.0e-11 linf={rec.linf_err:.3f} wall={time.time()-t0:.0f}s")
    print("   E:", [f"{e:.1e}" for e in E[::max(1,len(E)//12)]])

diag(0.4, 0.3, alpha=1e-15, label="alpha-free probe")
diag(0.6, 0.3, label="bigger gap")
diag(0.4, 0.5, label="wider mollifier")
