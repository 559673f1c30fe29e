"""Experiment driver: synthetic data, noise, reconstruction runs, exports.

Synthetic observations are always generated on a strictly finer grid than
the inversion grid (factor >= 2) so the reconstruction never inverts its
own discretization; disabling that guard is an explicit opt-in.  Runs are
reproducible: the noise vector is a pure function of (values, delta,
seed), and sweep rows derive their seeds from the root seed by documented
seed-sequence splitting.
"""

from __future__ import annotations

import csv
import json
import os
import subprocess
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np

from .forward import ForwardProblem, forward_operator
from .grids import discrete_norm
from .inversion import InversionConfig, InversionResult, cg_reconstruct
from .presets import ExperimentPreset, get_preset
from .problem import Field, FuncSpec, Observation, ProblemSpec
from .stencil import DEFAULT_QUAD_TOL

__all__ = ["gen_noise", "ExperimentContext", "RunRecord", "run_experiment",
           "stability_sweep", "export_run", "export_sweep", "git_hash"]


def gen_noise(values: np.ndarray, delta: float, seed: int) -> np.ndarray:
    """Add i.i.d. uniform(-delta, delta) noise from a seeded generator."""
    if delta < 0:
        raise ValueError("delta must be non-negative")
    values = np.asarray(values, dtype=float)
    if delta == 0.0:
        return values.copy()
    rng = np.random.default_rng(seed)
    return values + delta * (2.0 * rng.random(values.shape) - 1.0)


def git_hash() -> str:
    try:
        out = subprocess.run(["git", "rev-parse", "HEAD"], capture_output=True,
                             text=True, timeout=5,
                             cwd=os.path.dirname(os.path.abspath(__file__)))
        if out.returncode == 0:
            return out.stdout.strip()
    except Exception:
        pass
    return "unknown"


class ExperimentContext:
    """Shared, potential-independent state for one preset configuration.

    Holds both grids, the window points, and the clean (noise-free)
    observation; sweeps over noise levels reuse all of it.
    """

    _cache: dict[tuple, "ExperimentContext"] = {}
    _lock = threading.Lock()

    def __init__(self, preset: ExperimentPreset, N: int | None = None,
                 data_N: int | None = None, allow_inverse_crime: bool = False,
                 eps_gap: float | None = None, rtol: float = 1e-10):
        N = N or preset.N
        data_N = data_N or preset.data_factor * N
        if not allow_inverse_crime:
            if data_N < 2 * N:
                raise ValueError(
                    f"data grid must be at least twice as fine as the "
                    f"inversion grid (data_N={data_N}, N={N}); pass "
                    f"allow_inverse_crime=True to override")
        if data_N % N != 0:
            raise ValueError("data_N must be an integer multiple of N so "
                             "observation points live on both lattices")
        self.preset = preset
        self.N = N
        self.data_N = data_N
        self.rtol = rtol
        self.coarse = preset.coarse_grid(N)
        self.fine = preset.fine_grid(N, data_N)
        eps = preset.resolve_gap(self.coarse, eps_gap)
        self.eps_gap = eps
        self.W1, self.W2 = preset.windows(self.coarse, eps)
        self.f = preset.exterior_datum(self.coarse, eps)
        self.points = self.W2.lattice_points(self.coarse)
        self.q_true_coarse = preset.q_true.sample(self.coarse, "interior")
        self.q_true_fine = preset.q_true.sample(self.fine, "interior")
        gzero = FuncSpec("zero")
        self.spec_coarse0 = ProblemSpec(
            s=preset.s, gamma=preset.gamma, grid=self.coarse,
            q=Field.zeros(self.coarse), f=self.f, g=gzero,
            W1=self.W1, W2=self.W2, eps_gap=eps)
        self.spec_fine_true = ProblemSpec(
            s=preset.s, gamma=preset.gamma, grid=self.fine,
            q=Field.from_interior(self.fine, self.q_true_fine),
            f=self.f, g=gzero, W1=self.W1, W2=self.W2, eps_gap=eps)
        self._clean: np.ndarray | None = None
        self._clean_lock = threading.Lock()

    @classmethod
    def build(cls, preset: ExperimentPreset, **kw) -> "ExperimentContext":
        key = (preset, kw.get("N"), kw.get("data_N"),
               kw.get("allow_inverse_crime", False), kw.get("eps_gap"),
               kw.get("rtol", 1e-10))
        with cls._lock:
            hit = cls._cache.get(key)
        if hit is not None:
            return hit
        ctx = cls(preset, **kw)
        with cls._lock:
            cls._cache[key] = ctx
        return ctx

    def clean_observation(self) -> np.ndarray:
        with self._clean_lock:
            if self._clean is None:
                fp = ForwardProblem.for_spec(self.spec_fine_true)
                self._clean = forward_operator(self.spec_fine_true,
                                               self.points, rtol=self.rtol,
                                               fp=fp)
            return self._clean

    def observation(self, delta: float, seed: int) -> Observation:
        noisy = gen_noise(self.clean_observation(), delta, seed)
        return Observation(self.points, noisy, delta, seed)


@dataclass
class RunRecord:
    """Reproducible summary of one reconstruction run (JSON-native)."""

    preset: str
    seed: int
    delta: float
    alpha: float
    dim: int
    N: int
    data_N: int
    linf_err: float
    l2_err: float
    iterations: int
    stopped_by: str
    E_final: float
    wall_time: float
    inner_iters_total: int
    x: list = field(default_factory=list)
    y: list = field(default_factory=list)
    q_true: list = field(default_factory=list)
    q_rec: list = field(default_factory=list)
    trace: list = field(default_factory=list)
    config: dict = field(default_factory=dict)
    git: str = ""
    outputs: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), indent=1)

    @staticmethod
    def from_json(text: str) -> "RunRecord":
        return RunRecord(**json.loads(text))


def run_experiment(preset: ExperimentPreset | str, delta: float | None = None,
                   seed: int = 0, N: int | None = None,
                   data_N: int | None = None, alpha: float | None = None,
                   alpha_c: float | None = None, max_iter: int | None = None,
                   rtol: float = 1e-10, allow_inverse_crime: bool = False,
                   eps_gap: float | None = None,
                   ctx: ExperimentContext | None = None) -> RunRecord:
    """Generate data, reconstruct, and record errors for one configuration."""
    if isinstance(preset, str):
        preset = get_preset(preset)
    if delta is None:
        delta = preset.default_delta
    if ctx is None:
        ctx = ExperimentContext.build(preset, N=N, data_N=data_N,
                                      allow_inverse_crime=allow_inverse_crime,
                                      eps_gap=eps_gap, rtol=rtol)
    t0 = time.monotonic()
    obs = ctx.observation(delta, seed)
    config = InversionConfig(
        delta=delta, alpha=alpha,
        alpha_c=alpha_c if alpha_c is not None else preset.alpha_c,
        stop_factor=preset.stop_factor,
        max_outer_iter=max_iter if max_iter is not None else preset.max_outer,
        inner_rtol=rtol)
    result: InversionResult = cg_reconstruct(ctx.spec_coarse0, obs, config)
    wall = time.monotonic() - t0

    qt = ctx.q_true_coarse.ravel()
    qr = result.q
    diff = qr - qt
    grid = ctx.coarse
    linf = discrete_norm(diff, "Linf", grid.h, grid.dim)
    l2 = discrete_norm(diff, "L2", grid.h, grid.dim)

    xi = grid.interior_coords()
    if grid.dim == 1:
        xs, ys = xi.tolist(), []
    else:
        X, Y = np.meshgrid(xi, xi, indexing="ij")
        xs, ys = X.ravel().tolist(), Y.ravel().tolist()

    return RunRecord(
        preset=preset.id, seed=seed, delta=delta,
        alpha=config.resolved_alpha(), dim=grid.dim, N=ctx.N,
        data_N=ctx.data_N, linf_err=linf, l2_err=l2,
        iterations=result.iterations, stopped_by=result.stopped_by,
        E_final=result.E_final, wall_time=wall,
        inner_iters_total=int(sum(t.inner_iters for t in result.trace)),
        x=xs, y=ys, q_true=qt.tolist(), q_rec=qr.tolist(),
        trace=[{k: (float(v) if isinstance(v, (int, float, np.floating))
                    and k != "k" and k != "inner_iters" else v)
                for k, v in row.items()}
               for row in result.trace_rows()],
        config={"delta": delta, "alpha": config.resolved_alpha(),
                "alpha_c": config.alpha_c, "stop_factor": config.stop_factor,
                "max_outer_iter": config.max_outer_iter,
                "inner_rtol": config.inner_rtol, "N": ctx.N,
                "data_N": ctx.data_N, "seed": seed, "eps_gap": ctx.eps_gap},
        git=git_hash())


def stability_sweep(preset: ExperimentPreset | str,
                    deltas: list[float] | None = None, seed: int = 0,
                    alpha_c: float | None = None, workers: int = 1,
                    **run_kw) -> list[RunRecord]:
    """Reconstruction error across noise levels (one row per delta/seed).

    Rows run in a thread pool over shared immutable context; failures are
    recorded per row and do not abort the sweep.  Row seeds derive from
    the root seed by seed-sequence splitting, and the result is sorted by
    delta ascending.
    """
    if isinstance(preset, str):
        preset = get_preset(preset)
    if deltas is None:
        deltas = list(preset.sweep_deltas)
    if len(deltas) < 3:
        raise ValueError("a stability sweep needs at least 3 noise levels")
    ctx = ExperimentContext.build(preset, N=run_kw.pop("N", None),
                                  data_N=run_kw.pop("data_N", None),
                                  allow_inverse_crime=run_kw.pop(
                                      "allow_inverse_crime", False),
                                  eps_gap=run_kw.pop("eps_gap", None),
                                  rtol=run_kw.get("rtol", 1e-10))
    ctx.clean_observation()  # materialize once before the pool starts
    row_seeds = [int(s.generate_state(1)[0])
                 for s in np.random.SeedSequence(seed).spawn(len(deltas))]

    def one(i: int) -> RunRecord | Exception:
        try:
            return run_experiment(preset, delta=deltas[i], seed=row_seeds[i],
                                  alpha_c=alpha_c, ctx=ctx, **run_kw)
        except Exception as exc:  # keep the sweep alive
            return exc

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(one, range(len(deltas))))
    else:
        rows = [one(i) for i in range(len(deltas))]
    records = [r for r in rows if isinstance(r, RunRecord)]
    failures = [(deltas[i], r) for i, r in enumerate(rows)
                if not isinstance(r, RunRecord)]
    for d, exc in failures:
        records.append(RunRecord(
            preset=preset.id, seed=seed, delta=d, alpha=float("nan"),
            dim=preset.dim, N=ctx.N, data_N=ctx.data_N,
            linf_err=float("nan"), l2_err=float("nan"), iterations=0,
            stopped_by=f"error: {exc}", E_final=float("nan"), wall_time=0.0,
            inner_iters_total=0, git=git_hash()))
    records.sort(key=lambda r: r.delta)
    return records


# -- exports -------------------------------------------------------------------

def export_run(record: RunRecord, fmt: str, path: str) -> list[str]:
    """Reconstruction export; CSV rows cover every potential node."""
    written = []
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            wr = csv.writer(fh)
            if record.dim == 1:
                wr.writerow(["x", "q_true", "q_rec", "abs_err"])
                for x, qt, qr in zip(record.x, record.q_true, record.q_rec):
                    wr.writerow([repr(x), repr(qt), repr(qr), repr(abs(qr - qt))])
            else:
                wr.writerow(["x", "y", "q_true", "q_rec", "abs_err"])
                for x, y, qt, qr in zip(record.x, record.y, record.q_true,
                                        record.q_rec):
                    wr.writerow([repr(x), repr(y), repr(qt), repr(qr),
                                 repr(abs(qr - qt))])
        written.append(path)
    elif fmt == "json":
        with open(path, "w") as fh:
            fh.write(record.to_json())
        written.append(path)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return written


SWEEP_COLUMNS = ["delta", "inv_log_delta", "linf_err", "l2_err", "iters", "seed"]


def sweep_table(records: list[RunRecord]) -> list[dict]:
    rows = []
    for r in sorted(records, key=lambda r: r.delta):
        rows.append({"delta": r.delta,
                     "inv_log_delta": 1.0 / abs(np.log(r.delta)),
                     "linf_err": r.linf_err, "l2_err": r.l2_err,
                     "iters": r.iterations, "seed": r.seed})
    return rows


def export_sweep(records: list[RunRecord], fmt: str, path: str) -> list[str]:
    rows = sweep_table(records)
    os.makedirs(os.path.dirname(path) or ".", exist_ok=True)
    if fmt == "csv":
        with open(path, "w", newline="") as fh:
            wr = csv.DictWriter(fh, fieldnames=SWEEP_COLUMNS)
            wr.writeheader()
            for row in rows:
                wr.writerow({k: repr(v) if isinstance(v, float) else v
                             for k, v in row.items()})
    elif fmt == "json":
        payload = {"rows": rows, "git": git_hash(),
                   "preset": records[0].preset if records else None}
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    return [path]
