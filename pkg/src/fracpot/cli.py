"""Command-line interface.

Subcommands: ``solve-forward``, ``reconstruct``, ``sweep``,
``dump-stencil``.  Settings merge from, in increasing precedence:
defaults, ``--config`` file (key=value or JSON), ``FRACPOT_*``
environment variables, command-line flags.  On failure the process exits
nonzero after printing a one-line JSON error object to stdout.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

import numpy as np

__all__ = ["main"]

ENV_PREFIX = "FRACPOT_"

_CONFIG_KEYS = ["example", "dim", "s", "gamma", "L", "R", "N", "data_N",
                "q", "f", "g", "delta", "alpha", "alpha_rule", "seed",
                "out", "format", "allow_inverse_crime", "max_iter", "rtol",
                "eps_gap", "deltas", "workers"]


def _parse_func_selector(text: str):
    from .problem import FuncSpec
    if ":" in text:
        kind, rest = text.split(":", 1)
        params = tuple(float(p) for p in rest.split(",") if p.strip())
    else:
        kind, params = text, ()
    return FuncSpec(kind.strip(), params)


def _parse_alpha_rule(text: str) -> float:
    """'c*delta^2' with a numeric prefix, e.g. '0.1*delta^2'."""
    t = text.replace(" ", "").lower()
    for suffix in ("*delta^2", "*delta**2", "*d^2"):
        if t.endswith(suffix):
            head = t[:-len(suffix)]
            return float(head) if head else 1.0
    raise ValueError(f"cannot parse alpha rule {text!r}; expected "
                     f"'<c>*delta^2'")


def _load_config(path: str) -> dict:
    from .problem import parse_config_text
    with open(path) as fh:
        text = fh.read()
    stripped = text.lstrip()
    if stripped.startswith("{"):
        return json.loads(text)
    return parse_config_text(text)


def _merged_settings(args: argparse.Namespace) -> dict:
    cfg: dict = {}
    if getattr(args, "config", None):
        cfg.update(_load_config(args.config))
    for key in _CONFIG_KEYS:
        env = os.environ.get(ENV_PREFIX + key.upper())
        if env is not None:
            cfg[key] = env
    for key in _CONFIG_KEYS:
        val = getattr(args, key, None)
        if val is not None:
            cfg[key] = val
    return cfg


def _as_float(cfg, key, default=None):
    v = cfg.get(key, default)
    return None if v is None else float(v)


def _as_int(cfg, key, default=None):
    v = cfg.get(key, default)
    return None if v is None else int(v)


def _as_bool(cfg, key, default=False):
    v = cfg.get(key, default)
    if isinstance(v, bool):
        return v
    return str(v).lower() in ("1", "true", "yes", "on")


def _cmd_solve_forward(cfg: dict) -> int:
    from .forward import ForwardProblem, solve_forward
    from .grids import make_grid
    from .presets import get_preset
    from .problem import Field, FuncSpec, ProblemSpec, RingWindow

    out_dir = cfg.get("out", ".")
    fmt = cfg.get("format", "csv")
    if "example" in cfg:
        preset = get_preset(cfg["example"])
        N = _as_int(cfg, "N") or preset.N
        grid = preset.coarse_grid(N)
        W1, W2 = preset.windows(grid, _as_float(cfg, "eps_gap"))
        spec = ProblemSpec(
            s=_as_float(cfg, "s") or preset.s,
            gamma=_as_float(cfg, "gamma") or preset.gamma, grid=grid,
            q=Field.from_interior(grid, preset.q_true.sample(grid, "interior")),
            f=preset.exterior_datum(grid, _as_float(cfg, "eps_gap")),
            g=FuncSpec("zero"), W1=W1, W2=W2)
    else:
        dim = _as_int(cfg, "dim", 1)
        grid = make_grid(dim, _as_float(cfg, "L", 1.0), _as_float(cfg, "R", 3.0),
                         _as_int(cfg, "N", 128))
        win = RingWindow(grid.L + grid.h, grid.R)
        qspec = _parse_func_selector(cfg.get("q", "zero"))
        spec = ProblemSpec(
            s=_as_float(cfg, "s", 0.5), gamma=_as_float(cfg, "gamma", 2.0),
            grid=grid,
            q=Field.from_interior(grid, qspec.sample(grid, "interior")),
            f=_parse_func_selector(cfg.get("f", "zero")),
            g=_parse_func_selector(cfg.get("g", "zero")),
            W1=win, W2=win)
    rtol = _as_float(cfg, "rtol", 1e-10)
    fp = ForwardProblem.for_spec(spec)
    sol = solve_forward(spec, rtol=rtol, fp=fp)
    os.makedirs(out_dir, exist_ok=True)
    u = sol.u.interior().ravel()
    xi = grid.interior_coords()
    meta = {"iterations": sol.report.iterations, "method": sol.report.method,
            "final_residual": sol.report.final_residual,
            "forcing_eps": fp.forcing.eps_r, "N": grid.N, "dim": grid.dim}
    if fmt == "csv":
        import csv as _csv
        path = os.path.join(out_dir, "forward_solution.csv")
        with open(path, "w", newline="") as fh:
            wr = _csv.writer(fh)
            if grid.dim == 1:
                wr.writerow(["x", "u"])
                for x, v in zip(xi, u):
                    wr.writerow([repr(float(x)), repr(float(v))])
            else:
                wr.writerow(["x", "y", "u"])
                X, Y = np.meshgrid(xi, xi, indexing="ij")
                for x, y, v in zip(X.ravel(), Y.ravel(), u):
                    wr.writerow([repr(float(x)), repr(float(y)), repr(float(v))])
        with open(os.path.join(out_dir, "forward_meta.json"), "w") as fh:
            json.dump(meta, fh, indent=1)
    else:
        path = os.path.join(out_dir, "forward_solution.json")
        payload = dict(meta)
        payload["x"] = xi.tolist()
        payload["u"] = u.tolist()
        with open(path, "w") as fh:
            json.dump(payload, fh, indent=1)
    print(json.dumps({"ok": True, "output": path, **meta}))
    return 0


def _run_kwargs(cfg: dict) -> dict:
    alpha = _as_float(cfg, "alpha")
    alpha_c = None
    if "alpha_rule" in cfg and cfg["alpha_rule"]:
        alpha_c = _parse_alpha_rule(str(cfg["alpha_rule"]))
    return dict(delta=_as_float(cfg, "delta"), seed=_as_int(cfg, "seed", 0),
                N=_as_int(cfg, "N"), data_N=_as_int(cfg, "data_N"),
                alpha=alpha, alpha_c=alpha_c,
                max_iter=_as_int(cfg, "max_iter"),
                rtol=_as_float(cfg, "rtol", 1e-10),
                allow_inverse_crime=_as_bool(cfg, "allow_inverse_crime"),
                eps_gap=_as_float(cfg, "eps_gap"))


def _cmd_reconstruct(cfg: dict) -> int:
    from .harness import export_run, run_experiment
    preset_id = cfg.get("example")
    if not preset_id:
        raise ValueError("reconstruct requires --example")
    record = run_experiment(preset_id, **_run_kwargs(cfg))
    out_dir = cfg.get("out", ".")
    fmt = cfg.get("format", "csv")
    ext = "csv" if fmt == "csv" else "json"
    path = os.path.join(out_dir, f"reconstruction_{preset_id}_"
                                 f"d{record.delta:g}_s{record.seed}.{ext}")
    record.outputs = export_run(record, fmt, path)
    print(json.dumps({"ok": True, "output": path, "preset": record.preset,
                      "delta": record.delta, "alpha": record.alpha,
                      "linf_err": record.linf_err, "l2_err": record.l2_err,
                      "iterations": record.iterations,
                      "stopped_by": record.stopped_by}))
    return 0


def _cmd_sweep(cfg: dict) -> int:
    from .harness import export_sweep, stability_sweep
    preset_id = cfg.get("example")
    if not preset_id:
        raise ValueError("sweep requires --example")
    deltas = None
    if cfg.get("deltas"):
        deltas = [float(d) for d in str(cfg["deltas"]).split(",") if d.strip()]
    kw = _run_kwargs(cfg)
    kw.pop("delta", None)
    alpha_c = kw.pop("alpha_c", None)
    kw.pop("alpha", None)
    records = stability_sweep(preset_id, deltas=deltas,
                              seed=kw.pop("seed", 0), alpha_c=alpha_c,
                              workers=_as_int(cfg, "workers", 1) or 1, **kw)
    out_dir = cfg.get("out", ".")
    fmt = cfg.get("format", "csv")
    ext = "csv" if fmt == "csv" else "json"
    path = os.path.join(out_dir, f"sweep_{preset_id}.{ext}")
    export_sweep(records, fmt, path)
    print(json.dumps({"ok": True, "output": path,
                      "rows": [{"delta": r.delta, "linf_err": r.linf_err,
                                "iterations": r.iterations,
                                "stopped_by": r.stopped_by}
                               for r in records]}))
    return 0


def _cmd_dump_stencil(cfg: dict) -> int:
    from .stencil import build_symbol, dump_symbol
    dim = _as_int(cfg, "dim", 1)
    s = _as_float(cfg, "s", 0.5)
    gamma = _as_float(cfg, "gamma", 2.0)
    L = _as_float(cfg, "L", 1.0)
    R = _as_float(cfg, "R", 3.0)
    N = _as_int(cfg, "N", 64)
    out_dir = cfg.get("out", ".")
    os.makedirs(out_dir, exist_ok=True)
    path = os.path.join(out_dir, f"stencil_d{dim}_s{s:g}_g{gamma:g}_N{N}.npz")
    sym = build_symbol(dim, s, gamma, L, R, N)
    dump_symbol(sym, path)
    print(json.dumps({"ok": True, "output": path, "dim": dim, "s": s,
                      "gamma": gamma, "N": N}))
    return 0


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="fracpot",
        description="Forward solves and potential reconstruction for the "
                    "fractional Schrodinger operator with exterior data.")
    sub = ap.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="key=value or JSON settings file")
        p.add_argument("--example", help="preset id (ex4.1 .. ex4.4)")
        p.add_argument("--N", type=int)
        p.add_argument("--data-N", dest="data_N", type=int)
        p.add_argument("--s", type=float)
        p.add_argument("--gamma", type=float)
        p.add_argument("--delta", type=float)
        p.add_argument("--alpha", type=float)
        p.add_argument("--alpha-rule", dest="alpha_rule",
                       help="regularization rule, e.g. '0.1*delta^2'")
        p.add_argument("--seed", type=int)
        p.add_argument("--out", help="output directory")
        p.add_argument("--format", choices=["csv", "json"])
        p.add_argument("--allow-inverse-crime", dest="allow_inverse_crime",
                       action="store_const", const=True, default=None)
        p.add_argument("--max-iter", dest="max_iter", type=int)
        p.add_argument("--rtol", type=float)
        p.add_argument("--eps-gap", dest="eps_gap", type=float)

    p_fwd = sub.add_parser("solve-forward", help="solve one forward problem")
    add_common(p_fwd)
    p_fwd.add_argument("--dim", type=int)
    p_fwd.add_argument("--L", type=float)
    p_fwd.add_argument("--R", type=float)
    p_fwd.add_argument("--q", help="potential selector, e.g. sin_pi")
    p_fwd.add_argument("--f", help="exterior datum selector")
    p_fwd.add_argument("--g", help="source selector")

    p_rec = sub.add_parser("reconstruct", help="reconstruct a preset potential")
    add_common(p_rec)

    p_swp = sub.add_parser("sweep", help="stability sweep over noise levels")
    add_common(p_swp)
    p_swp.add_argument("--deltas", help="comma-separated noise levels")
    p_swp.add_argument("--workers", type=int)

    p_dmp = sub.add_parser("dump-stencil", help="cache stencil weights to disk")
    add_common(p_dmp)
    p_dmp.add_argument("--dim", type=int)
    p_dmp.add_argument("--L", type=float)
    p_dmp.add_argument("--R", type=float)
    return ap


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        cfg = _merged_settings(args)
        if args.command == "solve-forward":
            return _cmd_solve_forward(cfg)
        if args.command == "reconstruct":
            return _cmd_reconstruct(cfg)
        if args.command == "sweep":
            return _cmd_sweep(cfg)
        if args.command == "dump-stencil":
            return _cmd_dump_stencil(cfg)
        raise ValueError(f"unknown command {args.command!r}")
    except Exception as exc:
        print(json.dumps({"ok": False, "error": str(exc),
                          "type": type(exc).__name__}))
        return 1


if __name__ == "__main__":
    sys.exit(main())
