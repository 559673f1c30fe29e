import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracpot.harness import (ExperimentContext, RunRecord, export_run,
                             export_sweep, gen_noise, run_experiment,
                             stability_sweep, sweep_table)
from fracpot.presets import PRESETS, get_preset
from fracpot.problem import FuncSpec


def test_gen_noise_zero_delta_identity(rng):
    vals = rng.standard_normal(20)
    out = gen_noise(vals, 0.0, 7)
    assert np.array_equal(out, vals)


@given(st.integers(0, 2**32 - 1), st.floats(1e-9, 10.0))
@settings(max_examples=50, deadline=None)
def test_gen_noise_bound_and_determinism(seed, delta):
    vals = np.linspace(-1, 1, 17)
    a = gen_noise(vals, delta, seed)
    b = gen_noise(vals, delta, seed)
    assert np.array_equal(a, b)
    assert np.max(np.abs(a - vals)) <= delta


def test_gen_noise_rejects_negative_delta():
    with pytest.raises(ValueError):
        gen_noise(np.ones(3), -1.0, 0)


# ---------------------------------------------------------------------------
# preset fidelity (golden values of the published studies)


def test_presets_golden():
    p1 = get_preset("ex4.1")
    assert (p1.dim, p1.s, p1.L, p1.R) == (1, 0.4, 1.0, 3.0)
    assert p1.q_true == FuncSpec("sin_pi")
    assert p1.alpha_c == 1.0 and p1.stop_factor == 2.0

    p2 = get_preset("ex4.2")
    assert p2.q_true == FuncSpec("quadratic_plus", (10.0, 0.75))
    assert (p2.s, p2.alpha_c, p2.stop_factor) == (0.4, 1.0, 2.0)

    p3 = get_preset("ex4.3")
    assert p3.q_true == FuncSpec("step", (-0.5, 0.5, 1.0))
    # published run: delta = 1e-7 with alpha = 1e-14 == 1.0 * delta^2
    assert p3.default_delta == 1e-7
    assert p3.alpha_c * p3.default_delta**2 == pytest.approx(1e-14)

    p4 = get_preset("ex4.4")
    assert (p4.dim, p4.s, p4.L, p4.R) == (2, 0.5, 1.0, 3.0)
    assert p4.q_true == FuncSpec("poly_bump_2d", (100.0, 0.75))
    assert p4.alpha_c == 0.1 and p4.stop_factor == 10.0
    # published run: delta = 1e-6 with alpha = 1e-13 == 0.1 * delta^2
    assert p4.alpha_c * (1e-6) ** 2 == pytest.approx(1e-13)


def test_preset_q_true_values():
    p = get_preset("ex4.1")
    g = p.coarse_grid(8)
    x = g.interior_coords()
    assert np.allclose(p.q_true.sample(g, "interior"), np.sin(np.pi * x))
    p4 = get_preset("ex4.4")
    fn = p4.q_true.build(2)
    assert fn(0.0, 0.0) == pytest.approx(100 * 0.75**12)
    assert fn(0.9, 0.0) == 0.0


def test_unknown_preset():
    with pytest.raises(KeyError):
        get_preset("ex9.9")


# ---------------------------------------------------------------------------
# experiment machinery


def test_inverse_crime_guard():
    with pytest.raises(ValueError):
        ExperimentContext(get_preset("ex4.1"), N=64, data_N=64)
    with pytest.raises(ValueError):
        ExperimentContext(get_preset("ex4.1"), N=64, data_N=96)  # not 2x
    ctx = ExperimentContext(get_preset("ex4.1"), N=64, data_N=64,
                            allow_inverse_crime=True)
    assert ctx.fine.N == 64
    with pytest.raises(ValueError):
        # data lattice must contain the coarse one
        ExperimentContext(get_preset("ex4.1"), N=64, data_N=160)


def test_run_experiment_trivial_zero_truth():
    preset = get_preset("ex4.1").with_overrides(
        q_true=FuncSpec("zero"), N=32, max_outer=20)
    rec = run_experiment(preset, delta=0.0, seed=0, alpha=1e-12,
                         data_N=32, allow_inverse_crime=True)
    assert rec.stopped_by == "discrepancy"
    assert rec.iterations == 0
    assert rec.linf_err <= 1e-12


@pytest.mark.slow
def test_run_experiment_smoke_with_noise():
    preset = get_preset("ex4.1").with_overrides(N=64, max_outer=40)
    rec = run_experiment(preset, delta=1e-3, seed=2)
    assert rec.stopped_by in ("discrepancy", "max_iter")
    assert np.isfinite(rec.linf_err) and np.isfinite(rec.l2_err)
    assert len(rec.q_rec) == 63
    assert len(rec.trace) >= 1
    assert rec.config["N"] == 64 and rec.config["data_N"] == 128


def test_determinism_same_seed_same_record():
    preset = get_preset("ex4.1").with_overrides(N=32, max_outer=10)
    a = run_experiment(preset, delta=1e-4, seed=9)
    b = run_experiment(preset, delta=1e-4, seed=9)
    assert a.linf_err == b.linf_err
    assert a.q_rec == b.q_rec
    assert a.E_final == b.E_final


def test_sweep_requires_three_levels():
    with pytest.raises(ValueError):
        stability_sweep("ex4.1", deltas=[1e-5])


@pytest.mark.slow
def test_sweep_rows_sorted_and_complete():
    preset = get_preset("ex4.1").with_overrides(N=32, max_outer=15)
    records = stability_sweep(preset, deltas=[1e-3, 1e-5, 1e-4], seed=3,
                              workers=2)
    ds = [r.delta for r in records]
    assert ds == sorted(ds)
    assert len(records) == 3
    rows = sweep_table(records)
    assert [r["delta"] for r in rows] == sorted(ds)
    assert all(np.isfinite(r["linf_err"]) for r in rows)


# ---------------------------------------------------------------------------
# exports


def _tiny_record():
    preset = get_preset("ex4.1").with_overrides(N=16, max_outer=3)
    return run_experiment(preset, delta=1e-3, seed=1, data_N=32)


def test_run_record_json_round_trip():
    rec = _tiny_record()
    back = RunRecord.from_json(rec.to_json())
    assert back == rec


def test_export_run_csv(tmp_path):
    rec = _tiny_record()
    path = str(tmp_path / "rec.csv")
    export_run(rec, "csv", path)
    lines = open(path).read().strip().splitlines()
    assert lines[0] == "x,q_true,q_rec,abs_err"
    assert len(lines) - 1 == 15  # one row per potential node


def test_export_run_json_round_trip(tmp_path):
    rec = _tiny_record()
    path = str(tmp_path / "rec.json")
    export_run(rec, "json", path)
    back = RunRecord.from_json(open(path).read())
    assert back == rec


def test_export_sweep_csv_sorted(tmp_path):
    recs = [_tiny_record()]
    recs.append(RunRecord(**{**json.loads(recs[0].to_json()), "delta": 1e-2}))
    recs.append(RunRecord(**{**json.loads(recs[0].to_json()), "delta": 1e-4}))
    path = str(tmp_path / "sweep.csv")
    export_sweep(recs, "csv", path)
    lines = open(path).read().strip().splitlines()
    assert lines[0] == "delta,inv_log_delta,linf_err,l2_err,iters,seed"
    deltas = [float(l.split(",")[0]) for l in lines[1:]]
    assert deltas == sorted(deltas)


def test_export_unknown_format(tmp_path):
    rec = _tiny_record()
    with pytest.raises(ValueError):
        export_run(rec, "xml", str(tmp_path / "r.xml"))
