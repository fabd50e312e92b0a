import csv
import json

import numpy as np
import pytest

import softarm_rc.sweep as sweep_mod
from softarm_rc.arm import ArmParams
from softarm_rc.errors import ContractError, SchemaError
from softarm_rc.harness import PhaseSplit, run_trial
from softarm_rc.sweep import (SweepGrid, aggregate, evaluate_trial, read_raw_csv, read_summary_csv,
                              run_sweep, trial_config, trial_seed)

SPLIT = PhaseSplit(60, 300, 300)


def delay_grid(**kw):
    base = dict(amplitudes=(1.0, 2.0), taus=(0.5, 1.0), trials=3, narma_orders=(2, 5),
                degrees=(1, 2), max_delay=6, split=SPLIT, backend="delay", delay=2)
    base.update(kw)
    return SweepGrid(**base)


def test_aggregate_examples():
    assert aggregate([0.4]) == (0.4, 0.0)
    mean, std = aggregate([0.1, 0.3])
    assert mean == pytest.approx(0.2, abs=1e-15)
    assert std == pytest.approx(0.1, abs=1e-15)
    with pytest.raises(ContractError):
        aggregate([])


def test_grid_validation():
    with pytest.raises(ContractError):
        SweepGrid(amplitudes=())
    with pytest.raises(ContractError):
        SweepGrid(trials=0)
    with pytest.raises(ContractError):
        SweepGrid(narma_orders=(1,))
    grid = SweepGrid(amplitudes=[1, 2], taus=[1])
    assert grid.amplitudes == (1.0, 2.0)
    assert grid.tasks()[:2] == ["narma2", "narma3"]


def test_default_grid_is_full_size():
    grid = SweepGrid()
    assert grid.amplitudes == (1, 2, 3, 4, 5, 6)
    assert grid.taus == (0.125, 0.25, 0.5, 1, 2, 3, 4)
    assert grid.trials == 20
    assert grid.split.total == 5000


def test_child_seeds_are_unique():
    seeds = {trial_seed(0, a, t, k) for a in range(6) for t in range(7) for k in range(20)}
    assert len(seeds) == 6 * 7 * 20


def test_single_cell_equals_direct_trial():
    grid = delay_grid(amplitudes=(2.0,), taus=(1.0,), trials=1)
    result = run_sweep(grid)
    direct = evaluate_trial(run_trial(trial_config(grid, ArmParams(), 0, 0, 0)), grid)
    assert [r[3:] for r in result.raw] == [tuple(r) for r in direct]
    assert all(r[:3] == (2.0, 1.0, 0) for r in result.raw)
    for task, metric, value in direct:
        assert result.summary[(2.0, 1.0, task, metric)] == (value, 0.0, 1)


def test_one_simulation_per_trial(monkeypatch):
    calls = []
    real = sweep_mod.run_trial

    def counting(config):
        calls.append(config)
        return real(config)

    monkeypatch.setattr(sweep_mod, "run_trial", counting)
    grid = delay_grid()
    run_sweep(grid)
    assert len(calls) == 2 * 2 * 3


def test_rows_cover_every_task_and_metric():
    grid = delay_grid(amplitudes=(1.0,), taus=(1.0,), trials=1)
    rows = run_sweep(grid).raw
    keys = {(r[3], r[4]) for r in rows}
    assert ("narma5", "nmse") in keys and ("narma5", "nmse_train") in keys
    assert ("legendre2", "capacity") in keys
    assert {("legendre1", f"mf_{d}") for d in range(7)} <= keys
    assert len(rows) == 2 * 2 + 2 * (7 + 1)


def test_outputs_are_deterministic(tmp_path):
    grid = delay_grid()
    run_sweep(grid, out_dir=tmp_path / "a")
    run_sweep(grid, out_dir=tmp_path / "b")
    for name in ("raw.csv", "summary.csv", "summary.json", "config.json", "failures.csv"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_parallel_matches_sequential(tmp_path):
    grid = delay_grid(trials=2)
    run_sweep(grid, out_dir=tmp_path / "seq")
    run_sweep(grid, out_dir=tmp_path / "par", workers=2)
    for name in ("raw.csv", "summary.csv"):
        assert (tmp_path / "seq" / name).read_bytes() == (tmp_path / "par" / name).read_bytes()


def test_summary_recomputes_from_raw_csv(tmp_path):
    run_sweep(delay_grid(), out_dir=tmp_path)
    raw = read_raw_csv(tmp_path / "raw.csv")
    summary = read_summary_csv(tmp_path / "summary.csv")
    groups = {}
    for A, tau, _, task, metric, value in raw:
        groups.setdefault((A, tau, task, metric), []).append(value)
    assert set(groups) == set(summary)
    for key, values in groups.items():
        mean, std, n = summary[key]
        assert n == len(values)
        assert abs(mean - np.mean(values)) <= 1e-12 * max(1.0, abs(mean))
        assert abs(std - np.std(values)) <= 1e-12 * max(1.0, abs(std))


def test_resume_skips_cached_cells(tmp_path, monkeypatch):
    grid = delay_grid()
    first = run_sweep(grid, out_dir=tmp_path)
    before = (tmp_path / "raw.csv").read_bytes()

    def fail(config):
        raise AssertionError("cached cell was recomputed")

    monkeypatch.setattr(sweep_mod, "run_trial", fail)
    again = run_sweep(grid, out_dir=tmp_path)
    assert again.raw == first.raw
    assert (tmp_path / "raw.csv").read_bytes() == before


def test_force_and_changed_parameters_recompute(tmp_path, monkeypatch):
    grid = delay_grid(amplitudes=(1.0,), taus=(1.0,), trials=1)
    run_sweep(grid, out_dir=tmp_path)
    calls = []
    real = sweep_mod.run_trial
    monkeypatch.setattr(sweep_mod, "run_trial", lambda c: calls.append(c) or real(c))
    run_sweep(grid, out_dir=tmp_path, force=True)
    assert len(calls) == 1
    run_sweep(grid, ridge=1e-4, out_dir=tmp_path)
    assert len(calls) == 2


def test_failed_trials_are_recorded_not_fatal(tmp_path):
    grid = SweepGrid(amplitudes=(2.0,), taus=(0.125,), trials=2, narma_orders=(2,), degrees=(1,),
                     max_delay=2, split=PhaseSplit(10, 30, 30))
    result = run_sweep(grid, ArmParams(stiffness=1e9), out_dir=tmp_path)
    assert result.raw == []
    assert len(result.failures) == 2
    assert "diverged" in result.failures[0][3]
    rows = list(csv.reader(open(tmp_path / "failures.csv")))
    assert rows[0] == ["A", "tau", "trial", "error"]
    assert len(rows) == 3


def test_config_json_fingerprint(tmp_path):
    result = run_sweep(delay_grid(trials=1), out_dir=tmp_path)
    config = json.loads((tmp_path / "config.json").read_text())
    assert config["fingerprint"] == result.fingerprint
    assert config["grid"]["backend"] == "delay"
    other = run_sweep(delay_grid(trials=1, base_seed=5))
    assert other.fingerprint != result.fingerprint


def test_schema_errors_name_the_line(tmp_path):
    path = tmp_path / "raw.csv"
    path.write_text("A,tau,trial,task,metric,value\n1.0,1.0,0,narma2,nmse,0.1\n1.0,oops,0,narma2,nmse,0.1\n")
    with pytest.raises(SchemaError, match="line 3") as info:
        read_raw_csv(path)
    assert info.value.line == 3
    assert info.value.exit_code == 5
    path.write_text("wrong,header\n")
    with pytest.raises(SchemaError, match="line 1"):
        read_summary_csv(path)
