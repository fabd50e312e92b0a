"""Experiment grid over input amplitude and timescale.

Each (A, tau, trial) job runs the arm once; every task is trained and
scored on that one node matrix, because targets depend only on the input
stream. Results are reduced in sorted key order so they do not depend on
how jobs were scheduled.

Output directory layout::

    config.json     parameters and fingerprint
    cells/*.json    per-cell cache, reused when its fingerprint matches
    raw.csv         A,tau,trial,task,metric,value
    summary.csv     A,tau,task,metric,mean,std,n
    summary.json    the same aggregates, nested by cell
    failures.csv    A,tau,trial,error
"""

import csv
import hashlib
import json
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import cached_property

import numpy as np

from .arm import ArmParams
from .arm.dynamics import H_MAX
from .errors import ContractError, SchemaError, SoftArmError
from .harness import PAPER_SPLIT, PhaseSplit, TrialConfig, run_trial
from .metrics import MAX_DELAY, capacity, memory_functions, nmse
from .prng import derive_seed
from .readout import DEFAULT_LAMBDA, fit_readout
from .tasks import NarmaSpec, legendre_targets, narma_target

logger = logging.getLogger(__name__)

RAW_HEADER = ("A", "tau", "trial", "task", "metric", "value")
SUMMARY_HEADER = ("A", "tau", "task", "metric", "mean", "std", "n")
SEED_RADIX = 1 << 20


@dataclass(frozen=True)
class SweepGrid:
    amplitudes: tuple = (1.0, 2.0, 3.0, 4.0, 5.0, 6.0)
    taus: tuple = (0.125, 0.25, 0.5, 1.0, 2.0, 3.0, 4.0)
    trials: int = 20
    narma_orders: tuple = (2, 3, 4, 5, 6, 7, 8, 9)
    degrees: tuple = (1, 2, 3, 4, 5, 6, 7, 8, 9, 10)
    max_delay: int = MAX_DELAY
    base_seed: int = 0
    split: PhaseSplit = PAPER_SPLIT
    legendre_remap: bool = True
    normalize: bool = True
    h_max: float = H_MAX
    backend: str = "arm"
    delay: int = 3

    def __post_init__(self):
        object.__setattr__(self, "amplitudes", tuple(float(a) for a in self.amplitudes))
        object.__setattr__(self, "taus", tuple(float(t) for t in self.taus))
        object.__setattr__(self, "narma_orders", tuple(int(n) for n in self.narma_orders))
        object.__setattr__(self, "degrees", tuple(int(n) for n in self.degrees))
        if not self.amplitudes or not self.taus:
            raise ContractError("sweep grid needs at least one amplitude and one tau")
        if self.trials < 1:
            raise ContractError("sweep grid needs at least one trial")
        if max(len(self.amplitudes), len(self.taus), self.trials) > SEED_RADIX:
            raise ContractError("sweep grid too large for seed derivation")
        for n in self.narma_orders:
            NarmaSpec(n)
        if not 0 <= self.max_delay <= MAX_DELAY:
            raise ContractError(f"max_delay must be in 0..{MAX_DELAY}")

    def tasks(self):
        return [f"narma{n}" for n in self.narma_orders] + [f"legendre{n}" for n in self.degrees]


def trial_seed(base_seed, a_index, t_index, trial):
    """Injective over the grid: indices are packed with a fixed radix before mixing."""
    return derive_seed(base_seed, (a_index * SEED_RADIX + t_index) * SEED_RADIX + trial)


def trial_config(grid, arm, a_index, t_index, trial):
    seed = trial_seed(grid.base_seed, a_index, t_index, trial)
    return TrialConfig.from_trial_seed(
        seed, float(grid.amplitudes[a_index]), float(grid.taus[t_index]), arm=arm,
        split=grid.split, normalize=grid.normalize, h_max=grid.h_max,
        backend=grid.backend, delay=grid.delay,
    )


def evaluate_trial(result, grid, ridge=DEFAULT_LAMBDA):
    """Train every task on one trial's nodes; returns ``[(task, metric, value), ...]``."""
    nodes = result.nodes
    rows = []
    for n in grid.narma_orders:
        target = narma_target(result.inputs, NarmaSpec(n))
        _, out = fit_readout(nodes, target, ridge)
        rows.append((f"narma{n}", "nmse", nmse(out.y, out.target, out.eval)))
        rows.append((f"narma{n}", "nmse_train", nmse(out.y, out.target, out.train)))
    if grid.degrees:
        targets = legendre_targets(result.inputs, grid.degrees, grid.max_delay, grid.legendre_remap)
        _, out = fit_readout(nodes, targets, ridge)
        mf = memory_functions(out.y, out.target, out.eval).reshape(len(grid.degrees), grid.max_delay + 1)
        for i, n in enumerate(grid.degrees):
            for d in range(grid.max_delay + 1):
                rows.append((f"legendre{n}", f"mf_{d}", float(mf[i, d])))
            rows.append((f"legendre{n}", "capacity", capacity(mf[i], grid.max_delay)))
    return rows


def _run_job(job):
    grid, arm, ridge, a_index, t_index, trial = job
    config = trial_config(grid, arm, a_index, t_index, trial)
    try:
        return (a_index, t_index, trial), evaluate_trial(run_trial(config), grid, ridge), None
    except SoftArmError as exc:
        return (a_index, t_index, trial), None, f"{type(exc).__name__}: {exc}"


def aggregate(values):
    """Mean and population standard deviation."""
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ContractError("aggregate needs at least one value")
    return float(values.mean()), float(values.std())


@dataclass
class SweepResult:
    """Per-trial rows, per-cell aggregates and failures of a sweep.

    ``raw`` rows are ``(A, tau, trial, task, metric, value)``; ``summary``
    maps ``(A, tau, task, metric)`` to ``(mean, std, n)``.
    """

    grid: SweepGrid
    raw: list
    failures: list = field(default_factory=list)
    fingerprint: str = ""

    @cached_property
    def summary(self):
        groups = {}
        for A, tau, _, task, metric, value in self.raw:
            groups.setdefault((A, tau, task, metric), []).append(value)
        return {key: aggregate(vals) + (len(vals),) for key, vals in groups.items()}

    def mean(self, A, tau, task, metric):
        return self.summary[(float(A), float(tau), task, metric)][0]

    def write(self, out_dir):
        os.makedirs(out_dir, exist_ok=True)
        with open(os.path.join(out_dir, "raw.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(RAW_HEADER)
            for A, tau, trial, task, metric, value in self.raw:
                writer.writerow((repr(A), repr(tau), trial, task, metric, repr(value)))
        summary = self.summary
        with open(os.path.join(out_dir, "summary.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(SUMMARY_HEADER)
            for (A, tau, task, metric), (mean, std, n) in summary.items():
                writer.writerow((repr(A), repr(tau), task, metric, repr(mean), repr(std), n))
        nested = {}
        for (A, tau, task, metric), (mean, std, n) in summary.items():
            cell = nested.setdefault(f"A={A!r},tau={tau!r}", {})
            cell.setdefault(task, {})[metric] = {"mean": mean, "std": std, "n": n}
        with open(os.path.join(out_dir, "summary.json"), "w") as fh:
            json.dump({"fingerprint": self.fingerprint, "cells": nested}, fh, indent=1)
            fh.write("\n")
        with open(os.path.join(out_dir, "failures.csv"), "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\n")
            writer.writerow(("A", "tau", "trial", "error"))
            for row in self.failures:
                writer.writerow((repr(row[0]), repr(row[1]), row[2], row[3]))


def _fingerprint(payload):
    text = json.dumps(payload, sort_keys=True, default=repr)
    return hashlib.sha256(text.encode()).hexdigest()


def sweep_payload(grid, arm, ridge):
    return {"grid": asdict(grid), "arm": asdict(arm), "ridge": ridge}


def cell_payload(grid, arm, ridge, A, tau):
    payload = sweep_payload(grid, arm, ridge)
    payload["grid"].pop("amplitudes")
    payload["grid"].pop("taus")
    # seeds depend on the grid position of the cell as well as its values
    payload["cell"] = [A, tau, list(grid.amplitudes).index(A), list(grid.taus).index(tau)]
    return payload


def _cell_path(out_dir, A, tau):
    return os.path.join(out_dir, "cells", f"A{A!r}_tau{tau!r}.json")


def _load_cell(path, fingerprint):
    try:
        with open(path) as fh:
            data = json.load(fh)
    except FileNotFoundError:
        return None
    except (OSError, ValueError) as exc:
        logger.warning("ignoring unreadable cell cache %s: %s", path, exc)
        return None
    if data.get("fingerprint") != fingerprint:
        return None
    return data


def run_sweep(grid, arm=None, ridge=DEFAULT_LAMBDA, out_dir=None, workers=1, force=False,
              progress=None):
    """Run (or resume) the whole grid; writes result files when ``out_dir`` is given."""
    arm = arm or ArmParams()
    amplitudes = [float(a) for a in grid.amplitudes]
    taus = [float(t) for t in grid.taus]
    cells = {}
    pending = []
    for ai, A in enumerate(amplitudes):
        for ti, tau in enumerate(taus):
            fp = _fingerprint(cell_payload(grid, arm, ridge, A, tau))
            cached = None
            if out_dir and not force:
                cached = _load_cell(_cell_path(out_dir, A, tau), fp)
            if cached is not None:
                logger.info("reusing cached cell A=%g tau=%g", A, tau)
                cells[(ai, ti)] = cached
            else:
                cells[(ai, ti)] = {"fingerprint": fp, "trials": {}, "failures": {}}
                pending.extend((grid, arm, ridge, ai, ti, k) for k in range(grid.trials))

    if workers > 1 and len(pending) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_job, pending))
    else:
        outcomes = []
        for job in pending:
            outcomes.append(_run_job(job))
            if progress:
                progress(len(outcomes), len(pending))
    for (ai, ti, k), rows, error in outcomes:
        cell = cells[(ai, ti)]
        if error is None:
            cell["trials"][str(k)] = [list(r) for r in rows]
        else:
            logger.warning("A=%g tau=%g trial %d failed: %s", amplitudes[ai], taus[ti], k, error)
            cell["failures"][str(k)] = error

    if out_dir:
        os.makedirs(os.path.join(out_dir, "cells"), exist_ok=True)
        for (ai, ti), cell in cells.items():
            with open(_cell_path(out_dir, amplitudes[ai], taus[ti]), "w") as fh:
                json.dump(cell, fh, sort_keys=True)

    raw = []
    failures = []
    for ai, ti in sorted(cells):
        A, tau = amplitudes[ai], taus[ti]
        cell = cells[(ai, ti)]
        for k in sorted(cell["trials"], key=int):
            for task, metric, value in cell["trials"][k]:
                raw.append((A, tau, int(k), task, metric, float(value)))
        for k in sorted(cell["failures"], key=int):
            failures.append((A, tau, int(k), cell["failures"][k]))

    fingerprint = _fingerprint(sweep_payload(grid, arm, ridge))
    result = SweepResult(grid, raw, failures, fingerprint)
    if out_dir:
        result.write(out_dir)
        config = {"fingerprint": fingerprint, **sweep_payload(grid, arm, ridge)}
        with open(os.path.join(out_dir, "config.json"), "w") as fh:
            json.dump(config, fh, indent=1, sort_keys=True, default=repr)
            fh.write("\n")
    return result


def read_raw_csv(path):
    """Parse a ``raw.csv`` back into row tuples, naming the offending line on error."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != RAW_HEADER:
            raise SchemaError(f"{path}: line 1: expected header {','.join(RAW_HEADER)}", line=1)
        for lineno, rec in enumerate(reader, start=2):
            try:
                A, tau, trial, task, metric, value = rec
                rows.append((float(A), float(tau), int(trial), task, metric, float(value)))
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}", line=lineno) from exc
    return rows


def read_summary_csv(path):
    """Parse ``summary.csv`` into ``{(A, tau, task, metric): (mean, std, n)}``."""
    out = {}
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if tuple(header or ()) != SUMMARY_HEADER:
            raise SchemaError(f"{path}: line 1: expected header {','.join(SUMMARY_HEADER)}", line=1)
        for lineno, rec in enumerate(reader, start=2):
            try:
                A, tau, task, metric, mean, std, n = rec
                out[(float(A), float(tau), task, metric)] = (float(mean), float(std), int(n))
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}", line=lineno) from exc
    return out
