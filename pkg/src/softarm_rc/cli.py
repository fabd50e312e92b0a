"""Command-line front end.

Exit codes::

    0  success
    2  configuration or usage error
    3  simulation or target divergence
    4  degenerate metric or singular readout
    5  file I/O or malformed input file
"""

import argparse
import csv
import logging
import os
import sys

import numpy as np

from . import plotting
from .config import OPTIONS, Config
from .errors import ConfigError, SchemaError, SoftArmError
from .arm import simulate_response
from .arm.dynamics import SENSOR_NAMES, SensorTrace
from .harness import InputStream, TrialConfig, generate_input, generate_weights, run_trial
from .metrics import nmse
from .readout import fit_readout
from .sweep import RAW_HEADER, aggregate, evaluate_trial, read_summary_csv, run_sweep, trial_config
from .tasks import NarmaSpec, narma_target

logger = logging.getLogger(__name__)

OUTPUT_DIR_ENV = "SOFTARM_RC_OUTPUT_DIR"
EXIT_OK = 0
EXIT_IO = 5


def _option_table():
    lines = ["config keys (use with --set key=value or in a --config file):"]
    for opt in OPTIONS:
        unit = f" [{opt.unit}]" if opt.unit else " [-]"
        lines.append(f"  {opt.name}{unit}: {opt.help}")
    return "\n".join(lines)


def _common(parser):
    parser.add_argument("--config", metavar="PATH", help="key = value config file [path]")
    parser.add_argument("--profile", choices=("desk", "paper"),
                        help="default grid and phase lengths [-]")
    parser.add_argument("--set", dest="overrides", action="append", default=[], metavar="KEY=VALUE",
                        help="override one config key; repeatable [units as in the key table]")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr [-]")


def _cell(parser):
    parser.add_argument("--amplitude", "-A", type=float, default=6.0,
                        help="input weight range A [-] (default 6)")
    parser.add_argument("--tau", type=float, default=1.0, help="input hold time [s] (default 1)")


def build_parser():
    fmt = argparse.RawDescriptionHelpFormatter
    parser = argparse.ArgumentParser(
        prog="softarm-rc", description="Soft-arm reservoir computing experiments.",
        epilog=__doc__.split("\n", 2)[2] + "\n" + _option_table(), formatter_class=fmt)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", help="run the arm once and write the sensor trace",
                       epilog=_option_table(), formatter_class=fmt)
    _common(p)
    _cell(p)
    p.add_argument("--seed", type=int, default=None,
                   help="trial seed [-] (default: base_seed from the config)")
    p.add_argument("--steps", type=int, default=None,
                   help="number of input steps [steps] (default: washout+train+eval)")
    p.add_argument("--constant-input", type=float, default=None, metavar="U",
                   help="hold the input at U instead of random draws [-, 0..1]")
    p.add_argument("--out", metavar="PATH", help="trace CSV [path] (default: <output_dir>/trace.csv)")
    p.add_argument("--svg", metavar="PATH", help="also write a two-panel input/trace SVG [path]")
    p.add_argument("--plot-steps", type=int, default=40,
                   help="input steps shown in the SVG [steps] (default 40)")

    p = sub.add_parser("narma", help="NARMA emulation error over several trials",
                       epilog=_option_table(), formatter_class=fmt)
    _common(p)
    _cell(p)
    p.add_argument("--orders", help="NARMA orders, e.g. 2-9 or 2,5,9 [-] (default: config)")
    p.add_argument("--trials", type=int, help="number of trials [-] (default: config)")
    p.add_argument("--seed", type=int, help="base seed [-] (default: config base_seed)")
    p.add_argument("--out", metavar="PATH",
                   help="results CSV [path] (default: <output_dir>/narma.csv); "
                        "per-trial rows go to <stem>_raw.csv")
    p.add_argument("--svg", metavar="PATH",
                   help="overlay of target and output in the evaluation phase, first trial [path]")
    p.add_argument("--plot-steps", type=int, default=100,
                   help="evaluation steps shown in the overlay [steps] (default 100)")

    p = sub.add_parser("capacity", help="memory functions and capacities of Legendre tasks",
                       epilog=_option_table(), formatter_class=fmt)
    _common(p)
    _cell(p)
    p.add_argument("--degrees", help="Legendre degrees, e.g. 1-10 [-] (default: config)")
    p.add_argument("--max-delay", type=int, help="largest delay [steps] (default: config, 50)")
    p.add_argument("--trials", type=int, help="number of trials [-] (default: config)")
    p.add_argument("--seed", type=int, help="base seed [-] (default: config base_seed)")
    p.add_argument("--backend", choices=("arm", "delay"), default="arm",
                   help="reservoir: simulated arm or delay-line debug echo [-]")
    p.add_argument("--delay", type=int, default=3,
                   help="echo delay of the delay-line backend [steps] (default 3)")
    p.add_argument("--out", metavar="PATH",
                   help="capacity CSV [path] (default: <output_dir>/capacity.csv); "
                        "memory functions go to <stem>_mf.csv")
    p.add_argument("--no-svg", action="store_true", help="skip the per-degree MF profile SVGs [-]")

    p = sub.add_parser("sweep", help="run the full amplitude x timescale grid",
                       epilog=_option_table(), formatter_class=fmt)
    _common(p)
    p.add_argument("--out-dir", metavar="DIR", help=f"output directory [path] (env {OUTPUT_DIR_ENV})")
    p.add_argument("--workers", type=int, help="worker processes [-] (default: config)")
    p.add_argument("--force", action="store_true", help="recompute cached cells [-]")

    p = sub.add_parser("plot", help="render SVG figures from result files")
    kinds = p.add_subparsers(dest="kind", required=True)
    k = kinds.add_parser("heatmap", help="A x tau grid of one summary metric")
    k.add_argument("input", help="summary.csv [path]")
    k.add_argument("--task", default="narma2", help="task name, e.g. narma5 or legendre3 [-]")
    k.add_argument("--metric", default="nmse", help="metric name, e.g. nmse or capacity [-]")
    k.add_argument("--out", required=True, help="SVG [path]")
    k = kinds.add_parser("mf", help="memory-function profile with std error bars")
    k.add_argument("input", help="summary.csv [path]")
    k.add_argument("--degree", type=int, default=1, help="Legendre degree [-]")
    k.add_argument("--amplitude", "-A", type=float, required=True, help="input weight range A [-]")
    k.add_argument("--tau", type=float, required=True, help="input hold time [s]")
    k.add_argument("--out", required=True, help="SVG [path]")
    k = kinds.add_parser("trace", help="two-panel input/trace figure from simulate output")
    k.add_argument("input", help="trace CSV written by simulate [path]")
    k.add_argument("--inputs", required=True, help="inputs CSV written by simulate (k,u) [path]")
    k.add_argument("--tau", type=float, required=True, help="input hold time [s]")
    k.add_argument("--steps", type=int, default=40, help="input steps shown [steps]")
    k.add_argument("--out", required=True, help="SVG [path]")
    return parser


def load_config(args, **extra):
    overrides = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ConfigError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value
    overrides.update({k: v for k, v in extra.items() if v is not None})
    if os.environ.get(OUTPUT_DIR_ENV):
        overrides["output_dir"] = os.environ[OUTPUT_DIR_ENV]
    return Config.load(args.config, args.profile, overrides)


def _output_path(cfg, explicit, name):
    path = explicit or os.path.join(cfg.output_dir, name)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    return path


def _sibling(path, suffix):
    stem, ext = os.path.splitext(path)
    return f"{stem}{suffix}{ext or '.csv'}"


def write_inputs_csv(path, values):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("k", "u"))
        for k, u in enumerate(values):
            writer.writerow((k, repr(float(u))))


def read_inputs_csv(path):
    values = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader, ())) != ("k", "u"):
            raise SchemaError(f"{path}: line 1: expected header k,u", line=1)
        for lineno, rec in enumerate(reader, start=2):
            try:
                values.append(float(rec[1]))
            except (ValueError, IndexError) as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}", line=lineno) from exc
    return np.array(values)


def read_trace_csv(path, tau):
    header = ("step", "frag") + SENSOR_NAMES
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        if tuple(next(reader, ())) != header:
            raise SchemaError(f"{path}: line 1: expected header {','.join(header)}", line=1)
        for lineno, rec in enumerate(reader, start=2):
            try:
                if len(rec) != len(header):
                    raise ValueError(f"expected {len(header)} fields, got {len(rec)}")
                rows.append((int(rec[0]), int(rec[1]), [float(x) for x in rec[2:]]))
            except ValueError as exc:
                raise SchemaError(f"{path}: line {lineno}: {exc}", line=lineno) from exc
    if not rows:
        raise SchemaError(f"{path}: no data rows", line=1)
    steps = max(r[0] for r in rows) + 1
    n_frag = max(r[1] for r in rows)
    if len(rows) != steps * n_frag:
        raise SchemaError(f"{path}: expected {steps * n_frag} rows for a full grid, got {len(rows)}",
                          line=len(rows) + 1)
    data = np.empty((steps, n_frag, len(SENSOR_NAMES)))
    for step, frag, vals in rows:
        data[step, frag - 1] = vals
    return SensorTrace(data, tau, tau / n_frag, None)


def cmd_simulate(args):
    cfg = load_config(args)
    seed = cfg.base_seed if args.seed is None else args.seed
    steps = args.steps or cfg.split().total
    config = TrialConfig.from_trial_seed(seed, args.amplitude, args.tau, arm=cfg.arm_params(),
                                         h_max=cfg.h_max)
    if args.constant_input is not None:
        if not 0.0 <= args.constant_input <= 1.0:
            raise ConfigError("--constant-input must lie in [0, 1]")
        inputs = InputStream(np.full(steps, args.constant_input), args.tau, seed)
    else:
        inputs = generate_input(config.input_seed, steps, args.tau)
    weights = generate_weights(config.weight_seed, args.amplitude)
    trace = simulate_response(inputs, weights.w, config.arm, args.tau, h_max=cfg.h_max)
    out = _output_path(cfg, args.out, "trace.csv")
    trace.write_csv(out)
    write_inputs_csv(_sibling(out, "_inputs"), inputs.values)
    if args.svg:
        plotting.trace_svg(inputs, trace, _output_path(cfg, args.svg, ""), args.plot_steps)
    print(f"wrote {out} ({steps} steps, weights {', '.join(f'{w:.4f}' for w in weights.w)})")
    return EXIT_OK


def _single_cell_grid(cfg, args, **changes):
    return cfg.grid(amplitudes=(args.amplitude,), taus=(args.tau,), **changes)


def _write_raw(path, rows):
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RAW_HEADER)
        for A, tau, trial, task, metric, value in rows:
            writer.writerow((repr(A), repr(tau), trial, task, metric, repr(value)))


def _run_cell(cfg, grid):
    """Run every trial of a one-cell grid in order; returns raw rows and the first trial."""
    rows = []
    first = None
    for k in range(grid.trials):
        result = run_trial(trial_config(grid, cfg.arm_params(), 0, 0, k))
        first = first or result
        for task, metric, value in evaluate_trial(result, grid, cfg.ridge_lambda):
            rows.append((grid.amplitudes[0], grid.taus[0], k, task, metric, value))
    return rows, first


def cmd_narma(args):
    cfg = load_config(args, narma_orders=args.orders, trials=args.trials, base_seed=args.seed)
    grid = _single_cell_grid(cfg, args, degrees=())
    rows, first = _run_cell(cfg, grid)
    out = _output_path(cfg, args.out, "narma.csv")
    with open(out, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("task", "mean_nmse", "std_nmse", "n_trials"))
        for n in grid.narma_orders:
            values = [r[5] for r in rows if r[3] == f"narma{n}" and r[4] == "nmse"]
            mean, std = aggregate(values)
            writer.writerow((f"narma{n}", repr(mean), repr(std), len(values)))
            print(f"narma{n}: NMSE {mean:.4g} +- {std:.2g} over {len(values)} trials")
    _write_raw(_sibling(out, "_raw"), rows)
    if args.svg:
        panels = []
        for n in grid.narma_orders:
            _, series = fit_readout(first.nodes, narma_target(first.inputs, NarmaSpec(n)),
                                    cfg.ridge_lambda)
            window = slice(series.n_train, series.n_train + args.plot_steps)
            err = nmse(series.y, series.target, series.eval)
            panels.append((f"NARMA{n} (NMSE {err:.3g})", series.target[window], series.y[window]))
        plotting.overlay_svg(panels, _output_path(cfg, args.svg, ""),
                             title=f"A = {args.amplitude:g}, tau = {args.tau:g} s")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_capacity(args):
    cfg = load_config(args, degrees=args.degrees, trials=args.trials, base_seed=args.seed,
                      max_delay=args.max_delay)
    grid = _single_cell_grid(cfg, args, narma_orders=(), backend=args.backend, delay=args.delay)
    rows, _ = _run_cell(cfg, grid)
    out = _output_path(cfg, args.out, "capacity.csv")
    with open(out, "w", newline="") as fh, open(_sibling(out, "_mf"), "w", newline="") as mf_fh:
        writer = csv.writer(fh, lineterminator="\n")
        mf_writer = csv.writer(mf_fh, lineterminator="\n")
        writer.writerow(("degree", "mean_capacity", "std_capacity", "n_trials"))
        mf_writer.writerow(("degree", "delay", "mean_mf", "std_mf"))
        for n in grid.degrees:
            task = f"legendre{n}"
            caps = [r[5] for r in rows if r[3] == task and r[4] == "capacity"]
            mean, std = aggregate(caps)
            writer.writerow((n, repr(mean), repr(std), len(caps)))
            profile = []
            for d in range(grid.max_delay + 1):
                m, s = aggregate([r[5] for r in rows if r[3] == task and r[4] == f"mf_{d}"])
                mf_writer.writerow((n, d, repr(m), repr(s)))
                profile.append((m, s))
            print(f"C_{n} = {mean:.4g} +- {std:.2g}")
            if not args.no_svg:
                mean_mf, std_mf = np.array(profile).T
                svg = _sibling(out, f"_mf{n}").rsplit(".", 1)[0] + ".svg"
                plotting.mf_profile_svg(mean_mf, std_mf, svg,
                                        title=f"degree {n}, A = {args.amplitude:g}, tau = {args.tau:g} s")
    print(f"wrote {out}")
    return EXIT_OK


def cmd_sweep(args):
    cfg = load_config(args, workers=args.workers)
    out_dir = args.out_dir or cfg.output_dir
    grid = cfg.grid()

    def progress(done, total):
        logger.info("trial %d/%d done", done, total)

    result = run_sweep(grid, cfg.arm_params(), cfg.ridge_lambda, out_dir, cfg.workers,
                       args.force, progress)
    cfg.dump(os.path.join(out_dir, "config.ini"))
    n_cells = len(grid.amplitudes) * len(grid.taus)
    print(f"wrote {out_dir}: {n_cells} cells x {grid.trials} trials, {len(result.failures)} failed trials")
    return EXIT_OK


def _grid_axes(summary):
    amplitudes = sorted({key[0] for key in summary})
    taus = sorted({key[1] for key in summary})
    return amplitudes, taus


def cmd_plot(args):
    if args.kind == "trace":
        trace = read_trace_csv(args.input, args.tau)
        inputs = read_inputs_csv(args.inputs)
        plotting.trace_svg(inputs, trace, args.out, args.steps)
        return EXIT_OK
    summary = read_summary_csv(args.input)
    if args.kind == "heatmap":
        values = {(A, tau): stats[0] for (A, tau, task, metric), stats in summary.items()
                  if task == args.task and metric == args.metric}
        if not values:
            raise SchemaError(f"{args.input}: no rows for task {args.task!r} metric {args.metric!r}")
        amplitudes, taus = _grid_axes(summary)
        plotting.heatmap_svg(values, amplitudes, taus, args.out,
                             title=f"{args.task} {args.metric}")
    else:
        task = f"legendre{args.degree}"
        profile = []
        d = 0
        while (args.amplitude, args.tau, task, f"mf_{d}") in summary:
            profile.append(summary[(args.amplitude, args.tau, task, f"mf_{d}")][:2])
            d += 1
        if not profile:
            raise SchemaError(f"{args.input}: no memory-function rows for {task} at "
                              f"A={args.amplitude:g}, tau={args.tau:g}")
        mean, std = np.array(profile).T
        plotting.mf_profile_svg(mean, std, args.out,
                                title=f"degree {args.degree}, A = {args.amplitude:g}, tau = {args.tau:g} s")
    return EXIT_OK


COMMANDS = {
    "simulate": cmd_simulate,
    "narma": cmd_narma,
    "capacity": cmd_capacity,
    "sweep": cmd_sweep,
    "plot": cmd_plot,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if getattr(args, "verbose", False) else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return COMMANDS[args.command](args)
    except SoftArmError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
