"""Command-line interface: ``foxpop run|sweep|estimate|calibrate``.

Exit statuses: 0 success, 2 invalid configuration or input, 3 I/O failure, 4 calibration outside tolerance."""
import argparse
import sys
import warnings
from pathlib import Path

from . import __version__
from .configuration import config
from .document import TARGETS_FILEPATH, ConfigDocument
from .engine import run_simulation
from .errors import (
    CalibrationError,
    ConfigurationError,
    EstimationError,
    FileFormatError,
)
from .experiments import (
    RUN_COLUMNS,
    TRAJECTORY_COLUMNS,
    CalibrationTarget,
    RunRecord,
    SearchSpace,
    SweepAxis,
    calibrate_defaults,
    detect_critical_mass,
    run_sweep,
    write_sweep,
)
from .filesystem import create_dir
from .logs import close_log, get_logger, log_parameters
from .serialization import JsonWrapper, format_cell, write_csv
from .survival import CELLS, cell_label, direct_estimate, estimate_bayes, read_cohort

EXIT_OK = 0
EXIT_INVALID = 2
EXIT_IO = 3
EXIT_CALIBRATION = 4


def u64(value):
    try:
        seed = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("{} is not an integer".format(value))
    if not 0 <= seed < 2**64:
        raise argparse.ArgumentTypeError("{} doesn't fit in 64 unsigned bits".format(value))
    return seed


def positive(value):
    try:
        number = int(value)
    except ValueError:
        raise argparse.ArgumentTypeError("{} is not an integer".format(value))
    if number < 1:
        raise argparse.ArgumentTypeError("{} must be at least 1".format(value))
    return number


def resolve_seed(args, document):
    """``--seed``, then ``FOXPOP_SEED``, then the document's ``sweep.base_seed``."""
    if args.seed is not None:
        return args.seed
    seed = config.env_seed
    if seed is not None:
        return seed
    return document.data.get("sweep", {}).get("base_seed", config.fallback_seed)


def fmt(value, digits=4):
    if value is None:
        return "-"
    return "{:.{}f}".format(value, digits)


def cmd_run(args, log):
    document = ConfigDocument.load(args.config)
    params, init = document.model_params(), document.init_params()
    log_parameters(log, params, init)
    seed = resolve_seed(args, document)
    log.info("Single run with seed %d", seed)
    result = run_simulation(params, init, seed)

    out = Path(args.out)
    create_dir(out)
    record = RunRecord(scenario="run", axis_value=None, run_index=0, result=result)
    write_csv(out / "run.csv", [record.as_row()], RUN_COLUMNS)
    if args.trajectories:
        write_csv(out / "trajectory.csv", record.trajectory_rows(), TRAJECTORY_COLUMNS)

    print("outcome: {}".format(result.outcome.value))
    print("years: {}".format(result.years))
    print("lambda: {}".format(format_cell(result.lambda_) or "undefined"))
    return EXIT_OK


def cmd_sweep(args, log):
    document = ConfigDocument.load(args.config)
    params, init = document.model_params(), document.init_params()
    log_parameters(log, params, init)
    spec = document.sweep_spec(
        axis=args.axis, runs=args.runs, base_seed=resolve_seed(args, document)
    )
    result = run_sweep(
        spec,
        params,
        init,
        workers=args.workers or config.workers,
        progress=not args.quiet,
        log=log,
    )
    write_sweep(result, args.out, trajectories=args.trajectories)

    print("{:<28} {:>6} {:>8} {:>9} {:>9} {:>9}".format(
        "scenario", "runs", "extinct", "max_limit", "horizon", "lambda"
    ))
    for stats in result.stats:
        print("{:<28} {:>6} {:>8.2f} {:>9.2f} {:>9.2f} {:>9}".format(
            stats.scenario,
            stats.n_runs,
            stats.pct_extinct,
            stats.pct_max_limit,
            stats.pct_horizon,
            fmt(stats.lambda_mean),
        ))
    if spec.axis is SweepAxis.INITIAL_N:
        critical = detect_critical_mass(result.stats)
        print("critical initial population: {}".format(
            "not reached" if critical is None else format_cell(critical)
        ))
    return EXIT_OK


def cmd_estimate(args, log):
    cohort = read_cohort(args.cohort)
    if args.method == "direct":
        table, diagnostics = direct_estimate(cohort), None
    else:
        table, diagnostics = estimate_bayes(cohort)

    for cell in CELLS:
        print("{:<14} {}".format(cell_label(cell), fmt(table[cell])))
    if diagnostics is not None and diagnostics.clamped:
        print("clamped: {}".format(
            ", ".join(
                "{} (raw {})".format(cell_label(cell), fmt(diagnostics.raw_values[cell]))
                for cell in diagnostics.clamped_cells
            )
        ))
        log.warning("Clamped survival estimates: %s", [cell_label(c) for c in diagnostics.clamped_cells])

    if args.out:
        fragment = {
            "model": {"survival": table.as_config()},
            "provenance": {
                "survival": "Estimated from cohort file {} with the {} method".format(
                    Path(args.cohort).name, args.method
                ),
                "clamped": [cell_label(cell) for cell in diagnostics.clamped_cells]
                if diagnostics
                else [],
            },
        }
        JsonWrapper.dump(fragment, args.out)
    return EXIT_OK


def cmd_calibrate(args, log):
    document = ConfigDocument.load(args.config)
    params, init = document.model_params(), document.init_params()
    log_parameters(log, params, init)
    target = CalibrationTarget.from_csv(args.targets, tolerance=args.tolerance)
    search_space = SearchSpace.with_step(args.step) if args.step else SearchSpace()

    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        result = calibrate_defaults(
            target,
            search_space,
            params,
            init,
            runs_per_scenario=args.runs,
            coarse_runs=args.coarse_runs,
            base_seed=resolve_seed(args, document),
            workers=args.workers or config.workers,
            progress=not args.quiet,
            log=log,
        )
    JsonWrapper.dump(result.as_fragment(), args.out)

    print("survival (cub, yearling, adult): {}".format(
        ", ".join(format_cell(x) for x in result.stages)
    ))
    print("{:<20} {:>7} {:>8} {:>8} {:>9} {:>9}".format(
        "axis", "delta", "ext_tgt", "ext_got", "max_tgt", "max_got"
    ))
    for row in result.report():
        print("{:<20} {:>7} {:>8} {:>8} {:>9} {:>9}".format(
            row["axis"],
            format_cell(row["delta"]),
            fmt(row["target_extinct"], 2),
            fmt(row["achieved_extinct"], 2),
            fmt(row["target_max_limit"], 2),
            fmt(row["achieved_max_limit"], 2),
        ))
    print("objective: {}".format(fmt(result.objective, 6)))
    if not result.within_tolerance:
        raise CalibrationError(
            "No candidate within {} of every target; best found written to {}".format(
                args.tolerance, args.out
            )
        )
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(
        prog="foxpop",
        description="Individual-based simulation of an island Arctic fox population",
    )
    parser.add_argument(
        "--version", action="version", version="foxpop {}".format(".".join(str(x) for x in __version__))
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    def common(subparser, seed=True):
        subparser.add_argument("--config", help="JSON document overlaid on the defaults")
        if seed:
            subparser.add_argument("--seed", type=u64, help="Base seed (default: $FOXPOP_SEED)")

    run = subparsers.add_parser("run", help="One simulation run")
    common(run)
    run.add_argument("--out", required=True, help="Output directory")
    run.add_argument("--trajectories", action="store_true", help="Also write trajectory.csv")
    run.set_defaults(func=cmd_run)

    sweep = subparsers.add_parser("sweep", help="Replicated runs over one parameter axis")
    common(sweep)
    sweep.add_argument("--axis", choices=[axis.value for axis in SweepAxis])
    sweep.add_argument("--runs", type=positive, help="Runs per scenario")
    sweep.add_argument("--out", required=True, help="Output directory")
    sweep.add_argument("--workers", type=positive, help="Worker processes (default: CPU count)")
    sweep.add_argument("--trajectories", action="store_true", help="Also write trajectories.csv")
    sweep.add_argument("--quiet", action="store_true", help="No progress bar")
    sweep.set_defaults(func=cmd_sweep)

    estimate = subparsers.add_parser("estimate", help="Survival table from tagged-cohort counts")
    estimate.add_argument("--cohort", required=True, help="CSV with age_class,sex,survived,died")
    estimate.add_argument("--method", choices=("bayes", "direct"), default="bayes")
    estimate.add_argument("--out", help="Write the table as a config fragment")
    estimate.set_defaults(func=cmd_estimate)

    calibrate = subparsers.add_parser("calibrate", help="Fit default survival to outcome targets")
    common(calibrate)
    calibrate.add_argument(
        "--targets",
        default=str(TARGETS_FILEPATH),
        help="CSV with axis,delta,pct_extinct,pct_max_limit",
    )
    calibrate.add_argument("--out", required=True, help="Config fragment to write")
    calibrate.add_argument("--runs", type=positive, default=100, help="Runs per target row")
    calibrate.add_argument("--coarse-runs", type=positive, help="Runs per row on the coarse grid")
    calibrate.add_argument("--step", type=float, help="Grid step (default 0.05)")
    calibrate.add_argument("--tolerance", type=float, default=0.10)
    calibrate.add_argument("--workers", type=positive, help="Worker processes (default: CPU count)")
    calibrate.add_argument("--quiet", action="store_true", help="No progress bar")
    calibrate.set_defaults(func=cmd_calibrate)
    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        log = get_logger("foxpop-{}".format(args.command))
    except OSError as e:
        print("error: can't open log file: {}".format(e), file=sys.stderr)
        return EXIT_IO
    try:
        return args.func(args, log)
    except (ConfigurationError, EstimationError, FileFormatError) as e:
        log.error(str(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INVALID
    except CalibrationError as e:
        log.warning(str(e))
        print("warning: {}".format(e), file=sys.stderr)
        return EXIT_CALIBRATION
    except OSError as e:
        log.error(str(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_IO
    except ValueError as e:
        # Invalid FOXPOP_SEED
        log.error(str(e))
        print("error: {}".format(e), file=sys.stderr)
        return EXIT_INVALID
    finally:
        close_log(log)

