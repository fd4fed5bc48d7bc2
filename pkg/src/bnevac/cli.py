"""Command-line entry point: ``bnevac run | sweep | summarize``."""

import argparse
import sys
from dataclasses import fields
from pathlib import Path

from . import experiments
from .engine import PATTERNS, SimConfig, run_to_completion, snapshot

DEFAULT_SNAPSHOT_EVERY = 20

# flag -> (SimConfig field, help)
CONFIG_FLAGS = {
    "--pattern": ("moving_pattern", f"moving pattern, one of {', '.join(PATTERNS)}"),
    "--number-persons": ("number_persons", "total number of agents"),
    "--pct-bne": ("pct_bne", "percentage of agents using BNE (mixed patterns)"),
    "--probability-competing": ("probability_competing", "percent chance a neighbour enters a given patch"),
    "--door-width": ("door_width", "exit width in patches"),
    "--move-speed": ("move_speed", "free walking speed, m/s"),
    "--step-length": ("step_length", "length of one step, m"),
    "--follow-radius": ("follow_radius", "RF sight radius in patches"),
    "--weight-ud": ("weight_ud", "weight of distance utility against expected comfort"),
    "--seed": ("seed", "random seed"),
    "--max-ticks": ("max_ticks", "tick cap after which a run counts as stalled"),
}


class UsageError(Exception):
    pass


def _read_config_file(path):
    values = {}
    for lineno, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        if key not in SimConfig.field_names():
            raise UsageError(f"{path}:{lineno}: unknown parameter {key!r}")
        values[key] = value
    return values


def resolve_config(args) -> SimConfig:
    """Built-in defaults, then the config file, then command-line flags."""
    values = _read_config_file(args.config) if args.config else {}
    for flag, (name, _) in CONFIG_FLAGS.items():
        v = getattr(args, flag[2:].replace("-", "_"))
        if v is not None:
            values[name] = v
    try:
        return SimConfig().with_overrides(**values)
    except (KeyError, ValueError) as exc:
        raise UsageError(str(exc)) from None


def cmd_run(args) -> int:
    config = resolve_config(args)
    every = args.snapshot_every
    if args.snapshot_dir and not every:
        every = DEFAULT_SNAPSHOT_EVERY
    on_tick = None
    if every:
        out_dir = Path(args.snapshot_dir or ".")
        out_dir.mkdir(parents=True, exist_ok=True)

        def on_tick(world):
            if world.tick % every == 0:
                (out_dir / f"tick_{world.tick:06d}.txt").write_text(snapshot(world), encoding="utf-8")

    record = run_to_completion(config, on_tick=on_tick)
    print(record.summary_line())
    if record.stalled:
        print(f"warning: run stalled with agents remaining after {config.max_ticks} ticks",
              file=sys.stderr)
    return 0


def cmd_sweep(args) -> int:
    try:
        plan = experiments.load_plan(args.plan, desk_scale=args.desk_scale)
    except FileNotFoundError as exc:
        raise UsageError(str(exc)) from None
    except experiments.PlanError as exc:
        raise UsageError(f"malformed plan {args.plan}: {exc}") from None
    if args.master_seed is not None:
        plan.master_seed = args.master_seed
    output = args.output or plan.output_path or f"{plan.name}.csv"
    try:
        with open(output, "w", encoding="utf-8", newline=""):
            pass
    except OSError as exc:
        raise UsageError(f"cannot write {output}: {exc}") from None
    print(f"{plan.name}: {plan.n_runs} runs -> {output}", file=sys.stderr)
    experiments.execute(plan, parallelism=args.parallelism, output=output,
                        progress=experiments.stderr_progress)
    return 0


def cmd_summarize(args) -> int:
    group_by = [g.strip() for g in args.group_by.split(",") if g.strip()]
    try:
        table = experiments.summarize(args.csv, group_by)
    except FileNotFoundError:
        raise UsageError(f"no such file: {args.csv}") from None
    except Exception as exc:  # pandas raises several parser error types
        raise UsageError(f"cannot summarize {args.csv}: {exc}") from None
    if args.format == "csv":
        sys.stdout.write(table.to_csv(index=False, lineterminator="\n"))
    else:
        print(table.to_string(index=False))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bnevac", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    defaults = {f.name: f.default for f in fields(SimConfig)}
    run = sub.add_parser("run", help="run one simulation")
    run.add_argument("--config", help="key = value file of SimConfig parameters")
    for flag, (name, text) in CONFIG_FLAGS.items():
        kind = type(defaults[name])
        run.add_argument(flag, type=kind, default=None,
                         help=f"{text} (default: {defaults[name]})")
    run.add_argument("--snapshot-every", type=int, default=0,
                     help=f"write an occupancy snapshot every N ticks; 0 = off "
                          f"({DEFAULT_SNAPSHOT_EVERY} when only --snapshot-dir is given)")
    run.add_argument("--snapshot-dir", help="directory for snapshot files (default: .)")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="run an experiment plan and write CSV")
    sweep.add_argument("plan", help=f"plan file, or a bundled plan: {', '.join(experiments.bundled_plans())}")
    sweep.add_argument("--parallelism", type=int, default=1, help="concurrent runs (default: 1)")
    sweep.add_argument("--desk-scale", action="store_true", help="use the plan's reduced desk-scale grid")
    sweep.add_argument("--output", help="CSV path (default: the plan's output)")
    sweep.add_argument("--master-seed", type=int, help="override the plan's master seed")
    sweep.set_defaults(func=cmd_sweep)

    summ = sub.add_parser("summarize", help="summarize a sweep CSV")
    summ.add_argument("csv")
    summ.add_argument("--group-by", default="pattern", help="comma-separated columns (default: pattern)")
    summ.add_argument("--format", choices=("table", "csv"), default="table")
    summ.set_defaults(func=cmd_summarize)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "parallelism", 1) < 1:
        parser.error("--parallelism must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"bnevac {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
