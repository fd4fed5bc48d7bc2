"""Replicated parameter sweeps over :class:`~bnevac.engine.SimConfig`.

Plan files are line oriented::

    # comment
    name = experiment2
    replications = 50
    master_seed = 2023
    output = experiment2.csv
    number_persons = 2000              # any SimConfig field sets the base config
    sweep moving_pattern = BNE+SR, BNE+RF
    sweep pct_bne = 0:100:2            # start:stop:step, stop inclusive
    desk.replications = 5              # used instead with desk_scale=True
    desk.sweep pct_bne = 0:100:10

Sweeps combine as a cross product, the first sweep varying slowest.
"""

import csv
import io
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from importlib import resources
from pathlib import Path
from typing import Optional

import numpy as np
import pandas as pd
from scipy.stats import spearmanr

from .engine import SimConfig, run_to_completion

COLUMNS = ["name", "pattern", "number_persons", "pct_bne", "replicate", "seed",
           "evac_ticks", "evac_seconds", "mean_uec", "stalled"]
_CONFIG_COLUMNS = {"pattern": "moving_pattern", "number_persons": "number_persons", "pct_bne": "pct_bne"}
PLAN_KEYS = ("name", "replications", "master_seed", "output")


class PlanError(ValueError):
    pass


@dataclass
class ExperimentPlan:
    name: str = "experiment"
    base: SimConfig = field(default_factory=SimConfig)
    sweeps: list = field(default_factory=list)  # [(param, [values, ...]), ...]
    replications: int = 1
    master_seed: int = 0
    output_path: Optional[str] = None

    def __post_init__(self):
        if self.replications < 1:
            raise PlanError("replications must be >= 1")
        names = set(SimConfig.field_names())
        for param, values in self.sweeps:
            if param not in names or param == "seed":
                raise PlanError(f"cannot sweep unknown parameter {param!r}")
            if not values:
                raise PlanError(f"sweep over {param!r} has no values")

    @property
    def n_cells(self) -> int:
        return int(np.prod([len(v) for _, v in self.sweeps])) if self.sweeps else 1

    @property
    def n_runs(self) -> int:
        return self.n_cells * self.replications


@dataclass(frozen=True)
class RunSpec:
    cell: int
    replicate: int
    config: SimConfig


def _parse_values(param: str, text: str):
    text = text.strip()
    if ":" in text and "," not in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise PlanError(f"range for {param!r} must be start:stop:step, got {text!r}")
        start, stop, step = (float(p) for p in parts)
        if step <= 0:
            raise PlanError(f"range step for {param!r} must be positive")
        n = int(np.floor((stop - start) / step + 1e-9)) + 1
        raw = [start + k * step for k in range(n)]
        raw = [f"{v:.10g}" for v in raw]
    else:
        raw = [v.strip() for v in text.split(",") if v.strip()]
    try:
        return [SimConfig.coerce(param, v) for v in raw]
    except KeyError:
        raise PlanError(f"unknown parameter {param!r}") from None
    except ValueError as exc:
        raise PlanError(f"bad value for {param!r}: {exc}") from None


def parse_plan(text: str, desk_scale: bool = False) -> ExperimentPlan:
    settings = {}
    base = {}
    sweeps = {}
    desk_settings = {}
    desk_base = {}
    desk_sweeps = {}
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise PlanError(f"line {lineno}: expected 'key = value'")
        key, value = (s.strip() for s in line.split("=", 1))
        desk = key.startswith("desk.")
        if desk:
            key = key[len("desk."):].strip()
        if key.startswith("sweep "):
            param = key[len("sweep "):].strip()
            (desk_sweeps if desk else sweeps)[param] = _parse_values(param, value)
        elif key in PLAN_KEYS:
            (desk_settings if desk else settings)[key] = value
        elif key in SimConfig.field_names():
            (desk_base if desk else base)[key] = value
        else:
            raise PlanError(f"line {lineno}: unknown key {key!r}")

    if desk_scale:
        settings.update(desk_settings)
        base.update(desk_base)
        for param, values in desk_sweeps.items():
            sweeps[param] = values  # keeps the full-scale position when present

    try:
        config = SimConfig().with_overrides(**base)
    except (KeyError, ValueError) as exc:
        raise PlanError(f"bad base configuration: {exc}") from None
    try:
        return ExperimentPlan(
            name=settings.get("name", "experiment"),
            base=config,
            sweeps=list(sweeps.items()),
            replications=int(settings.get("replications", 1)),
            master_seed=int(settings.get("master_seed", 0)),
            output_path=settings.get("output"),
        )
    except ValueError as exc:
        raise PlanError(str(exc)) from None


def load_plan(path, desk_scale: bool = False) -> ExperimentPlan:
    """Read a plan file; a bare name such as ``experiment1.plan`` falls back to
    the plans bundled with the package."""
    p = Path(path)
    if p.is_file():
        return parse_plan(p.read_text(encoding="utf-8"), desk_scale)
    bundled = resources.files("bnevac") / "plans" / p.name
    if bundled.is_file():
        return parse_plan(bundled.read_text(encoding="utf-8"), desk_scale)
    raise FileNotFoundError(f"plan file not found: {path}")


def bundled_plans():
    return sorted(p.name for p in (resources.files("bnevac") / "plans").iterdir()
                  if p.name.endswith(".plan"))


def derive_seed(master_seed: int, cell: int, replicate: int) -> int:
    """64-bit run seed, a pure function of its coordinates in the plan."""
    ss = np.random.SeedSequence(master_seed, spawn_key=(cell, replicate))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def expand(plan: ExperimentPlan):
    """All runs of ``plan`` as :class:`RunSpec`, cell-major then replicate."""
    params = [p for p, _ in plan.sweeps]
    grids = [v for _, v in plan.sweeps]
    cells = [dict(zip(params, combo)) for combo in _product(grids)]
    runs = []
    for i, overrides in enumerate(cells):
        cfg = replace(plan.base, **overrides)
        for r in range(plan.replications):
            runs.append(RunSpec(i, r, replace(cfg, seed=derive_seed(plan.master_seed, i, r))))
    return runs


def _product(grids):
    if not grids:
        yield ()
        return
    for head in grids[0]:
        for tail in _product(grids[1:]):
            yield (head,) + tail


def run_one(spec: RunSpec):
    return run_to_completion(spec.config)


def _columns(plan: ExperimentPlan):
    covered = set(_CONFIG_COLUMNS.values())
    return COLUMNS + [p for p, _ in plan.sweeps if p not in covered]


def _row(plan, spec: RunSpec, record):
    cfg = spec.config
    row = {
        "name": plan.name,
        "pattern": cfg.moving_pattern,
        "number_persons": cfg.number_persons,
        "pct_bne": cfg.pct_bne,
        "replicate": spec.replicate,
        "seed": cfg.seed,
        "evac_ticks": record.evac_ticks,
        "evac_seconds": record.evac_seconds,
        "mean_uec": record.mean_uec,
        "stalled": record.stalled,
    }
    for col in _columns(plan)[len(COLUMNS):]:
        row[col] = getattr(cfg, col)
    return row


def execute(plan: ExperimentPlan, parallelism: int = 1, output=None, progress=None):
    """Run every expanded run and return the result rows in expansion order.

    Rows are also written as CSV to ``output`` (a path or text stream), or to
    ``plan.output_path`` when ``output`` is None and the plan names one.
    ``progress(done, total)`` is called after each finished run.
    """
    if parallelism < 1:
        raise ValueError("parallelism must be >= 1")
    runs = expand(plan)
    rows = []
    if parallelism == 1:
        records = map(run_one, runs)
        pool = None
    else:
        pool = ProcessPoolExecutor(max_workers=parallelism)
        records = pool.map(run_one, runs, chunksize=1)
    try:
        for k, (spec, record) in enumerate(zip(runs, records), 1):
            rows.append(_row(plan, spec, record))
            if progress is not None:
                progress(k, len(runs))
    finally:
        if pool is not None:
            pool.shutdown()

    target = output if output is not None else plan.output_path
    if target is not None:
        write_csv(rows, target, _columns(plan))
    return rows


def _fmt(value):
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(rows, target, columns=None):
    columns = columns or (list(rows[0]) if rows else COLUMNS)
    if hasattr(target, "write"):
        _write(rows, target, columns)
    else:
        with open(target, "w", encoding="utf-8", newline="") as fh:
            _write(rows, fh, columns)


def _write(rows, fh, columns):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([_fmt(row[c]) for c in columns])


def csv_text(rows, columns=None) -> str:
    buf = io.StringIO()
    write_csv(rows, buf, columns)
    return buf.getvalue()


def read_results(source) -> pd.DataFrame:
    df = pd.read_csv(source)
    missing = [c for c in COLUMNS if c not in df.columns]
    if missing:
        raise ValueError(f"results table lacks columns {missing}")
    if df.empty:
        raise ValueError("results table has no rows")
    df["stalled"] = df["stalled"].astype(str).str.lower().eq("true")
    return df


def summarize(results, group_by) -> pd.DataFrame:
    """Per-group moments of ``evac_ticks`` and ``mean_uec``.

    When ``pct_bne`` is a group key, each row also carries the Spearman rank
    correlation of ``pct_bne`` against the group means (time and comfort),
    computed within the stratum of the remaining keys.
    """
    if isinstance(results, (str, Path)) or hasattr(results, "read"):
        df = read_results(results)
    else:
        df = pd.DataFrame(results)
    if df.empty:
        raise ValueError("cannot summarize an empty results table")
    group_by = [group_by] if isinstance(group_by, str) else list(group_by)
    unknown = [g for g in group_by if g not in df.columns]
    if unknown:
        raise ValueError(f"unknown group-by columns {unknown}")

    grouped = df.groupby(group_by, sort=True)
    out = grouped.size().rename("n").to_frame()
    for col in ("evac_ticks", "mean_uec"):
        stats = grouped[col].agg(["mean", "std", "min", "max"])
        stats["std"] = stats["std"].fillna(0.0)
        stats.columns = [f"{col}_{s}" for s in stats.columns]
        out = out.join(stats)
    out = out.reset_index()

    if "pct_bne" in group_by:
        strata = [g for g in group_by if g != "pct_bne"]
        out["spearman_ticks"] = np.nan
        out["spearman_uec"] = np.nan
        parts = out.groupby(strata, sort=False).groups.values() if strata else [out.index]
        for index in parts:
            sub = out.loc[index]
            if len(sub) >= 2:
                out.loc[index, "spearman_ticks"] = _spearman(sub["pct_bne"], sub["evac_ticks_mean"])
                out.loc[index, "spearman_uec"] = _spearman(sub["pct_bne"], sub["mean_uec_mean"])
    return out


def _spearman(x, y) -> float:
    if np.ptp(np.asarray(x, float)) == 0 or np.ptp(np.asarray(y, float)) == 0:
        return float("nan")
    return float(spearmanr(x, y)[0])


def stderr_progress(done: int, total: int):
    step = max(total // 20, 1)
    if done == total or done % step == 0:
        print(f"{done}/{total} runs", file=sys.stderr, flush=True)
