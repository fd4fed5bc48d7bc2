"""Run observables: evacuation time and mean expected comfort."""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass(frozen=True)
class RunRecord:
    evac_ticks: int
    evac_seconds: float
    mean_uec: float
    stalled: bool
    seed: int
    config: object  # SimConfig echo

    def summary_line(self) -> str:
        c = self.config
        return (
            f"pattern={c.moving_pattern} number_persons={c.number_persons} pct_bne={c.pct_bne:g} "
            f"seed={self.seed} evac_ticks={self.evac_ticks} evac_seconds={self.evac_seconds:.2f} "
            f"mean_uec={self.mean_uec:.6f} stalled={self.stalled}"
        )


def record_tick_uec(world) -> Optional[float]:
    """Mean expected comfort over the patches occupied this tick, each patch
    counted once. ``None`` for an empty world."""
    occupied = world.field.occupancy > 0
    if not occupied.any():
        return None
    return float(world.field.uec[occupied].mean())


def finalize(evac_ticks: int, samples, config, stalled: bool = False) -> RunRecord:
    mean_uec = float(np.mean(samples)) if len(samples) else float("nan")
    if stalled:
        evac_ticks = config.max_ticks
    return RunRecord(
        evac_ticks=int(evac_ticks),
        evac_seconds=evac_ticks * config.dt,
        mean_uec=mean_uec,
        stalled=bool(stalled),
        seed=config.seed,
        config=config,
    )
