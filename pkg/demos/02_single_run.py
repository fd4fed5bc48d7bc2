"""
One evacuation, tick by tick
============================

Run the default mixed crowd and watch the room empty out.
"""

import numpy as np

from bnevac import SimConfig, advance_tick, initialize

config = SimConfig(number_persons=2000, moving_pattern="BNE+SR", pct_bne=50, seed=7)
world = initialize(config)


def picture(world, cols=34):
    # squeeze the 68x20 grid into a character map, two patches per column
    occ = world.field.occupancy
    shades = " .:*#"
    lines = []
    for y in range(occ.shape[1] - 1, -1, -1):
        row = occ[:, y].reshape(cols, -1).sum(axis=1)
        lines.append("|" + "".join(shades[min(int(v), 4)] for v in row) + "|")
    return "\n".join(lines)


while world.remaining:
    if world.tick % 40 == 0:
        print(f"tick {world.tick}: {world.remaining} inside, {world.evacuated} out")
        print(picture(world))
        print()
    advance_tick(world)

print(f"empty after {world.tick} ticks ({world.tick * config.dt:.1f} s)")
print(f"mean expected comfort {np.mean(world.uec_samples):.3f}")
