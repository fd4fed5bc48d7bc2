"""Independent reference computations for the test suite.

Nothing here imports the code under test.
"""

import math
from itertools import product

COMFORT = {0: 1.0, 1: 1.0, 2: 1.0, 3: 0.51, 4: 0.07}


def enumerated_expected_comfort(n_competitors, p_m):
    """Expected comfort by walking every enter/stay-out outcome of the competitors."""
    total = 0.0
    for outcome in product((0, 1), repeat=n_competitors):
        entrants = sum(outcome)
        weight = 1.0
        for entered in outcome:
            weight *= p_m if entered else 1.0 - p_m
        total += weight * COMFORT.get(entrants, 0.0)
    return total


def binomial_expected_comfort(n_competitors, p_m):
    return sum(math.comb(n_competitors, n) * p_m**n * (1 - p_m) ** (n_competitors - n) * COMFORT.get(n, 0.0)
               for n in range(n_competitors + 1))


def exit_rows(height, door_width):
    lo = (height - door_width) // 2
    return range(lo, lo + door_width)


def distance_utility_at(x, y, side, width, height, door_width):
    """``(D - d) / D`` by scanning every exit-band patch for the nearest one."""
    col = 0 if side == 0 else width - 1
    d = min(math.hypot(x - col, y - r) for r in exit_rows(height, door_width))
    D = math.hypot(width, height)
    return (D - d) / D


def forward_candidates(x, y, side, width, height):
    f = 1 if side == 1 else -1
    raw = [(x, y + 1), (x + f, y + 1), (x + f, y), (x + f, y - 1), (x, y - 1), (x, y)]
    return [(a, b) for a, b in raw if 0 <= a < width and 0 <= b < height]


def block_count(occupancy, x, y):
    w, h = len(occupancy), len(occupancy[0])
    return sum(occupancy[a][b]
               for a in range(x - 1, x + 2) for b in range(y - 1, y + 2)
               if 0 <= a < w and 0 <= b < h)


def bne_scores(agent_patch, side, occupancy, width, height, door_width, p_m, weight_ud):
    """Score of every candidate patch, recomputed from scratch."""
    x, y = agent_patch
    scores = {}
    for c in forward_candidates(x, y, side, width, height):
        n = max(block_count(occupancy, *c) - 1, 0)  # the decider is inside every block
        scores[c] = (weight_ud * distance_utility_at(*c, side, width, height, door_width)
                     + binomial_expected_comfort(n, p_m))
    return scores


def free_sr_ticks(x, y, side, width, height, door_width, step):
    """Ticks a lone agent needs walking by king moves toward its band at a
    constant ``step`` patches per tick, stopping on each target centre."""
    rows = exit_rows(height, door_width)
    col = 0 if side == 0 else width - 1
    t = 0
    while True:
        px, py = math.floor(x), math.floor(y)
        if px == col and py in rows:
            return t
        ty = min(max(py, rows[0]), rows[-1])
        tx = px + (col > px) - (col < px)
        ty = py + (ty > py) - (ty < py)
        cx, cy = tx + 0.5, ty + 0.5
        d = math.hypot(cx - x, cy - y)
        move = min(step, d)
        if d > 0:
            x += (cx - x) / d * move
            y += (cy - y) / d * move
        t += 1
        if t > 10_000:
            raise RuntimeError("oracle walk did not terminate")
