"""Per-agent movement policies: Shortest Route, Random Follow and BNE.

Each policy maps an agent's view of the tick-start world to a target patch.
The compiled helpers below are shared with the tick kernel in
:mod:`bnevac.engine`; the public functions wrap them for single agents.
"""

from dataclasses import dataclass
from typing import Optional, Sequence

import numba
import numpy as np

from .grid import LEFT, RIGHT, GridSpec, PatchField, build_distance_fields, occupancy_moore
from .utilities import BnePredictionParams, expected_comfort_table

SR, RF, BNE = 0, 1, 2
POLICY_NAMES = {SR: "SR", RF: "RF", BNE: "BNE"}


@dataclass
class AgentState:
    id: int
    pos: tuple  # continuous (x, y) in patch units
    policy: int
    exit_side: int
    speed: float = 0.0
    leader: Optional[int] = None

    @property
    def patch(self):
        return int(np.floor(self.pos[0])), int(np.floor(self.pos[1]))


# -- compiled helpers ---------------------------------------------------------

@numba.njit(cache=True)
def _sign(v):
    if v > 0:
        return 1
    if v < 0:
        return -1
    return 0


@numba.njit(cache=True)
def _candidates(x, y, side, width, height, out):
    """Fill ``out[:k]`` with the candidate patches and return ``k``."""
    f = 1 if side == RIGHT else -1
    # up, forward-up, forward, forward-down, down, stay
    dxs = (0, f, f, f, 0, 0)
    dys = (1, 1, 0, -1, -1, 0)
    k = 0
    for i in range(6):
        cx = x + dxs[i]
        cy = y + dys[i]
        if 0 <= cx < width and 0 <= cy < height:
            out[k, 0] = cx
            out[k, 1] = cy
            k += 1
    return k


@numba.njit(cache=True)
def _pick_best(scores, k, rng):
    """Index of the maximum of ``scores[:k]``; exact ties drawn uniformly."""
    best = scores[0]
    for i in range(1, k):
        if scores[i] > best:
            best = scores[i]
    n_best = 0
    for i in range(k):
        if scores[i] == best:
            n_best += 1
    if n_best == 1:
        for i in range(k):
            if scores[i] == best:
                return i
    pick = rng.integers(0, n_best)
    for i in range(k):
        if scores[i] == best:
            if pick == 0:
                return i
            pick -= 1
    return -1


@numba.njit(cache=True)
def _bne_target(x, y, side, ud, moore, ec_table, weight_ud, rng, cand, scores):
    """BNE choice from the tick-start Moore counts.

    The deciding agent sits on ``(x, y)``, inside every candidate's block, so
    one occupant is removed from each count.
    """
    width, height = ud.shape
    k = _candidates(x, y, side, width, height, cand)
    for i in range(k):
        cx = cand[i, 0]
        cy = cand[i, 1]
        n = moore[cx, cy] - 1
        if n < 0:
            n = 0
        scores[i] = weight_ud * ud[cx, cy] + ec_table[n]
    j = _pick_best(scores, k, rng)
    return cand[j, 0], cand[j, 1]


@numba.njit(cache=True)
def _sr_target(x, y, side, width, band_lo, band_hi):
    """One king-move step toward the nearest exit-band patch on ``side``."""
    tx = 0 if side == LEFT else width - 1
    ty = min(max(y, band_lo), band_hi)
    return x + _sign(tx - x), y + _sign(ty - y)


# -- public single-agent API --------------------------------------------------

def candidate_patches(agent: AgentState, spec: GridSpec):
    x, y = agent.patch
    out = np.empty((6, 2), dtype=np.int64)
    k = _candidates(x, y, agent.exit_side, spec.width, spec.height, out)
    return [(int(a), int(b)) for a, b in out[:k]]


def choose_best(scores: Sequence[float], rng: np.random.Generator) -> int:
    scores = np.asarray(scores, dtype=float)
    if scores.size == 0:
        raise ValueError("no candidates to choose from")
    return int(_pick_best(scores, scores.size, rng))


def competitor_count(agent: AgentState, candidate, field: PatchField) -> int:
    n = occupancy_moore(field, candidate)
    ax, ay = agent.patch
    cx, cy = candidate
    if abs(ax - cx) <= 1 and abs(ay - cy) <= 1:
        n -= 1
    return max(n, 0)


def bne_decide(agent: AgentState, field: PatchField, params: BnePredictionParams,
               rng: np.random.Generator):
    """Target patch maximising ``weight_ud * ud + expected comfort`` over the
    candidate set. ``field.moore`` must be current for this tick."""
    x, y = agent.patch
    ud = field.ud(agent.exit_side)
    ec_table = expected_comfort_table(int(field.moore.max()), params)
    cand = np.empty((6, 2), dtype=np.int64)
    scores = np.empty(6)
    tx, ty = _bne_target(x, y, agent.exit_side, ud, field.moore, ec_table,
                         params.weight_ud, rng, cand, scores)
    return int(tx), int(ty)


def sr_decide(agent: AgentState, spec: GridSpec):
    x, y = agent.patch
    tx, ty = _sr_target(x, y, agent.exit_side, spec.width, spec.band_lo, spec.band_hi)
    return int(tx), int(ty)


def nearer_exit(spec: GridSpec, patch, rng: np.random.Generator) -> int:
    """Side of the closer exit band; an exact tie is split uniformly."""
    x, y = patch
    dy = max(0, spec.band_lo - y, y - spec.band_hi)
    d_left = np.hypot(x, dy)
    d_right = np.hypot(spec.width - 1 - x, dy)
    if d_left < d_right:
        return LEFT
    if d_right < d_left:
        return RIGHT
    return int(rng.integers(0, 2))


def eligible_leaders(agent: AgentState, agents: Sequence[AgentState], spec: GridSpec,
                     follow_radius: float):
    """Ids of the agents an RF agent may follow, in ascending order.

    A leader heads for the same exit, stands within ``follow_radius`` and is
    on a patch strictly nearer that exit. Without the last condition a crowd
    of followers only contracts onto itself and never reaches a door.
    """
    ud = build_distance_fields(spec)[agent.exit_side]
    ax, ay = agent.pos
    own = ud[agent.patch]
    out = []
    for other in agents:
        if other.id == agent.id or other.exit_side != agent.exit_side:
            continue
        if ud[other.patch] <= own:
            continue
        if np.hypot(other.pos[0] - ax, other.pos[1] - ay) <= follow_radius:
            out.append(other.id)
    return sorted(out)


def rf_decide(agent: AgentState, agents: Sequence[AgentState], spec: GridSpec,
              follow_radius: float, rng: np.random.Generator):
    """Pick a random visible leader and step toward it; without one, behave as SR.

    ``agents`` holds the tick-start state of every agent still in the space.
    Sets ``agent.leader``.
    """
    if follow_radius <= 0:
        raise ValueError("follow_radius must be positive")
    leaders = eligible_leaders(agent, agents, spec, follow_radius)
    if not leaders:
        agent.leader = None
        return sr_decide(agent, spec)
    agent.leader = leaders[int(rng.integers(0, len(leaders)))]
    by_id = {a.id: a for a in agents}
    lx, ly = by_id[agent.leader].patch
    x, y = agent.patch
    return x + int(np.sign(lx - x)), y + int(np.sign(ly - y))
