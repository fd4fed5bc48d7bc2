"""Discrete-time evacuation engine.

One tick: refresh the expected-comfort field from the tick-start occupancy,
then every remaining agent (in a fresh random order) sets its speed from the
live crowd density around it, picks a target patch with its policy and walks
toward that patch's centre. Agents standing on an exit band at the end of
the tick leave the space.
"""

from dataclasses import asdict, dataclass, fields, replace
from typing import Callable, Optional

import numba
import numpy as np

from . import metrics
from .behaviors import BNE, RF, SR, AgentState, _bne_target, _sr_target, _sign, nearer_exit
from .grid import GridSpec, PatchField, exit_mask, moore_sum
from .utilities import BnePredictionParams, _speed, expected_comfort_table

PATTERNS = ("SR", "RF", "BNE", "BNE+SR", "BNE+RF")


class SimulationStalled(RuntimeError):
    """Raised by :func:`advance_tick` once ``max_ticks`` is exhausted."""


@dataclass(frozen=True)
class SimConfig:
    number_persons: int = 2000
    pct_bne: float = 50.0
    probability_competing: float = 16.7
    door_width: int = 6
    move_speed: float = 2.0
    step_length: float = 0.7
    follow_radius: float = 3.0
    weight_ud: float = 1.0
    moving_pattern: str = "BNE+SR"
    seed: int = 0
    max_ticks: int = 50_000
    width: int = 68
    height: int = 20

    def __post_init__(self):
        if self.number_persons < 1:
            raise ValueError(f"number_persons must be >= 1, got {self.number_persons}")
        if not (0 <= self.pct_bne <= 100):
            raise ValueError(f"pct_bne must lie in [0, 100], got {self.pct_bne}")
        if not (0 < self.probability_competing < 100):
            raise ValueError(f"probability_competing must lie in (0, 100), got {self.probability_competing}")
        if self.moving_pattern not in PATTERNS:
            raise ValueError(f"moving_pattern must be one of {PATTERNS}, got {self.moving_pattern!r}")
        if self.move_speed <= 0 or self.step_length <= 0:
            raise ValueError("move_speed and step_length must be positive")
        if self.follow_radius <= 0:
            raise ValueError("follow_radius must be positive")
        if self.weight_ud < 0:
            raise ValueError("weight_ud must be >= 0")
        if self.max_ticks < 1:
            raise ValueError("max_ticks must be >= 1")
        if not (0 <= self.seed < 2**64):
            raise ValueError("seed must be a 64-bit unsigned integer")
        self.grid_spec()  # validates geometry

    @property
    def dt(self) -> float:
        """Seconds per tick: one free-speed step."""
        return self.step_length / self.move_speed

    def grid_spec(self) -> GridSpec:
        return GridSpec(width=self.width, height=self.height, door_width=self.door_width)

    def prediction_params(self) -> BnePredictionParams:
        return BnePredictionParams(p_m=self.probability_competing / 100.0, weight_ud=self.weight_ud)

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]

    @classmethod
    def coerce(cls, name: str, value):
        """Convert a textual value to the type of field ``name``."""
        types = {f.name: f.type for f in fields(cls)}
        if name not in types:
            raise KeyError(f"unknown parameter {name!r}")
        kind = types[name]
        if kind in (int, "int"):
            return int(float(value)) if isinstance(value, str) and "." in value else int(value)
        if kind in (float, "float"):
            return float(value)
        return str(value).strip()

    def with_overrides(self, **overrides) -> "SimConfig":
        return replace(self, **{k: self.coerce(k, v) for k, v in overrides.items()})

    def as_dict(self):
        return asdict(self)


class World:
    """Mutable state of one run. Per-agent arrays are indexed by agent id."""

    def __init__(self, config: SimConfig):
        self.config = config
        self.spec = config.grid_spec()
        self.params = config.prediction_params()
        self.tick = 0
        self.evacuated = 0
        self.rng = np.random.default_rng(config.seed)
        self.field = PatchField.empty(self.spec)
        self.exit_mask = exit_mask(self.spec)
        self.ec_table = np.ones(1)
        self.uec_samples = []
        n = config.number_persons
        self.pos = np.zeros((n, 2))
        self.patch = np.zeros((n, 2), dtype=np.int64)
        self.policy = np.zeros(n, dtype=np.int64)
        self.side = np.zeros(n, dtype=np.int64)
        self.speed = np.zeros(n)
        self.leader = np.full(n, -1, dtype=np.int64)
        self.alive = np.ones(n, dtype=np.bool_)

    @property
    def remaining(self) -> int:
        return int(self.alive.sum())

    @property
    def agents(self):
        """Snapshot of the agents still in the space as :class:`AgentState` records."""
        out = []
        for i in np.flatnonzero(self.alive):
            out.append(AgentState(
                id=int(i), pos=(float(self.pos[i, 0]), float(self.pos[i, 1])),
                policy=int(self.policy[i]), exit_side=int(self.side[i]),
                speed=float(self.speed[i]),
                leader=None if self.leader[i] < 0 else int(self.leader[i]),
            ))
        return out


def _assign_policies(config: SimConfig, rng: np.random.Generator) -> np.ndarray:
    n = config.number_persons
    pattern = config.moving_pattern
    if pattern in ("SR", "RF", "BNE"):
        return np.full(n, {"SR": SR, "RF": RF, "BNE": BNE}[pattern], dtype=np.int64)
    other = SR if pattern == "BNE+SR" else RF
    n_bne = int(np.floor(config.pct_bne * n / 100.0 + 0.5))
    policy = np.full(n, other, dtype=np.int64)
    policy[rng.permutation(n)[:n_bne]] = BNE
    return policy


def initialize(config: SimConfig) -> World:
    world = World(config)
    spec, rng = world.spec, world.rng
    n = config.number_persons

    free = np.argwhere(~world.exit_mask)
    cells = free[rng.integers(0, len(free), size=n)]
    world.pos[:] = cells + rng.random((n, 2))
    world.patch[:] = cells
    world.policy[:] = _assign_policies(config, rng)
    for i in range(n):
        world.side[i] = nearer_exit(spec, cells[i], rng)

    np.add.at(world.field.occupancy, (cells[:, 0], cells[:, 1]), 1)
    refresh_expected_comfort(world)
    rho = world.field.moore[cells[:, 0], cells[:, 1]] / 9.0
    world.speed[:] = [_speed(r, config.move_speed) for r in rho]
    return world


def place_agents(config: SimConfig, positions, policies=None, sides=None) -> World:
    """World with agents at explicit continuous ``positions`` instead of random ones.

    ``policies`` defaults to what ``config.moving_pattern`` assigns and
    ``sides`` to the nearer exit. ``number_persons`` is taken from
    ``positions``, which may be empty.
    """
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    n = len(positions)
    world = World(replace(config, number_persons=max(n, 1)))
    world.config = config
    if n == 0:
        for name in ("pos", "patch", "policy", "side", "speed", "leader", "alive"):
            setattr(world, name, getattr(world, name)[:0])
    spec = world.spec
    cells = np.floor(positions).astype(np.int64)
    if n and not (np.all((cells[:, 0] >= 0) & (cells[:, 0] < spec.width))
                  and np.all((cells[:, 1] >= 0) & (cells[:, 1] < spec.height))):
        raise ValueError("positions must lie inside the grid")
    world.pos[:] = positions
    world.patch[:] = cells
    if policies is None:
        world.policy[:] = _assign_policies(replace(config, number_persons=max(n, 1)), world.rng)[:n]
    else:
        world.policy[:] = policies
    for i in range(n):
        world.side[i] = nearer_exit(spec, cells[i], world.rng) if sides is None else sides[i]
    if n:
        np.add.at(world.field.occupancy, (cells[:, 0], cells[:, 1]), 1)
    refresh_expected_comfort(world)
    if n:
        rho = world.field.moore[cells[:, 0], cells[:, 1]] / 9.0
        world.speed[:] = [_speed(r, config.move_speed) for r in rho]
    return world


def refresh_expected_comfort(world: World, params: Optional[BnePredictionParams] = None):
    """Recompute Moore counts and the expected-comfort field from the current occupancy."""
    params = params or world.params
    f = world.field
    f.moore = moore_sum(f.occupancy)
    world.ec_table = expected_comfort_table(int(f.moore.max()), params)
    f.uec = world.ec_table[f.moore]
    return f.uec


@numba.njit(cache=True)
def _tick_kernel(pos, patch, policy, side, speed, leader, alive, occ, moore, ec_table,
                 ud_left, ud_right, weight_ud, band_lo, band_hi, move_speed, step_scale,
                 follow_radius, rng):
    width, height = occ.shape
    n = alive.shape[0]
    idx = np.empty(n, dtype=np.int64)
    m = 0
    for i in range(n):
        if alive[i]:
            idx[m] = i
            m += 1
    idx = idx[:m]

    # tick-start snapshot of positions, bucketed by patch for leader search
    snap_pos = pos.copy()
    snap_patch = patch.copy()
    n_cells = width * height
    start = np.zeros(n_cells + 1, dtype=np.int64)
    for i in idx:
        start[snap_patch[i, 0] * height + snap_patch[i, 1] + 1] += 1
    for c in range(n_cells):
        start[c + 1] += start[c]
    fill = start[:-1].copy()
    members = np.empty(m, dtype=np.int64)
    for i in idx:
        c = snap_patch[i, 0] * height + snap_patch[i, 1]
        members[fill[c]] = i
        fill[c] += 1

    reach = int(np.ceil(follow_radius))
    buf = np.empty(m, dtype=np.int64)
    cand = np.empty((6, 2), dtype=np.int64)
    scores = np.empty(6)

    order = rng.permutation(m)
    for j in range(m):
        i = idx[order[j]]
        x = patch[i, 0]
        y = patch[i, 1]

        live = 0
        for cx in range(max(x - 1, 0), min(x + 2, width)):
            for cy in range(max(y - 1, 0), min(y + 2, height)):
                live += occ[cx, cy]
        sp = _speed(live / 9.0, move_speed)
        speed[i] = sp

        ud = ud_left if side[i] == 0 else ud_right
        if policy[i] == BNE:
            tx, ty = _bne_target(x, y, side[i], ud, moore, ec_table, weight_ud, rng, cand, scores)
        elif policy[i] == RF:
            k = 0
            for cx in range(max(x - reach, 0), min(x + reach + 1, width)):
                for cy in range(max(y - reach, 0), min(y + reach + 1, height)):
                    c = cx * height + cy
                    for q in range(start[c], start[c + 1]):
                        o = members[q]
                        if o == i or side[o] != side[i]:
                            continue
                        # only agents nearer the shared exit are in view
                        if ud[snap_patch[o, 0], snap_patch[o, 1]] <= ud[x, y]:
                            continue
                        ddx = snap_pos[o, 0] - snap_pos[i, 0]
                        ddy = snap_pos[o, 1] - snap_pos[i, 1]
                        if np.sqrt(ddx * ddx + ddy * ddy) <= follow_radius:
                            buf[k] = o
                            k += 1
            if k == 0:
                leader[i] = -1
                tx, ty = _sr_target(x, y, side[i], width, band_lo, band_hi)
            else:
                chosen = np.sort(buf[:k])[rng.integers(0, k)]
                leader[i] = chosen
                tx = x + _sign(snap_patch[chosen, 0] - x)
                ty = y + _sign(snap_patch[chosen, 1] - y)
        else:
            tx, ty = _sr_target(x, y, side[i], width, band_lo, band_hi)

        dx = tx + 0.5 - pos[i, 0]
        dy = ty + 0.5 - pos[i, 1]
        dist = np.sqrt(dx * dx + dy * dy)
        if dist > 0.0:
            s = min(sp * step_scale, dist)
            pos[i, 0] += s * dx / dist
            pos[i, 1] += s * dy / dist
        nx = min(max(int(np.floor(pos[i, 0])), 0), width - 1)
        ny = min(max(int(np.floor(pos[i, 1])), 0), height - 1)
        if nx != x or ny != y:
            occ[x, y] -= 1
            occ[nx, ny] += 1
            patch[i, 0] = nx
            patch[i, 1] = ny

    gone = 0
    for i in idx:
        px = patch[i, 0]
        py = patch[i, 1]
        if (px == 0 or px == width - 1) and band_lo <= py <= band_hi:
            alive[i] = False
            occ[px, py] -= 1
            gone += 1
    return gone


def advance_tick(world: World, config: Optional[SimConfig] = None) -> World:
    config = config or world.config
    if world.remaining == 0:
        raise ValueError("no agents remain; the run is already complete")
    if world.tick >= config.max_ticks:
        raise SimulationStalled(f"{world.remaining} agents remain after {world.tick} ticks")
    refresh_expected_comfort(world, config.prediction_params())
    sample = metrics.record_tick_uec(world)
    if sample is not None:
        world.uec_samples.append(sample)
    f = world.field
    world.evacuated += _tick_kernel(
        world.pos, world.patch, world.policy, world.side, world.speed, world.leader,
        world.alive, f.occupancy, f.moore, world.ec_table, f.ud_left, f.ud_right,
        float(config.weight_ud), world.spec.band_lo, world.spec.band_hi,
        float(config.move_speed), config.dt / world.spec.patch_side,
        float(config.follow_radius), world.rng,
    )
    world.tick += 1
    return world


def snapshot(world: World) -> str:
    """Plain-text occupancy grid, top row first, headed by the tick number."""
    occ = world.field.occupancy
    lines = [f"tick {world.tick}"]
    for y in range(occ.shape[1] - 1, -1, -1):
        lines.append(" ".join(str(int(v)) for v in occ[:, y]))
    return "\n".join(lines) + "\n"


def run_to_completion(config: SimConfig,
                      on_tick: Optional[Callable[[World], None]] = None) -> "metrics.RunRecord":
    """Run until the space is empty or ``max_ticks`` is reached.

    ``on_tick`` is called with the world after initialisation and after every tick.
    """
    world = initialize(config)
    if on_tick is not None:
        on_tick(world)
    stalled = False
    while world.remaining:
        if world.tick >= config.max_ticks:
            stalled = True
            break
        advance_tick(world, config)
        if on_tick is not None:
            on_tick(world)
    return metrics.finalize(world.tick, world.uec_samples, config, stalled=stalled)
