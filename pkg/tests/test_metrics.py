import math

import numpy as np
import pytest

from bnevac.engine import SimConfig, advance_tick, initialize, place_agents, refresh_expected_comfort, run_to_completion
from bnevac.metrics import finalize, record_tick_uec


def test_single_agent_tick_mean():
    w = place_agents(SimConfig(), [(20.5, 4.5)])
    refresh_expected_comfort(w)
    assert record_tick_uec(w) == 1.0


def test_two_patch_mean():
    w = place_agents(SimConfig(), [(20.5, 4.5), (40.5, 4.5)])
    w.field.uec[20, 4] = 1.0
    w.field.uec[40, 4] = 0.5
    assert record_tick_uec(w) == 0.75


def test_occupied_patch_weighted_once():
    w = place_agents(SimConfig(), [(20.5, 4.5)] * 5 + [(40.5, 4.5)])
    w.field.uec[20, 4] = 0.2
    w.field.uec[40, 4] = 1.0
    assert record_tick_uec(w) == pytest.approx(0.6)


def test_empty_world_emits_nothing():
    assert record_tick_uec(place_agents(SimConfig(), [])) is None


@pytest.mark.parametrize("samples, expected", [([1.0], 1.0), ([1.0, 0.5], 0.75)])
def test_finalize_mean(samples, expected):
    rec = finalize(10, samples, SimConfig())
    assert rec.mean_uec == expected
    assert rec.evac_seconds == pytest.approx(10 * 0.35)
    assert not rec.stalled


def test_finalize_stalled_keeps_partial_mean():
    c = SimConfig(max_ticks=7)
    rec = finalize(7, [0.9, 0.7], c, stalled=True)
    assert rec.stalled and rec.mean_uec == pytest.approx(0.8) and rec.evac_ticks == 7


def test_no_samples_gives_nan():
    assert math.isnan(finalize(0, [], SimConfig()).mean_uec)


def test_sparse_run_has_unit_comfort():
    # two agents never share a Moore block with more than two occupants
    rec = run_to_completion(SimConfig(number_persons=2, moving_pattern="SR", seed=3))
    assert rec.mean_uec == 1.0


@pytest.mark.parametrize("pattern", ["SR", "BNE+RF"])
def test_mean_uec_in_unit_interval(pattern):
    rec = run_to_completion(SimConfig(number_persons=1500, moving_pattern=pattern, seed=6))
    assert 0.0 <= rec.mean_uec <= 1.0
    assert rec.evac_ticks >= 1


def test_far_agents_do_not_lower_comfort():
    c = SimConfig(moving_pattern="SR")
    base = [(30.5, 9.5), (30.5, 10.5)]
    far = [(10.5, 1.5), (50.5, 18.5)]
    sparse = place_agents(c, base, sides=[1, 1])
    more = place_agents(c, base + far, sides=[1, 1, 0, 1])
    a, b = [], []
    while sparse.remaining:
        advance_tick(sparse)
        a.extend(sparse.uec_samples[-1:])
    while more.remaining:
        advance_tick(more)
        b.extend(more.uec_samples[-1:])
    assert np.mean(b) >= np.mean(a) - 1e-12
