import numpy as np
import pytest

from bnevac.grid import (
    LEFT, RIGHT, GridSpec, PatchField, build_distance_fields, exit_mask, is_exit, moore_sum,
    occupancy_moore,
)

from oracles import distance_utility_at


@pytest.fixture
def spec():
    return GridSpec()


def test_default_band_rows(spec):
    assert (spec.band_lo, spec.band_hi) == (7, 12)
    assert exit_mask(spec).sum() == 12


@pytest.mark.parametrize("p, expected", [((0, 9), True), ((0, 0), False), ((33, 9), False),
                                         ((67, 7), True), ((67, 12), True), ((67, 13), False)])
def test_is_exit(spec, p, expected):
    assert is_exit(spec, p) is expected


def test_is_exit_rejects_outside(spec):
    with pytest.raises(ValueError):
        is_exit(spec, (68, 0))


@pytest.mark.parametrize("kwargs", [dict(width=2), dict(door_width=0), dict(height=4, door_width=5)])
def test_invalid_specs(kwargs):
    with pytest.raises(ValueError):
        GridSpec(**kwargs)


def test_distance_fields_match_scan(spec):
    ud_left, ud_right = build_distance_fields(spec)
    for x in range(0, 68, 7):
        for y in range(20):
            assert ud_left[x, y] == pytest.approx(distance_utility_at(x, y, LEFT, 68, 20, 6), abs=1e-12)
            assert ud_right[x, y] == pytest.approx(distance_utility_at(x, y, RIGHT, 68, 20, 6), abs=1e-12)


def test_distance_fields_one_inside_band(spec):
    ud_left, ud_right = build_distance_fields(spec)
    assert np.all(ud_left[0, 7:13] == 1.0)
    assert np.all(ud_right[67, 7:13] == 1.0)
    assert ud_left[0, 6] < 1.0


@pytest.mark.parametrize("spec", [GridSpec(), GridSpec(width=11, height=7, door_width=2), GridSpec(width=30, height=9, door_width=9)])
def test_mirror_symmetry_and_range(spec):
    ud_left, ud_right = build_distance_fields(spec)
    assert np.max(np.abs(ud_left - ud_right[::-1, :])) <= 1e-12
    for f in (ud_left, ud_right):
        assert f.min() >= 0.0 and f.max() <= 1.0


def test_monotone_along_rays_toward_exit(spec):
    ud_left, _ = build_distance_fields(spec)
    # straight along a band row
    row = ud_left[:, 9]
    assert np.all(np.diff(row) < 0)
    # diagonal from a corner toward the nearest band cell (0, 7)
    diag = [ud_left[k, 7 - k] for k in range(7, -1, -1)]
    assert all(a <= b for a, b in zip(diag, diag[1:]))
    # strictly decreasing with distance
    d_order = np.argsort(ud_left.ravel())
    assert ud_left.ravel()[d_order[0]] == ud_left.min()


def test_occupancy_moore_examples(spec):
    f = PatchField.empty(spec)
    assert occupancy_moore(f, (10, 10)) == 0
    f.occupancy[10, 10] = 1
    assert occupancy_moore(f, (10, 10)) == 1
    f.occupancy[9:12, 9:12] = 1
    assert occupancy_moore(f, (10, 10)) == 9
    assert occupancy_moore(f, (12, 10)) == 3


def test_occupancy_moore_clipped_at_corner(spec):
    f = PatchField.empty(spec)
    f.occupancy[:] = 1
    assert occupancy_moore(f, (0, 0)) == 4
    assert occupancy_moore(f, (67, 10)) == 6
    with pytest.raises(ValueError):
        occupancy_moore(f, (-1, 0))


def test_moore_sum_matches_pointwise(spec):
    rng = np.random.default_rng(3)
    f = PatchField.empty(spec)
    f.occupancy[:] = rng.integers(0, 4, size=f.occupancy.shape)
    m = moore_sum(f.occupancy)
    for x, y in [(0, 0), (5, 19), (67, 0), (33, 10), (67, 19)]:
        assert m[x, y] == occupancy_moore(f, (x, y))
