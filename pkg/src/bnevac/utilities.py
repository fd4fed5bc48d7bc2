"""Utility functions driving the BNE decision rule, and the speed-density relation.

The scalar kernels (``_expected_comfort``, ``_speed``) are numba-compiled so the
tick loop can call them directly; the public wrappers validate arguments.
"""

from dataclasses import dataclass

import numba
import numpy as np

FREE_SPEED = 1.4  # m/s, reference free-walking speed of the density relation
MAX_COMPETITORS = 10_000

# occupant count -> comfort; counts >= 5 are zero
COMFORT_TABLE = np.array([1.00, 1.00, 1.00, 0.51, 0.07])


@dataclass(frozen=True)
class BnePredictionParams:
    p_m: float = 1 / 6
    weight_ud: float = 1.0

    def __post_init__(self):
        if not (0.0 < self.p_m < 1.0):
            raise ValueError(f"p_m must lie in (0, 1), got {self.p_m}")
        if self.weight_ud < 0:
            raise ValueError(f"weight_ud must be >= 0, got {self.weight_ud}")


def distance_utility(d, diagonal: float):
    """Linear attractiveness ``(D - d) / D`` of a point at distance ``d`` from an exit."""
    return (diagonal - d) / diagonal


def comfort_utility(n: int) -> float:
    if n < 0:
        raise ValueError(f"occupant count must be >= 0, got {n}")
    return float(COMFORT_TABLE[n]) if n < len(COMFORT_TABLE) else 0.0


@numba.njit(cache=True)
def _expected_comfort(n_comp, p_m):
    # binomial pmf built by the recurrence pmf(k+1) = pmf(k) * (N-k)/(k+1) * p/(1-p);
    # terms past k = 4 carry zero comfort
    if n_comp <= 2:
        return 1.0  # the pmf sums to one, skip the rounding
    q = 1.0 - p_m
    ratio = p_m / q
    term = q ** n_comp
    total = term * COMFORT_TABLE[0]
    for k in range(min(n_comp, 4)):
        term = term * (n_comp - k) / (k + 1) * ratio
        total += term * COMFORT_TABLE[k + 1]
    return total


def _p_m(params) -> float:
    return params.p_m if isinstance(params, BnePredictionParams) else float(params)


def expected_comfort(n_competitors: int, params=BnePredictionParams()) -> float:
    """Expected comfort of a patch that ``n_competitors`` agents may each enter
    independently with probability ``p_m``.

    ``params`` is a :class:`BnePredictionParams` or a bare ``p_m``.
    """
    p_m = _p_m(params)
    if not (0.0 < p_m < 1.0):
        raise ValueError(f"p_m must lie in (0, 1), got {p_m}")
    if n_competitors < 0 or n_competitors > MAX_COMPETITORS:
        raise ValueError(f"competitor count must lie in [0, {MAX_COMPETITORS}], got {n_competitors}")
    return float(_expected_comfort(int(n_competitors), p_m))


def expected_comfort_table(max_n: int, params=BnePredictionParams()) -> np.ndarray:
    """``expected_comfort(N)`` for ``N = 0 .. max_n`` as an array."""
    p_m = _p_m(params)
    return np.array([_expected_comfort(n, p_m) for n in range(max_n + 1)])


def total_utility(ud, uec, params=BnePredictionParams()):
    return params.weight_ud * ud + uec


@numba.njit(cache=True)
def _speed(rho, move_speed):
    if rho <= 4.0:
        v = 1.4
    elif rho < 8.0:
        v = 0.03 * rho * rho - 0.64 * rho + 3.36
    else:
        v = 0.1
    return v * (move_speed / FREE_SPEED)


def speed_from_density(rho: float, move_speed: float = FREE_SPEED) -> float:
    """Walking speed (m/s) at crowd density ``rho`` (person/m^2).

    The piecewise relation is kept exactly as calibrated, including its jumps
    at 4 and 8 person/m^2, then rescaled so ``move_speed`` replaces 1.4 m/s.
    """
    if rho < 0:
        raise ValueError(f"density must be >= 0, got {rho}")
    if move_speed <= 0:
        raise ValueError(f"move_speed must be positive, got {move_speed}")
    return float(_speed(float(rho), float(move_speed)))
