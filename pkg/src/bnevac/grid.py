"""Evacuation space: a rectangular patch grid with one exit band on each side wall.

Arrays over the grid are indexed ``[x, y]`` with shape ``(width, height)``;
``x = 0`` is the left wall and ``y = 0`` the bottom row.
"""

from dataclasses import dataclass

import numpy as np

from .utilities import distance_utility

LEFT = 0
RIGHT = 1


@dataclass(frozen=True)
class GridSpec:
    width: int = 68
    height: int = 20
    door_width: int = 6
    patch_side: float = 1.0

    def __post_init__(self):
        if self.width < 3:
            raise ValueError(f"width must be >= 3, got {self.width}")
        if not (1 <= self.door_width <= self.height):
            raise ValueError(
                f"need 1 <= door_width <= height, got door_width={self.door_width}, height={self.height}"
            )
        if self.patch_side <= 0:
            raise ValueError("patch_side must be positive")

    @property
    def band_lo(self) -> int:
        """Lowest row of the exit bands."""
        return (self.height - self.door_width) // 2

    @property
    def band_hi(self) -> int:
        """Highest row of the exit bands (inclusive)."""
        return self.band_lo + self.door_width - 1

    @property
    def diagonal(self) -> float:
        return float(np.hypot(self.width, self.height))

    def exit_column(self, side: int) -> int:
        return 0 if side == LEFT else self.width - 1

    def contains(self, x, y) -> bool:
        return 0 <= x < self.width and 0 <= y < self.height


@dataclass
class PatchField:
    """Per-patch utilities and occupancy.

    ``ud_left``/``ud_right`` are static once built. ``uec``, ``moore`` and
    ``occupancy`` are rewritten by the engine every tick.
    """

    ud_left: np.ndarray
    ud_right: np.ndarray
    uec: np.ndarray
    occupancy: np.ndarray
    moore: np.ndarray

    @classmethod
    def empty(cls, spec: GridSpec) -> "PatchField":
        ud_left, ud_right = build_distance_fields(spec)
        shape = (spec.width, spec.height)
        return cls(
            ud_left=ud_left,
            ud_right=ud_right,
            uec=np.ones(shape),
            occupancy=np.zeros(shape, dtype=np.int64),
            moore=np.zeros(shape, dtype=np.int64),
        )

    def ud(self, side: int) -> np.ndarray:
        return self.ud_left if side == LEFT else self.ud_right


def distance_to_exit(spec: GridSpec, side: int) -> np.ndarray:
    """Euclidean distance (patch units) from each patch centre to the nearest
    patch centre of the exit band on ``side``."""
    xs = np.arange(spec.width)[:, None]
    ys = np.arange(spec.height)[None, :]
    dx = np.abs(xs - spec.exit_column(side))
    # vertical offset to the band is zero inside the band rows
    dy = np.maximum(0, np.maximum(spec.band_lo - ys, ys - spec.band_hi))
    return np.sqrt(dx * dx + dy * dy).astype(float)


def build_distance_fields(spec: GridSpec):
    """Return ``(ud_left, ud_right)`` with ``ud = (D - d) / D``, D the grid diagonal."""
    D = spec.diagonal
    return (distance_utility(distance_to_exit(spec, LEFT), D),
            distance_utility(distance_to_exit(spec, RIGHT), D))


def exit_mask(spec: GridSpec) -> np.ndarray:
    mask = np.zeros((spec.width, spec.height), dtype=bool)
    mask[0, spec.band_lo:spec.band_hi + 1] = True
    mask[spec.width - 1, spec.band_lo:spec.band_hi + 1] = True
    return mask


def is_exit(spec: GridSpec, p) -> bool:
    x, y = p
    if not spec.contains(x, y):
        raise ValueError(f"patch {p} outside {spec.width}x{spec.height} grid")
    return (x == 0 or x == spec.width - 1) and spec.band_lo <= y <= spec.band_hi


def moore_sum(counts: np.ndarray) -> np.ndarray:
    """Sum of ``counts`` over each patch's clipped 3x3 block."""
    padded = np.pad(counts, 1)
    w, h = counts.shape
    out = np.zeros_like(counts)
    for dx in range(3):
        for dy in range(3):
            out += padded[dx:dx + w, dy:dy + h]
    return out


def occupancy_moore(field: PatchField, p) -> int:
    x, y = p
    w, h = field.occupancy.shape
    if not (0 <= x < w and 0 <= y < h):
        raise ValueError(f"patch {p} outside {w}x{h} grid")
    block = field.occupancy[max(x - 1, 0):x + 2, max(y - 1, 0):y + 2]
    return int(block.sum())
