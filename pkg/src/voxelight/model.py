"""Per-voxel attribute payload, sparse voxel grid, and material presets.

A voxel carries seven unit-interval attributes: per-channel transmissivity
(r_t, g_t, b_t), per-channel attenuation (r_a, g_a, b_a), and a single
diffuseness d.  The all-zero payload means clear air; grids never store it.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Iterator, Tuple

import numpy as np

from voxelight.errors import OutOfBounds, OutOfRange, UnknownMaterial

FIELD_NAMES = ("r_t", "g_t", "b_t", "r_a", "g_a", "b_a", "d")

VoxelCoord = Tuple[int, int, int]


@dataclass(frozen=True)
class VoxelAttributes:
    r_t: float
    g_t: float
    b_t: float
    r_a: float
    g_a: float
    b_a: float
    d: float

    def __post_init__(self):
        for name in FIELD_NAMES:
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise OutOfRange(name, v)

    @property
    def is_air(self) -> bool:
        return all(getattr(self, name) == 0.0 for name in FIELD_NAMES)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, n) for n in FIELD_NAMES], dtype=np.float64)

    @classmethod
    def from_array(cls, a) -> "VoxelAttributes":
        return cls(*(float(v) for v in a))

    @property
    def transmissivity(self) -> Tuple[float, float, float]:
        return (self.r_t, self.g_t, self.b_t)

    @property
    def attenuation(self) -> Tuple[float, float, float]:
        return (self.r_a, self.g_a, self.b_a)


def make_attributes(r_t, g_t, b_t, r_a, g_a, b_a, d) -> VoxelAttributes:
    """Validated constructor; raises OutOfRange on any field outside [0, 1]."""
    return VoxelAttributes(
        float(r_t), float(g_t), float(b_t), float(r_a), float(g_a), float(b_a), float(d)
    )


AIR = VoxelAttributes(0, 0, 0, 0, 0, 0, 0)


class VoxelGrid:
    """Bounded sparse grid; absent in-bounds cells read back as AIR.

    Construction is single-writer; call freeze() before sharing with render
    workers.  Setting AIR at a coordinate deletes the cell.
    """

    def __init__(self, dims: Tuple[int, int, int], voxel_size: float = 1.0):
        dims = tuple(int(x) for x in dims)
        if len(dims) != 3 or any(x <= 0 for x in dims):
            raise ValueError(f"dims must be three positive integers, got {dims}")
        if not voxel_size > 0:
            raise ValueError(f"voxel_size must be positive, got {voxel_size}")
        self.dims = dims
        self.voxel_size = float(voxel_size)
        self._cells: Dict[VoxelCoord, VoxelAttributes] = {}
        self._frozen = False

    def in_bounds(self, c: VoxelCoord) -> bool:
        return all(0 <= c[i] < self.dims[i] for i in range(3))

    def _check(self, c: VoxelCoord) -> VoxelCoord:
        c = (int(c[0]), int(c[1]), int(c[2]))
        if not self.in_bounds(c):
            raise OutOfBounds(c, self.dims)
        return c

    def get(self, c: VoxelCoord) -> VoxelAttributes:
        return self._cells.get(self._check(c), AIR)

    def set(self, c: VoxelCoord, a: VoxelAttributes) -> None:
        if self._frozen:
            raise RuntimeError("grid is frozen")
        c = self._check(c)
        if a.is_air:
            self._cells.pop(c, None)
        else:
            self._cells[c] = a

    def freeze(self) -> "VoxelGrid":
        self._frozen = True
        return self

    @property
    def occupied_count(self) -> int:
        return len(self._cells)

    def occupied(self) -> Iterator[Tuple[VoxelCoord, VoxelAttributes]]:
        return iter(self._cells.items())

    def to_dense(self) -> np.ndarray:
        """Dense (nx, ny, nz, 7) float64 array; air cells are all-zero."""
        out = np.zeros(self.dims + (7,), dtype=np.float64)
        for (x, y, z), a in self._cells.items():
            out[x, y, z, :] = a.as_array()
        return out

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, VoxelGrid)
            and self.dims == other.dims
            and self.voxel_size == other.voxel_size
            and self._cells == other._cells
        )

    def __repr__(self) -> str:
        return (
            f"VoxelGrid(dims={self.dims}, voxel_size={self.voxel_size}, "
            f"occupied={self.occupied_count})"
        )


@dataclass(frozen=True)
class MaterialPreset:
    name: str
    attrs: VoxelAttributes


# Example materials; values are qualitative illustrations, not measurements.
_PRESET_ROWS = [
    ("white_shirt", (0.8, 0.8, 0.8, 1, 1, 1, 1)),
    ("dark_shirt", (0.2, 0.2, 0.2, 1, 1, 1, 1)),
    ("red_shirt", (0.8, 0, 0, 1, 1, 1, 1)),
    ("green_shirt", (0, 0.8, 0, 1, 1, 1, 1)),
    ("blue_shirt", (0, 0, 0.8, 1, 1, 1, 1)),
    ("color_shirt", (0.8, 0.5, 0.2, 1, 1, 1, 1)),
    ("skin", (0.5, 0.5, 0.2, 0.8, 1, 1, 0.8)),
    ("brass", (0.8, 0.8, 0.2, 1, 1, 1, 0.2)),
    ("glass", (0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0)),
    ("frosted_glass", (0.2, 0.2, 0.2, 0.2, 0.2, 0.2, 0.8)),
    ("water", (0.2, 0.2, 0.5, 0.2, 0.2, 0.2, 0)),
    ("mirror", (1, 1, 1, 1, 1, 1, 0)),
    ("air", (0, 0, 0, 0, 0, 0, 0)),
    ("smoke_mist", (0.5, 0.5, 0.5, 0.2, 0.2, 0.2, 0.5)),
]

PRESETS = {name: MaterialPreset(name, make_attributes(*row)) for name, row in _PRESET_ROWS}


def material_preset(name: str) -> VoxelAttributes:
    """Look up a preset by name (case-insensitive, spaces/slashes as underscores)."""
    key = name.strip().lower().replace(" ", "_").replace("/", "_")
    try:
        return PRESETS[key].attrs
    except KeyError:
        raise UnknownMaterial(name) from None
