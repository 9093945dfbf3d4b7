"""Synthetic cloud generation: filled primitives and named demo scenes.

Rasterization uses voxel-center inclusion (coord + 0.5) and painter's
order: later primitives overwrite earlier ones.  Demo scenes are seedless
and fully deterministic; day_night_building emits one cloud with two
lighting configs to exercise the model/illumination separation.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Tuple, Union

from voxelight.errors import UnknownScene
from voxelight.model import VoxelAttributes, VoxelGrid, material_preset
from voxelight.scene import Camera, Light, OpticsConfig, RenderParams, SceneConfig

Vec3 = Tuple[float, float, float]


@dataclass(frozen=True)
class Sphere:
    center: Vec3
    radius: float
    material: VoxelAttributes
    kind: str = "sphere"


@dataclass(frozen=True)
class Box:
    lo: Vec3
    hi: Vec3
    material: VoxelAttributes
    kind: str = "box"


@dataclass(frozen=True)
class Slab:
    """Axis-aligned box on integer voxel bounds."""

    origin: Tuple[int, int, int]
    size: Tuple[int, int, int]
    material: VoxelAttributes
    kind: str = "slab"


@dataclass(frozen=True)
class FogRegion:
    lo: Vec3
    hi: Vec3
    material: VoxelAttributes
    kind: str = "fog_region"


@dataclass(frozen=True)
class CheckerFloor:
    """One-voxel-high floor at y=level with alternating square tiles."""

    level: int
    tile: int
    material_a: VoxelAttributes
    material_b: VoxelAttributes
    kind: str = "checker_floor"


Primitive = Union[Sphere, Box, Slab, FogRegion, CheckerFloor]


def _box_fill(grid: VoxelGrid, lo, hi, material):
    nx, ny, nz = grid.dims
    for x in range(max(0, int(lo[0] - 0.5)), min(nx, int(hi[0] + 0.5) + 1)):
        for y in range(max(0, int(lo[1] - 0.5)), min(ny, int(hi[1] + 0.5) + 1)):
            for z in range(max(0, int(lo[2] - 0.5)), min(nz, int(hi[2] + 0.5) + 1)):
                if (
                    lo[0] <= x + 0.5 <= hi[0]
                    and lo[1] <= y + 0.5 <= hi[1]
                    and lo[2] <= z + 0.5 <= hi[2]
                ):
                    grid.set((x, y, z), material)


def rasterize(primitive: Primitive, grid: VoxelGrid) -> VoxelGrid:
    """Fill every voxel whose center lies inside the solid; clips to bounds."""
    nx, ny, nz = grid.dims
    if isinstance(primitive, Sphere):
        cx, cy, cz = primitive.center
        r = primitive.radius
        x0, x1 = max(0, int(cx - r - 1)), min(nx, int(cx + r + 2))
        y0, y1 = max(0, int(cy - r - 1)), min(ny, int(cy + r + 2))
        z0, z1 = max(0, int(cz - r - 1)), min(nz, int(cz + r + 2))
        r2 = r * r
        for x in range(x0, x1):
            for y in range(y0, y1):
                for z in range(z0, z1):
                    dx = x + 0.5 - cx
                    dy = y + 0.5 - cy
                    dz = z + 0.5 - cz
                    if dx * dx + dy * dy + dz * dz <= r2:
                        grid.set((x, y, z), primitive.material)
    elif isinstance(primitive, (Box, FogRegion)):
        _box_fill(grid, primitive.lo, primitive.hi, primitive.material)
    elif isinstance(primitive, Slab):
        lo = primitive.origin
        hi = tuple(o + s for o, s in zip(primitive.origin, primitive.size))
        _box_fill(grid, lo, hi, primitive.material)
    elif isinstance(primitive, CheckerFloor):
        if 0 <= primitive.level < ny:
            t = primitive.tile
            for x in range(nx):
                for z in range(nz):
                    mat = (
                        primitive.material_a
                        if ((x // t) + (z // t)) % 2 == 0
                        else primitive.material_b
                    )
                    grid.set((x, primitive.level, z), mat)
    else:
        raise TypeError(f"unknown primitive {primitive!r}")
    return grid


# --- demo scenes -----------------------------------------------------------

GALLERY_ORDER = [
    "white_shirt", "dark_shirt", "red_shirt", "green_shirt", "blue_shirt",
    "color_shirt", "skin", "brass", "glass", "frosted_glass", "water",
    "mirror", "air", "smoke_mist",
]

# Slab footprint in the gallery: width 4, height 6, depth 2, pitch 6 along x.
GALLERY_SLAB = {"w": 4, "h": 6, "d": 2, "pitch": 6, "x0": 3}
GALLERY_ROW_Z = (12, 22)  # back row, front row


def gallery_slab_region(index: int) -> Tuple[Tuple[int, int, int], Tuple[int, int, int]]:
    """(origin, size) of the index-th gallery slab, in voxel units."""
    g = GALLERY_SLAB
    row, col = divmod(index, 7)
    x = g["x0"] + col * g["pitch"]
    z = GALLERY_ROW_Z[row]
    return (x, 1, z), (g["w"], g["h"], g["d"])


def _gallery() -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    grid = VoxelGrid((48, 24, 48))
    rasterize(
        CheckerFloor(0, 4, material_preset("white_shirt"), material_preset("dark_shirt")),
        grid,
    )
    for i, name in enumerate(GALLERY_ORDER):
        origin, size = gallery_slab_region(i)
        rasterize(Slab(origin, size, material_preset(name)), grid)
    cfg = SceneConfig(
        camera=Camera(
            position=(24.0, 26.0, 58.0),
            look_at=(24.0, 3.0, 18.0),
            width=256,
            height=256,
            vfov_deg=55.0,
        ),
        lights=[
            Light(kind="directional", direction=(-0.2, -1.0, -0.35), rgb=(1.6, 1.6, 1.6)),
            Light(kind="ambient", rgb=(0.25, 0.25, 0.25)),
        ],
        background=(0.06, 0.06, 0.09),
    )
    return grid.freeze(), [("default", cfg)]


def _mirror_box() -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    grid = VoxelGrid((64, 64, 64))
    rasterize(
        CheckerFloor(0, 4, material_preset("white_shirt"), material_preset("dark_shirt")),
        grid,
    )
    rasterize(Slab((0, 1, 0), (64, 40, 2), material_preset("mirror")), grid)
    rasterize(Sphere((32.0, 13.0, 40.0), 10.0, material_preset("glass")), grid)
    cfg = SceneConfig(
        camera=Camera(
            position=(32.0, 34.0, 116.0),
            look_at=(32.0, 10.0, 32.0),
            width=256,
            height=256,
        ),
        lights=[
            Light(kind="directional", direction=(-0.3, -1.0, -0.4), rgb=(1.4, 1.4, 1.4)),
            Light(kind="ambient", rgb=(0.2, 0.2, 0.2)),
        ],
        background=(0.08, 0.09, 0.12),
    )
    return grid.freeze(), [("default", cfg)]


def _glass_sphere() -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    grid = VoxelGrid((32, 32, 32))
    rasterize(
        CheckerFloor(0, 4, material_preset("white_shirt"), material_preset("blue_shirt")),
        grid,
    )
    rasterize(Sphere((16.0, 11.0, 16.0), 8.0, material_preset("glass")), grid)
    cfg = SceneConfig(
        camera=Camera(
            position=(16.0, 20.0, 60.0),
            look_at=(16.0, 8.0, 16.0),
            width=256,
            height=256,
        ),
        lights=[
            Light(kind="directional", direction=(-0.4, -1.0, -0.3), rgb=(1.5, 1.5, 1.5)),
            Light(kind="ambient", rgb=(0.2, 0.2, 0.2)),
        ],
        background=(0.55, 0.65, 0.85),
    )
    return grid.freeze(), [("default", cfg)]


def _fog_room() -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    grid = VoxelGrid((48, 48, 48))
    rasterize(
        CheckerFloor(0, 6, material_preset("dark_shirt"), material_preset("white_shirt")),
        grid,
    )
    rasterize(Slab((20, 1, 20), (8, 20, 8), material_preset("red_shirt")), grid)
    rasterize(FogRegion((6.0, 1.0, 6.0), (42.0, 26.0, 42.0), material_preset("smoke_mist")), grid)
    cfg = SceneConfig(
        camera=Camera(
            position=(24.0, 24.0, 92.0),
            look_at=(24.0, 12.0, 24.0),
            width=256,
            height=256,
        ),
        lights=[
            Light(kind="point", position=(24.0, 40.0, 44.0), rgb=(2.2, 2.2, 2.2)),
            Light(kind="ambient", rgb=(0.15, 0.15, 0.15)),
        ],
        background=(0.03, 0.03, 0.04),
        render=RenderParams(max_depth=6),
    )
    return grid.freeze(), [("default", cfg)]


def _day_night_building() -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    grid = VoxelGrid((64, 48, 64))
    ground_a = material_preset("dark_shirt")
    ground_b = material_preset("color_shirt")
    rasterize(CheckerFloor(0, 8, ground_a, ground_b), grid)
    wall = material_preset("skin")
    glass = material_preset("glass")
    # Hollow tower with glass windows on the front face.
    rasterize(Slab((20, 1, 20), (24, 36, 24), wall), grid)
    rasterize(Box((22.0, 2.0, 22.0), (42.0, 36.0, 42.0), material_preset("air")), grid)
    for wy in (8, 18, 28):
        for wx in (24, 32, 40):
            rasterize(Slab((wx - 2, wy, 42), (4, 5, 2), glass), grid)
    camera = Camera(
        position=(32.0, 36.0, 120.0),
        look_at=(32.0, 16.0, 32.0),
        width=256,
        height=256,
    )
    day = SceneConfig(
        camera=camera,
        lights=[
            Light(kind="directional", direction=(-0.5, -1.0, -0.6), rgb=(1.8, 1.75, 1.6)),
            Light(kind="ambient", rgb=(0.3, 0.32, 0.38)),
        ],
        background=(0.5, 0.65, 0.9),
    )
    night = SceneConfig(
        camera=camera,
        lights=[
            Light(kind="point", position=(32.0, 20.0, 32.0), rgb=(3.2, 2.9, 2.1)),
            Light(kind="ambient", rgb=(0.02, 0.02, 0.05)),
        ],
        background=(0.01, 0.01, 0.03),
    )
    return grid.freeze(), [("day", day), ("night", night)]


_SCENES = {
    "materials_gallery": _gallery,
    "mirror_box": _mirror_box,
    "glass_sphere": _glass_sphere,
    "fog_room": _fog_room,
    "day_night_building": _day_night_building,
}

DEMO_SCENE_NAMES = tuple(sorted(_SCENES))


def demo_scene(name: str) -> Tuple[VoxelGrid, List[Tuple[str, SceneConfig]]]:
    """Deterministic demo grid plus its labeled lighting configs."""
    try:
        builder = _SCENES[name]
    except KeyError:
        raise UnknownScene(name, _SCENES) from None
    return builder()
