"""Deterministic stochastic renderer: scene assembly, tracing, tone mapping.

The hot loops live in _kernel; this module owns the user-facing types and
keeps all randomness in counter-based streams so a render is bit-identical
for a given (scene, seed) regardless of worker count.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numba
import numpy as np

from voxelight import _kernel
from voxelight.model import VoxelAttributes, VoxelGrid
from voxelight.optics import ScatterLobe
from voxelight.rng import RngStream
from voxelight.scene import SceneConfig
from voxelight.traversal import Ray


@dataclass
class Scene:
    """Runtime scene: immutable grid plus the precomputed kernel arrays."""

    grid: VoxelGrid
    config: SceneConfig
    attrs: np.ndarray = field(repr=False, default=None)
    meanpt: np.ndarray = field(repr=False, default=None)
    light_kinds: np.ndarray = field(repr=False, default=None)
    light_vecs: np.ndarray = field(repr=False, default=None)
    light_rgb: np.ndarray = field(repr=False, default=None)
    background: np.ndarray = field(repr=False, default=None)
    cam: np.ndarray = field(repr=False, default=None)

    @classmethod
    def build(cls, grid: VoxelGrid, config: SceneConfig) -> "Scene":
        attrs = grid.to_dense()
        meanpt = attrs[..., :3].mean(axis=-1)

        lights = config.lights
        kinds = np.zeros(len(lights), dtype=np.int64)
        vecs = np.zeros((len(lights), 3), dtype=np.float64)
        rgb = np.zeros((len(lights), 3), dtype=np.float64)
        kind_code = {"point": 0, "directional": 1, "ambient": 2}
        for i, li in enumerate(lights):
            kinds[i] = kind_code[li.kind]
            rgb[i] = li.rgb
            if li.kind == "point":
                vecs[i] = li.position
            elif li.kind == "directional":
                d = np.asarray(li.direction, dtype=np.float64)
                vecs[i] = d / np.linalg.norm(d)

        c = config.camera
        pos = np.asarray(c.position, dtype=np.float64)
        fwd = np.asarray(c.look_at, dtype=np.float64) - pos
        fwd /= np.linalg.norm(fwd)
        up = np.asarray(c.up, dtype=np.float64)
        right = np.cross(fwd, up)
        right /= np.linalg.norm(right)
        true_up = np.cross(right, fwd)
        half_h = np.tan(np.deg2rad(c.vfov_deg) / 2.0)
        half_w = half_h * c.width / c.height
        cam = np.concatenate([pos, right, true_up, fwd, [half_w, half_h]])

        return cls(
            grid=grid,
            config=config,
            attrs=attrs,
            meanpt=meanpt,
            light_kinds=kinds,
            light_vecs=vecs,
            light_rgb=rgb,
            background=np.asarray(config.background, dtype=np.float64),
            cam=cam,
        )


@dataclass
class Framebuffer:
    width: int
    height: int
    hdr_pixels: np.ndarray  # (height, width, 3) linear radiance

    def __post_init__(self):
        assert self.hdr_pixels.shape == (self.height, self.width, 3)
        assert np.all(np.isfinite(self.hdr_pixels))
        assert np.all(self.hdr_pixels >= 0)


def trace(scene: Scene, ray: Ray, depth: int = 0, rng: Optional[RngStream] = None,
          channel: int = -1) -> np.ndarray:
    """Linear RGB radiance estimate for one ray."""
    p = scene.config.render
    if rng is None:
        rng = RngStream(p.seed)
    stack = np.empty((_kernel.STACK, 10), dtype=np.float64)
    o = scene.config.optics
    r, g, b = _kernel.trace_one(
        scene.attrs, scene.meanpt, scene.grid.voxel_size,
        ray.origin[0], ray.origin[1], ray.origin[2],
        ray.dir[0], ray.dir[1], ray.dir[2],
        scene.background, scene.light_kinds, scene.light_vecs, scene.light_rgb,
        o.eps_max, o.gamma_map, p.max_depth - depth, channel,
        1 if p.smooth_normals else 0, rng.state, stack,
    )
    return np.array([r, g, b])


def sample_scatter(incident_dir, normal, base_dir, lobe: ScatterLobe,
                   rng: RngStream) -> np.ndarray:
    """Scattered direction about base_dir; d=0 returns base_dir bit-exactly."""
    n = np.asarray(normal, dtype=np.float64)
    b = np.asarray(base_dir, dtype=np.float64)
    x, y, z = _kernel.sample_scatter_dir(
        n[0], n[1], n[2], b[0], b[1], b[2],
        lobe.d, lobe.phong_exponent, lobe.lambert_weight, rng.state,
    )
    return np.array([x, y, z])


def direct_light(scene: Scene, point, normal, attrs: VoxelAttributes) -> np.ndarray:
    """Shadowed Lambertian-share light arriving at an interface point."""
    p = np.asarray(point, dtype=np.float64)
    n = np.asarray(normal, dtype=np.float64)
    o = scene.config.optics
    r, g, b = _kernel._direct_light(
        scene.attrs, scene.grid.voxel_size,
        p[0], p[1], p[2], n[0], n[1], n[2],
        attrs.as_array(), scene.light_kinds, scene.light_vecs, scene.light_rgb,
        o.eps_max, o.gamma_map,
    )
    return np.array([r, g, b])


def render(scene: Scene, workers: Optional[int] = None) -> Framebuffer:
    """Render the scene; output is bit-identical for any worker count."""
    p = scene.config.render
    c = scene.config.camera
    o = scene.config.optics
    prev = numba.get_num_threads()
    if workers is not None:
        limit = numba.config.NUMBA_NUM_THREADS
        numba.set_num_threads(min(max(1, workers), limit))
    try:
        hdr = _kernel.render_kernel(
            scene.attrs, scene.meanpt, scene.grid.voxel_size, scene.cam,
            c.width, c.height, p.spp, scene.background,
            scene.light_kinds, scene.light_vecs, scene.light_rgb,
            o.eps_max, o.gamma_map, p.max_depth,
            1 if p.spectral_split else 0, 1 if p.smooth_normals else 0,
            p.seed,
        )
    finally:
        if workers is not None:
            numba.set_num_threads(prev)
    return Framebuffer(width=c.width, height=c.height, hdr_pixels=hdr)


def tone_map(fb: Framebuffer, display_gamma: float = 2.2) -> np.ndarray:
    """8-bit image: clamp, gamma-encode, quantize round-half-up."""
    ldr = np.clip(fb.hdr_pixels, 0.0, 1.0) ** (1.0 / display_gamma)
    return np.floor(ldr * 255.0 + 0.5).astype(np.uint8)
